#pragma once

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

#include "srmax/feature_design.hpp"
#include "srmax/scenario.hpp"

namespace srmax {

// Flat key=value scenario file: n_tx, n_rx, n_users, snr_dbw,
// papc_mode=uniform|random|explicit, papc_values, seed, tolerance,
// max_outer_iters. Lines starting with '#' are ignored.
ScenarioConfig load_config(const std::string& path);

// "1,2.5,3" -> {1.0, 2.5, 3.0}
std::vector<double> parse_double_list(const std::string& text);

// Exit codes shared by all commands: 0 success, 2 infeasible or malformed
// input (signalled by exceptions, mapped in the frontend), 3 a result carries
// a non-convergence flag.

struct SolveOptions {
  std::string config_path;
  std::string channel_path;  // generated from the config seed when empty
  std::string out_path;      // CSV; stdout summary is always printed
  bool verbose = false;
};
int cmd_solve(const SolveOptions& options);

struct MonteCarloOptions {
  arma::uword n_tx = 64;
  arma::uword n_rx = 2;
  std::vector<arma::uword> k_list = {1, 2, 3, 4};
  arma::uword trials = 100;
  double snr_dbw = 0.0;
  std::uint64_t seed = 0;
  std::string out_path;
  bool parallel = true;
};
int cmd_montecarlo(const MonteCarloOptions& options);

struct BenchmarkOptions {
  std::vector<arma::uword> n_list = {4, 6, 8, 10, 12};
  arma::uword n_rx = 2;
  arma::uword n_users = 2;
  arma::uword trials = 5;
  double snr_dbw = 0.0;
  std::uint64_t seed = 0;
  std::string out_path;
};
int cmd_benchmark(const BenchmarkOptions& options);

struct DatasetOptions {
  arma::uword n_tx = 32;
  arma::uword n_rx = 2;
  arma::uword n_users = 2;
  arma::uword samples = 240;
  std::vector<double> snr_dbw_set = {0.0, 10.0, 20.0, 30.0, 40.0};
  std::uint64_t seed = 0;
  std::string out_path;
  bool parallel = true;
};
int cmd_dataset(const DatasetOptions& options);

struct TrainOptions {
  std::string data_path;
  std::string out_path;
  RegMethod method = RegMethod::ols;
  double lambda = 1.0;
};
int cmd_train(const TrainOptions& options);

struct EvalOptions {
  std::string data_path;
  std::string out_path;
  std::vector<RegMethod> methods = {RegMethod::ols, RegMethod::ridge, RegMethod::pcr};
  double lambda = 1.0;
  arma::uword folds = 10;
  arma::uword train_count = 0;  // holdout training size; 0 picks 90% of the samples
  std::uint64_t seed = 0;
};
int cmd_eval(const EvalOptions& options);

}  // namespace srmax
