#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "srmax/cli.hpp"

namespace {

std::vector<srmax::RegMethod> parse_methods(const std::string& arg) {
  if (arg == "all") {
    return {srmax::RegMethod::ols, srmax::RegMethod::ridge, srmax::RegMethod::pcr};
  }
  return {srmax::parse_method(arg)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum-rate solver suite for MIMO broadcast channels with per-antenna power limits"};
  app.require_subcommand(1);

  srmax::SolveOptions solve_opts;
  auto* solve_cmd = app.add_subcommand("solve", "solve one scenario");
  solve_cmd->add_option("--config", solve_opts.config_path, "scenario file (key=value)")
      ->required();
  solve_cmd->add_option("--channels", solve_opts.channel_path, "channel file; generated when absent");
  solve_cmd->add_option("--out", solve_opts.out_path, "solution CSV");
  solve_cmd->add_flag("--verbose", solve_opts.verbose, "print the iteration trace");

  srmax::MonteCarloOptions mc_opts;
  std::string mc_klist = "1,2,3,4";
  auto* mc_cmd = app.add_subcommand("montecarlo", "average sum rate over channel draws");
  mc_cmd->add_option("--n", mc_opts.n_tx, "transmit antennas");
  mc_cmd->add_option("--m", mc_opts.n_rx, "receive antennas per user");
  mc_cmd->add_option("--klist", mc_klist, "user counts, comma separated");
  mc_cmd->add_option("--trials", mc_opts.trials, "channel draws per user count");
  mc_cmd->add_option("--snr", mc_opts.snr_dbw, "total power in dBW");
  mc_cmd->add_option("--seed", mc_opts.seed, "base seed");
  mc_cmd->add_option("--out", mc_opts.out_path, "output CSV");
  bool mc_serial = false;
  mc_cmd->add_flag("--serial", mc_serial, "disable the worker pool");

  srmax::BenchmarkOptions bench_opts;
  std::string bench_nlist = "4,6,8,10,12";
  auto* bench_cmd = app.add_subcommand("benchmark", "runtime of the solver against the reference");
  bench_cmd->add_option("--nlist", bench_nlist, "transmit antenna counts, comma separated");
  bench_cmd->add_option("--m", bench_opts.n_rx, "receive antennas per user");
  bench_cmd->add_option("--k", bench_opts.n_users, "users");
  bench_cmd->add_option("--trials", bench_opts.trials, "repetitions per size");
  bench_cmd->add_option("--snr", bench_opts.snr_dbw, "total power in dBW");
  bench_cmd->add_option("--seed", bench_opts.seed, "base seed");
  bench_cmd->add_option("--out", bench_opts.out_path, "output CSV");

  srmax::DatasetOptions data_opts;
  std::string data_snrlist = "0,10,20,30,40";
  auto* data_cmd = app.add_subcommand("dataset", "generate a regression dataset");
  data_cmd->add_option("--n", data_opts.n_tx, "transmit antennas");
  data_cmd->add_option("--m", data_opts.n_rx, "receive antennas per user");
  data_cmd->add_option("--k", data_opts.n_users, "users");
  data_cmd->add_option("--samples", data_opts.samples, "sample count");
  data_cmd->add_option("--snrlist", data_snrlist, "SNR values in dBW, cycled over samples");
  data_cmd->add_option("--seed", data_opts.seed, "base seed");
  data_cmd->add_option("--out", data_opts.out_path, "output CSV");
  bool data_serial = false;
  data_cmd->add_flag("--serial", data_serial, "disable the worker pool");

  srmax::TrainOptions train_opts;
  std::string train_method = "ols";
  auto* train_cmd = app.add_subcommand("train", "fit a regression model on a dataset");
  train_cmd->add_option("--data", train_opts.data_path, "dataset CSV")->required();
  train_cmd->add_option("--method", train_method, "ols, ridge or pcr");
  train_cmd->add_option("--lambda", train_opts.lambda, "ridge penalty");
  train_cmd->add_option("--out", train_opts.out_path, "model file");

  srmax::EvalOptions eval_opts;
  std::string eval_method = "all";
  auto* eval_cmd = app.add_subcommand("eval", "cross-validate and holdout-test on a dataset");
  eval_cmd->add_option("--data", eval_opts.data_path, "dataset CSV")->required();
  eval_cmd->add_option("--method", eval_method, "ols, ridge, pcr or all");
  eval_cmd->add_option("--lambda", eval_opts.lambda, "ridge penalty");
  eval_cmd->add_option("--folds", eval_opts.folds, "cross-validation folds");
  eval_cmd->add_option("--split", eval_opts.train_count, "holdout training size (default 90%)");
  eval_cmd->add_option("--seed", eval_opts.seed, "fold and split seed");
  eval_cmd->add_option("--out", eval_opts.out_path, "output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return srmax::cmd_solve(solve_opts);
    if (mc_cmd->parsed()) {
      mc_opts.k_list.clear();
      for (double v : srmax::parse_double_list(mc_klist))
        mc_opts.k_list.push_back(static_cast<arma::uword>(v));
      mc_opts.parallel = !mc_serial;
      return srmax::cmd_montecarlo(mc_opts);
    }
    if (bench_cmd->parsed()) {
      bench_opts.n_list.clear();
      for (double v : srmax::parse_double_list(bench_nlist))
        bench_opts.n_list.push_back(static_cast<arma::uword>(v));
      return srmax::cmd_benchmark(bench_opts);
    }
    if (data_cmd->parsed()) {
      data_opts.snr_dbw_set = srmax::parse_double_list(data_snrlist);
      data_opts.parallel = !data_serial;
      return srmax::cmd_dataset(data_opts);
    }
    if (train_cmd->parsed()) {
      train_opts.method = srmax::parse_method(train_method);
      return srmax::cmd_train(train_opts);
    }
    if (eval_cmd->parsed()) {
      eval_opts.methods = parse_methods(eval_method);
      return srmax::cmd_eval(eval_opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
