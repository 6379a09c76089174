#pragma once

#include <armadillo>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "srmax/errors.hpp"

namespace srmax {

// System dimensions and power budget for one solve. per_antenna_power holds
// the cap of each transmit antenna in watts and has to sum to total_power.
struct ScenarioConfig {
  arma::uword n_tx = 0;
  arma::uword n_rx = 0;
  arma::uword n_users = 0;
  double total_power = 1.0;
  arma::vec per_antenna_power;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  arma::uword max_outer_iters = 500;

  // Throws dimension_error when n_tx <= (n_users - 1) * n_rx, and
  // std::invalid_argument for broken power or tolerance settings.
  void validate() const;
};

// One channel realization: n_users complex matrices of size n_rx x n_tx.
struct ChannelSet {
  std::vector<arma::cx_mat> channels;

  arma::uword n_users() const { return channels.size(); }
  arma::uword n_rx() const { return channels.empty() ? 0 : channels.front().n_rows; }
  arma::uword n_tx() const { return channels.empty() ? 0 : channels.front().n_cols; }
};

// Total transmit power in watts for a budget given in dBW. Noise power is
// normalized to one per receive antenna.
double snr_to_power(double snr_dbw);

// Config with uniform caps p_i = P / N at the given SNR.
ScenarioConfig make_uniform_config(arma::uword n_tx, arma::uword n_rx, arma::uword n_users,
                                   double snr_dbw = 0.0, std::uint64_t seed = 0);

// Splits `total` over n strictly positive parts, uniformly on the simplex.
arma::vec dirichlet_power_split(arma::uword n, double total, std::mt19937_64& rng);

// i.i.d. CN(0,1) entries; deterministic for a given (dims, seed).
ChannelSet generate_channels(const ScenarioConfig& config);

// Text container: header "N M K", then K blocks of M x N "re im" pairs in
// row-major order. Round trips are bit exact.
void save_channels(const ChannelSet& set, const std::string& path);
ChannelSet load_channels(const std::string& path);

}  // namespace srmax
