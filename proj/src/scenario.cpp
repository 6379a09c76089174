#include "srmax/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace srmax {

void ScenarioConfig::validate() const {
  if (n_tx == 0 || n_rx == 0 || n_users == 0) {
    throw dimension_error("scenario: all dimensions must be at least 1");
  }
  if (n_tx <= (n_users - 1) * n_rx) {
    throw dimension_error("scenario: requires n_tx > (n_users - 1) * n_rx");
  }
  if (!(total_power > 0.0) || !std::isfinite(total_power)) {
    throw std::invalid_argument("scenario: total_power must be positive and finite");
  }
  if (per_antenna_power.n_elem != n_tx) {
    throw dimension_error("scenario: per_antenna_power must have n_tx entries");
  }
  if (per_antenna_power.min() <= 0.0) {
    throw std::invalid_argument("scenario: per-antenna limits must be strictly positive");
  }
  double sum = arma::accu(per_antenna_power);
  if (std::abs(sum - total_power) > 1e-12 * total_power) {
    throw std::invalid_argument("scenario: per-antenna limits must sum to total_power");
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("scenario: tolerance must be positive");
  }
  if (max_outer_iters == 0) {
    throw std::invalid_argument("scenario: max_outer_iters must be at least 1");
  }
}

double snr_to_power(double snr_dbw) { return std::pow(10.0, snr_dbw / 10.0); }

ScenarioConfig make_uniform_config(arma::uword n_tx, arma::uword n_rx, arma::uword n_users,
                                   double snr_dbw, std::uint64_t seed) {
  ScenarioConfig config;
  config.n_tx = n_tx;
  config.n_rx = n_rx;
  config.n_users = n_users;
  config.total_power = snr_to_power(snr_dbw);
  config.per_antenna_power =
      arma::vec(n_tx, arma::fill::value(config.total_power / static_cast<double>(n_tx)));
  config.seed = seed;
  return config;
}

arma::vec dirichlet_power_split(arma::uword n, double total, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  arma::vec parts(n);
  for (arma::uword i = 0; i < n; ++i) parts[i] = exp1(rng);
  return parts * (total / arma::accu(parts));
}

ChannelSet generate_channels(const ScenarioConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  // real and imaginary parts each N(0, 1/2) so that entries are CN(0,1)
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
  ChannelSet set;
  set.channels.reserve(config.n_users);
  for (arma::uword k = 0; k < config.n_users; ++k) {
    arma::cx_mat h(config.n_rx, config.n_tx);
    for (arma::uword r = 0; r < config.n_rx; ++r) {
      for (arma::uword c = 0; c < config.n_tx; ++c) {
        double re = gauss(rng);
        double im = gauss(rng);
        h(r, c) = std::complex<double>(re, im);
      }
    }
    set.channels.push_back(std::move(h));
  }
  return set;
}

void save_channels(const ChannelSet& set, const std::string& path) {
  if (set.channels.empty()) throw dimension_error("save_channels: empty channel set");
  std::ofstream out(path);
  if (!out) throw parse_error("save_channels: cannot open " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << set.n_tx() << ' ' << set.n_rx() << ' ' << set.n_users() << '\n';
  for (const auto& h : set.channels) {
    if (h.n_rows != set.n_rx() || h.n_cols != set.n_tx()) {
      throw dimension_error("save_channels: inconsistent matrix sizes");
    }
    for (arma::uword r = 0; r < h.n_rows; ++r) {
      for (arma::uword c = 0; c < h.n_cols; ++c) {
        if (c > 0) out << ' ';
        out << h(r, c).real() << ' ' << h(r, c).imag();
      }
      out << '\n';
    }
  }
  if (!out) throw parse_error("save_channels: write failed for " + path);
}

ChannelSet load_channels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("load_channels: cannot open " + path);
  long long n = 0, m = 0, k = 0;
  if (!(in >> n >> m >> k)) throw parse_error("load_channels: bad header in " + path);
  if (n < 1 || m < 1 || k < 1) throw dimension_error("load_channels: non-positive dimensions");
  ChannelSet set;
  set.channels.reserve(static_cast<std::size_t>(k));
  for (long long u = 0; u < k; ++u) {
    arma::cx_mat h(static_cast<arma::uword>(m), static_cast<arma::uword>(n));
    for (long long r = 0; r < m; ++r) {
      for (long long c = 0; c < n; ++c) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) {
          throw parse_error("load_channels: truncated data in " + path);
        }
        h(static_cast<arma::uword>(r), static_cast<arma::uword>(c)) = std::complex<double>(re, im);
      }
    }
    set.channels.push_back(std::move(h));
  }
  std::string trailing;
  if (in >> trailing) {
    throw dimension_error("load_channels: data does not match declared dimensions");
  }
  return set;
}

}  // namespace srmax
