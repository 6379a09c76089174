#include "srmax/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srmax/linalg.hpp"

namespace srmax {

arma::cx_mat mac_noise_matrix(const EffectiveChannelSet& eff, const arma::vec& q, arma::uword k) {
  if (q.n_elem != eff.n_tx()) throw dimension_error("mac_noise_matrix: q must have n_tx entries");
  arma::cx_mat a = weighted_gram(eff.bases[k], q);
  double floor = 1e-12 * arma::trace(a).real() / static_cast<double>(a.n_rows);
  if (floor > 0.0 && min_eig_herm(a) < floor) {
    a.diag() += floor;
  }
  return a;
}

double water_level(const arma::vec& inv_gains, double total_power) {
  if (total_power < 0.0 || !std::isfinite(total_power)) {
    throw std::invalid_argument("water_level: total_power must be nonnegative");
  }
  if (inv_gains.empty()) {
    if (total_power > 0.0) {
      throw std::invalid_argument("water_level: no modes to allocate power to");
    }
    return 0.0;
  }
  if (inv_gains.min() <= 0.0 || !inv_gains.is_finite()) {
    throw std::invalid_argument("water_level: inverse gains must be positive and finite");
  }
  if (total_power == 0.0) return inv_gains.min();

  arma::vec sorted = arma::sort(inv_gains);
  double prefix = 0.0;
  for (arma::uword m = 0; m < sorted.n_elem; ++m) {
    prefix += sorted[m];
    double mu = (total_power + prefix) / static_cast<double>(m + 1);
    bool last = (m + 1 == sorted.n_elem);
    if (mu > sorted[m] && (last || mu <= sorted[m + 1])) {
      return mu;
    }
  }
  // numerically the scan always terminates above; fall back to all modes active
  return (total_power + prefix) / static_cast<double>(sorted.n_elem);
}

InnerSolution solve_inner(const arma::vec& q, const EffectiveChannelSet& eff, double total_power) {
  const arma::uword n_users = eff.n_users();
  if (q.n_elem != eff.n_tx()) throw dimension_error("solve_inner: q must have n_tx entries");
  if (q.min() < -1e-12) throw std::invalid_argument("solve_inner: q must be nonnegative");
  if (total_power < 0.0) throw std::invalid_argument("solve_inner: total_power must be nonnegative");

  InnerSolution sol;
  sol.uplink_covs.resize(n_users);
  double base_logdet = 0.0;

  std::vector<arma::cx_mat> right_vecs(n_users);
  std::vector<arma::vec> sigmas(n_users);
  for (arma::uword k = 0; k < n_users; ++k) {
    arma::cx_mat a = mac_noise_matrix(eff, q, k);
    arma::cx_mat chol_lower;
    if (!arma::chol(chol_lower, a, "lower")) {
      throw degenerate_channel_error("solve_inner: whitening matrix is singular");
    }
    base_logdet += 2.0 * arma::accu(arma::log(arma::real(chol_lower.diag())));
    // whitened channel F_k = L^{-1} H_k' of size d_k x M
    arma::cx_mat whitened =
        arma::solve(arma::trimatl(chol_lower), eff.eff_channels[k].t());
    arma::cx_mat u, v;
    arma::vec sv;
    if (!arma::svd_econ(u, sv, v, whitened)) {
      throw std::runtime_error("solve_inner: SVD failed");
    }
    right_vecs[k] = std::move(v);
    sigmas[k] = std::move(sv);
    sol.uplink_covs[k] = arma::cx_mat(eff.n_rx(), eff.n_rx(), arma::fill::zeros);
  }

  if (total_power == 0.0) {
    sol.value = base_logdet;
    return sol;
  }

  std::vector<std::pair<arma::uword, arma::uword>> modes;  // (user, mode index)
  std::vector<double> inv_gains;
  for (arma::uword k = 0; k < n_users; ++k) {
    for (arma::uword i = 0; i < sigmas[k].n_elem; ++i) {
      double s = sigmas[k][i];
      if (s > 1e-150) {
        modes.emplace_back(k, i);
        inv_gains.push_back(1.0 / (s * s));
      }
    }
  }
  if (modes.empty()) {
    throw degenerate_channel_error("solve_inner: all channel modes vanish");
  }

  double mu = water_level(arma::vec(inv_gains), total_power);
  double gain_term = 0.0;
  std::vector<arma::vec> powers(n_users);
  for (arma::uword k = 0; k < n_users; ++k) {
    powers[k] = arma::vec(sigmas[k].n_elem, arma::fill::zeros);
  }
  for (std::size_t m = 0; m < modes.size(); ++m) {
    double rho = std::max(mu - inv_gains[m], 0.0);
    if (rho > 0.0) {
      auto [k, i] = modes[m];
      powers[k][i] = rho;
      gain_term += std::log1p(rho / inv_gains[m]);
    }
  }
  for (arma::uword k = 0; k < n_users; ++k) {
    if (arma::accu(powers[k]) > 0.0) {
      arma::cx_mat cov = right_vecs[k] *
                         arma::diagmat(arma::conv_to<arma::cx_vec>::from(powers[k])) *
                         right_vecs[k].t();
      sol.uplink_covs[k] = 0.5 * (cov + cov.t());
    }
  }
  sol.value = base_logdet + gain_term;
  return sol;
}

}  // namespace srmax
