#pragma once

#include <armadillo>
#include <functional>
#include <vector>

#include "srmax/szfdpc.hpp"

namespace srmax {

struct OracleResult {
  double rate = 0.0;                    // nats
  std::vector<arma::cx_mat> covs;       // d_k x d_k downlink covariances
  arma::uword barrier_rounds = 0;
  double kkt_residual = 0.0;            // complementarity bound plus final gradient norm
  std::vector<double> round_rates;      // achieved rate after each barrier round
  std::vector<double> round_kkt;        // residual after each barrier round
  bool converged = false;
};

// Desk-scale reference solver (n_tx <= 12): maximizes the downlink sum rate
// under per-antenna limits by maximizing the log-barrier objective
//   R(S) + (1/t) [ sum_k log det S_k + sum_i log(p_i - usage_i) ]
// for t = 1, 10, 100, ... until the barrier suboptimality bound m/t drops
// below the requested tolerance. Each centering runs BFGS over the real
// parameterization of the Hermitian covariances; first-order steps alone
// stall because the barrier curvature grows with t. Exists to cross-check
// the fast path, not to compete with it.
OracleResult barrier_primal_solve(const EffectiveChannelSet& eff, const arma::vec& per_antenna_power,
                                  double tol);

// Exact projection onto { q >= 0, weights' q = budget } by enumerating zero
// patterns and solving each equality-constrained quadratic in closed form.
// Dimension capped at 20.
arma::vec brute_force_projection(const arma::vec& point, const arma::vec& weights, double budget);

// Central finite differences (f(x + h e_i) - f(x - h e_i)) / 2h.
arma::vec fd_gradient(const std::function<double(const arma::vec&)>& f, const arma::vec& x, double h);

}  // namespace srmax
