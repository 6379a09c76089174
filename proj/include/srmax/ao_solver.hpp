#pragma once

#include <armadillo>
#include <utility>
#include <vector>

#include "srmax/gp_simplex.hpp"
#include "srmax/scenario.hpp"
#include "srmax/szfdpc.hpp"
#include "srmax/waterfill.hpp"

namespace srmax {

struct BcSolution {
  std::vector<arma::cx_mat> downlink_covs;  // d_k x d_k, reduced coordinates
  std::vector<arma::cx_mat> full_covs;      // N x N lifted covariances
  double sum_rate = 0.0;                    // nats
  arma::vec papc_slack;                     // per-antenna limit minus usage
  MacState mac;                             // final dual pair (q, uplink covariances)
};

struct SolveReport {
  arma::uword outer_iterations = 0;
  std::vector<double> objective_trace;  // dual objective per outer iteration
  std::vector<double> tau_trace;        // |change| per outer iteration (first entry inf)
  std::vector<double> time_trace;       // elapsed seconds at each iteration
  double final_tau = 0.0;
  double wall_time_s = 0.0;
  bool converged = false;
};

// Linear coefficients of the convexified dual subproblem:
// alpha_i = sum_k [V_k Phi_k^{-1} V_k']_ii with Phi_k = A_k(q) + H_k' S_k H_k.
arma::vec sca_alpha(const EffectiveChannelSet& eff, const arma::vec& q,
                    const std::vector<arma::cx_mat>& uplink_covs);

// Uplink-to-downlink covariance transformation. With B = A_k(q) and the thin
// SVD U s V' = B^{-1/2} H_k', each downlink covariance is
// B^{-1/2} U (V' S_k V) U' B^{-1/2}; the per-user rate is preserved.
std::vector<arma::cx_mat> mac_to_bc(const EffectiveChannelSet& eff, const arma::vec& q,
                                    const std::vector<arma::cx_mat>& uplink_covs);

// Alternating optimization on the dual problem: water-filling in the uplink
// covariances, then a gradient-projection step on q against the linearized
// objective, until the dual objective settles within config.tolerance.
// The final uplink solution is mapped back to downlink covariances.
std::pair<BcSolution, SolveReport> solve(const ScenarioConfig& config, const ChannelSet& channels);

}  // namespace srmax
