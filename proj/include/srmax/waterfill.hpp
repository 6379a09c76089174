#pragma once

#include <armadillo>
#include <vector>

#include "srmax/szfdpc.hpp"

namespace srmax {

// Dual uplink variables: q is the diagonal of the noise shaping matrix Q and
// uplink_covs are the per-user M x M transmit covariances.
struct MacState {
  arma::vec q;
  std::vector<arma::cx_mat> uplink_covs;
};

struct InnerSolution {
  std::vector<arma::cx_mat> uplink_covs;
  double value = 0.0;  // sum_k log|A_k + H_k' S_k H_k|
};

// A_k = V_k' diag(q) V_k, lifted by 1e-12 * tr(A)/d_k on the diagonal when its
// smallest eigenvalue falls below that floor (q may touch the simplex boundary).
arma::cx_mat mac_noise_matrix(const EffectiveChannelSet& eff, const arma::vec& q, arma::uword k);

// Water level mu with sum_i [mu - inv_gains_i]_+ = total_power, found exactly
// by sorting the inverse gains and scanning the breakpoints.
double water_level(const arma::vec& inv_gains, double total_power);

// Maximizes sum_k log|A_k + H_k' S_k H_k| subject to sum_k tr(S_k) = total_power
// over PSD S_k: whiten each user by the Cholesky factor of A_k and water-fill
// across the singular modes of all users jointly.
InnerSolution solve_inner(const arma::vec& q, const EffectiveChannelSet& eff, double total_power);

}  // namespace srmax
