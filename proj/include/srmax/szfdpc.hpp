#pragma once

#include <armadillo>
#include <vector>

#include "srmax/scenario.hpp"

namespace srmax {

// Null-space chain for successive zero forcing. For user k, bases[k] has
// orthonormal columns spanning the null space of the stacked channels of
// users 0..k-1 (the identity for the first user) and eff_channels[k] is the
// user channel restricted to that subspace.
struct EffectiveChannelSet {
  std::vector<arma::cx_mat> bases;         // N x d_k
  std::vector<arma::cx_mat> eff_channels;  // M x d_k

  arma::uword n_users() const { return bases.size(); }
  arma::uword n_tx() const { return bases.empty() ? 0 : bases.front().n_rows; }
  arma::uword n_rx() const { return eff_channels.empty() ? 0 : eff_channels.front().n_rows; }
  arma::uword sub_dim(arma::uword k) const { return bases[k].n_cols; }
};

// Builds the chain via full SVDs of the stacked channels. Subspace dimensions
// follow d_k = N - k*M for the (k+1)th user; a rank-deficient stack raises
// degenerate_channel_error.
EffectiveChannelSet effective_channels(const ChannelSet& channels);

// Per-user log-det rates (natural log) for downlink covariances given in the
// reduced d_k x d_k coordinates. Non-PSD input raises std::domain_error.
arma::vec bc_user_rates(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs);

// Sum of the per-user rates.
double bc_sum_rate(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs);

// Per-antenna transmit power of the lifted covariances, length N.
arma::vec papc_usage(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs);

// Largest normalized leakage ||H_j S_k H_j'||_F / (||H_j||_F^2 max(tr S_k, 1))
// over pairs j < k, for full-size N x N covariances. Zero when K = 1.
double zero_interference_residual(const ChannelSet& channels,
                                  const std::vector<arma::cx_mat>& full_covs);

}  // namespace srmax
