#include "srmax/szfdpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srmax/linalg.hpp"

namespace srmax {

namespace {

void check_cov_shapes(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs) {
  if (covs.size() != eff.n_users()) {
    throw dimension_error("covariance list must have one entry per user");
  }
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    if (covs[k].n_rows != eff.sub_dim(k) || covs[k].n_cols != eff.sub_dim(k)) {
      throw dimension_error("covariance size does not match the user subspace");
    }
  }
}

void check_psd(const arma::cx_mat& cov) {
  double herm = arma::abs(cov - cov.t()).max();
  double scale = std::max(1.0, arma::abs(cov).max());
  if (herm > 1e-8 * scale) throw std::domain_error("covariance is not Hermitian");
  arma::vec evals = arma::eig_sym(0.5 * (cov + cov.t()));
  if (evals.min() < -1e-8 * std::max(1.0, evals.max())) {
    throw std::domain_error("covariance is not positive semidefinite");
  }
}

}  // namespace

EffectiveChannelSet effective_channels(const ChannelSet& channels) {
  const arma::uword n_users = channels.n_users();
  if (n_users == 0) throw dimension_error("effective_channels: no users");
  const arma::uword n_rx = channels.n_rx();
  const arma::uword n_tx = channels.n_tx();
  for (const auto& h : channels.channels) {
    if (h.n_rows != n_rx || h.n_cols != n_tx) {
      throw dimension_error("effective_channels: inconsistent channel sizes");
    }
  }
  if (n_tx <= (n_users - 1) * n_rx) {
    throw dimension_error("effective_channels: requires n_tx > (n_users - 1) * n_rx");
  }

  EffectiveChannelSet eff;
  eff.bases.reserve(n_users);
  eff.eff_channels.reserve(n_users);
  eff.bases.push_back(arma::cx_mat(n_tx, n_tx, arma::fill::eye));
  eff.eff_channels.push_back(channels.channels[0]);

  for (arma::uword k = 1; k < n_users; ++k) {
    arma::cx_mat stacked(k * n_rx, n_tx);
    for (arma::uword j = 0; j < k; ++j) {
      stacked.rows(j * n_rx, (j + 1) * n_rx - 1) = channels.channels[j];
    }
    arma::cx_mat u, v;
    arma::vec sv;
    if (!arma::svd(u, sv, v, stacked)) {
      throw std::runtime_error("effective_channels: SVD failed");
    }
    // right-singular vectors below 1e-10 * sigma_max span the null space
    double cutoff = sv.empty() ? 0.0 : 1e-10 * sv.max();
    arma::uword rank = 0;
    for (arma::uword i = 0; i < sv.n_elem; ++i) {
      if (sv[i] > cutoff) ++rank;
    }
    if (rank != k * n_rx) {
      throw degenerate_channel_error("effective_channels: stacked channel matrix is rank deficient");
    }
    arma::cx_mat basis = v.cols(rank, n_tx - 1);
    eff.eff_channels.push_back(channels.channels[k] * basis);
    eff.bases.push_back(std::move(basis));
  }
  return eff;
}

arma::vec bc_user_rates(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs) {
  check_cov_shapes(eff, covs);
  arma::vec rates(eff.n_users());
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    check_psd(covs[k]);
    const arma::cx_mat& h = eff.eff_channels[k];
    arma::cx_mat gram = h * (0.5 * (covs[k] + covs[k].t())) * h.t();
    arma::cx_mat inner = arma::cx_mat(h.n_rows, h.n_rows, arma::fill::eye) + 0.5 * (gram + gram.t());
    rates[k] = logdet_hpd(inner);
  }
  return rates;
}

double bc_sum_rate(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs) {
  return arma::accu(bc_user_rates(eff, covs));
}

arma::vec papc_usage(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs) {
  check_cov_shapes(eff, covs);
  arma::vec usage(eff.n_tx(), arma::fill::zeros);
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    const arma::cx_mat& basis = eff.bases[k];
    arma::cx_mat lifted = basis * covs[k];  // N x d_k
    // diag(V S V') without forming the full N x N product
    usage += arma::real(arma::sum(lifted % arma::conj(basis), 1));
  }
  return usage;
}

double zero_interference_residual(const ChannelSet& channels,
                                  const std::vector<arma::cx_mat>& full_covs) {
  const arma::uword n_users = channels.n_users();
  if (full_covs.size() != n_users) {
    throw dimension_error("zero_interference_residual: one covariance per user required");
  }
  double worst = 0.0;
  for (arma::uword k = 1; k < n_users; ++k) {
    const arma::cx_mat& cov = full_covs[k];
    if (cov.n_rows != channels.n_tx() || cov.n_cols != channels.n_tx()) {
      throw dimension_error("zero_interference_residual: covariances must be N x N");
    }
    double cov_scale = std::max(arma::trace(cov).real(), 1.0);
    for (arma::uword j = 0; j < k; ++j) {
      const arma::cx_mat& h = channels.channels[j];
      double leak = arma::norm(h * cov * h.t(), "fro");
      double h_scale = arma::norm(h, "fro");
      worst = std::max(worst, leak / (h_scale * h_scale * cov_scale));
    }
  }
  return worst;
}

}  // namespace srmax
