#pragma once

#include <armadillo>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "srmax/scenario.hpp"

namespace srmax {

// Column-per-sample raw inputs and sum-rate targets for one (N, M, K) setting.
struct FeatureDataset {
  arma::mat features;  // p x s, p = N + 2*N*M*K
  arma::vec targets;   // length s, nats
  arma::uword n_tx = 0;
  arma::uword n_rx = 0;
  arma::uword n_users = 0;

  arma::uword n_features() const { return features.n_rows; }
  arma::uword n_samples() const { return features.n_cols; }
};

// Outcome of the PCA-based selection step plus the log-space transform spec.
struct FeatureDesign {
  arma::uvec selected;          // l raw-feature indices, ascending
  arma::uword n_components = 0; // eigenvectors of the correlation matrix kept (eigenvalue > 1)
  double log_base = 0.0;
  arma::vec standardize_mean;   // training statistics per raw feature
  arma::vec standardize_scale;
};

enum class RegMethod { ols, ridge, pcr };

struct RegressionModel {
  arma::vec weights;  // length l + 1, intercept first
  RegMethod method = RegMethod::ols;
  double lambda = 0.0;
  FeatureDesign design;
  bool used_pseudoinverse = false;  // rank-deficient least squares fell back to pinv
};

arma::uword feature_count(arma::uword n_tx, arma::uword n_rx, arma::uword n_users);
arma::uword design_size(arma::uword n_tx, arma::uword n_rx, arma::uword n_users);

// Raw layout: per-antenna limits, then Re(H_k) row-major per user, then Im.
arma::vec sample_features(const arma::vec& per_antenna_power, const ChannelSet& channels);

// Configs and channel draws for one experiment batch: per-antenna limits drawn
// uniformly on the simplex, SNR cycling through snr_dbw_set, seeds base_seed + i.
std::pair<std::vector<ScenarioConfig>, std::vector<ChannelSet>> make_experiment_samples(
    arma::uword n_tx, arma::uword n_rx, arma::uword n_users, arma::uword n_samples,
    std::uint64_t base_seed, const std::vector<double>& snr_dbw_set);

// Features from the inputs, targets from the alternating-optimization solver.
FeatureDataset build_dataset(const std::vector<ScenarioConfig>& configs,
                             const std::vector<ChannelSet>& channels, bool parallel = true);

// Standardizes features, keeps correlation-matrix eigenvectors with eigenvalue
// above one, scores each raw feature by its summed absolute loadings and
// returns the l = N + K*min(M, N) best (ties resolved toward lower indices).
FeatureDesign select_features(const FeatureDataset& train, double log_base = 2.718281828459045235);

// [1, log_b max(|x_j|, 1e-12) for j in selected].
arma::vec transform(const FeatureDesign& design, const arma::vec& raw);

// Design matrix with one transformed sample per row, s x (l+1).
arma::mat transform_all(const FeatureDesign& design, const arma::mat& raw_columns);

// Weight fit on an explicit design matrix. OLS falls back to the minimum-norm
// pseudoinverse when the matrix is rank deficient (second member set to true);
// ridge leaves the intercept unpenalized; PCR regresses on the standardized
// principal components with eigenvalue above one and maps the weights back.
std::pair<arma::vec, bool> fit_linear(RegMethod method, const arma::mat& design_matrix,
                                      const arma::vec& targets, double lambda = 1.0);

// Full pipeline on a training set: select, transform, fit.
RegressionModel fit_model(RegMethod method, const FeatureDataset& train, double lambda = 1.0,
                          double log_base = 2.718281828459045235);

double predict(const RegressionModel& model, const arma::vec& raw);

// Mean over folds of 100% * sqrt(sum (y-yhat)^2 / sum (y-ybar_test)^2), folds
// assigned by a seed-driven permutation; constant-target folds are skipped.
double evaluate_arrmse(RegMethod method, const FeatureDataset& dataset, arma::uword folds,
                       double lambda, std::uint64_t seed);

// CSV with a "# n_tx=... n_rx=... n_users=..." meta line, a feature_0..target
// header and one sample per row.
void save_dataset(const FeatureDataset& dataset, const std::string& path);
FeatureDataset load_dataset(const std::string& path);

void save_model(const RegressionModel& model, const std::string& path);
RegressionModel load_model(const std::string& path);

std::string method_name(RegMethod method);
RegMethod parse_method(const std::string& name);

}  // namespace srmax
