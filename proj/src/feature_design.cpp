#include "srmax/feature_design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "srmax/ao_solver.hpp"
#include "srmax/batch.hpp"

namespace srmax {

namespace {

constexpr double kLogFloor = 1e-12;

struct Standardized {
  arma::mat data;
  arma::vec mean;
  arma::vec scale;
};

// row-wise zero mean, unit sample variance; constant rows keep scale one
Standardized standardize_rows(const arma::mat& x) {
  Standardized out;
  out.mean = arma::mean(x, 1);
  out.scale = arma::stddev(x, 0, 1);
  out.scale.transform([](double v) { return v > 0.0 ? v : 1.0; });
  out.data = x.each_col() - out.mean;
  out.data.each_col() /= out.scale;
  return out;
}

}  // namespace

arma::uword feature_count(arma::uword n_tx, arma::uword n_rx, arma::uword n_users) {
  return n_tx + 2 * n_tx * n_rx * n_users;
}

arma::uword design_size(arma::uword n_tx, arma::uword n_rx, arma::uword n_users) {
  return n_tx + n_users * std::min(n_rx, n_tx);
}

arma::vec sample_features(const arma::vec& per_antenna_power, const ChannelSet& channels) {
  const arma::uword n_tx = channels.n_tx();
  const arma::uword n_rx = channels.n_rx();
  const arma::uword n_users = channels.n_users();
  if (per_antenna_power.n_elem != n_tx) {
    throw dimension_error("sample_features: per-antenna limits must have n_tx entries");
  }
  arma::vec x(feature_count(n_tx, n_rx, n_users));
  arma::uword pos = 0;
  for (arma::uword i = 0; i < n_tx; ++i) x[pos++] = per_antenna_power[i];
  for (arma::uword k = 0; k < n_users; ++k) {
    for (arma::uword r = 0; r < n_rx; ++r)
      for (arma::uword c = 0; c < n_tx; ++c) x[pos++] = channels.channels[k](r, c).real();
  }
  for (arma::uword k = 0; k < n_users; ++k) {
    for (arma::uword r = 0; r < n_rx; ++r)
      for (arma::uword c = 0; c < n_tx; ++c) x[pos++] = channels.channels[k](r, c).imag();
  }
  return x;
}

std::pair<std::vector<ScenarioConfig>, std::vector<ChannelSet>> make_experiment_samples(
    arma::uword n_tx, arma::uword n_rx, arma::uword n_users, arma::uword n_samples,
    std::uint64_t base_seed, const std::vector<double>& snr_dbw_set) {
  if (snr_dbw_set.empty()) throw std::invalid_argument("make_experiment_samples: empty SNR set");
  std::vector<ScenarioConfig> configs;
  std::vector<ChannelSet> channels;
  configs.reserve(n_samples);
  channels.reserve(n_samples);
  for (arma::uword i = 0; i < n_samples; ++i) {
    ScenarioConfig config;
    config.n_tx = n_tx;
    config.n_rx = n_rx;
    config.n_users = n_users;
    config.seed = base_seed + i;
    config.total_power = snr_to_power(snr_dbw_set[i % snr_dbw_set.size()]);
    // limits drawn from a stream separated from the channel stream
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    config.per_antenna_power = dirichlet_power_split(n_tx, config.total_power, rng);
    config.validate();
    channels.push_back(generate_channels(config));
    configs.push_back(std::move(config));
  }
  return {std::move(configs), std::move(channels)};
}

FeatureDataset build_dataset(const std::vector<ScenarioConfig>& configs,
                             const std::vector<ChannelSet>& channels, bool parallel) {
  if (configs.empty() || configs.size() != channels.size()) {
    throw std::invalid_argument("build_dataset: configs and channels must align and be nonempty");
  }
  const arma::uword n_tx = configs.front().n_tx;
  const arma::uword n_rx = configs.front().n_rx;
  const arma::uword n_users = configs.front().n_users;
  for (const auto& config : configs) {
    if (config.n_tx != n_tx || config.n_rx != n_rx || config.n_users != n_users) {
      throw std::invalid_argument("build_dataset: all samples must share one (N, M, K) setting");
    }
  }

  FeatureDataset ds;
  ds.n_tx = n_tx;
  ds.n_rx = n_rx;
  ds.n_users = n_users;
  ds.features.set_size(feature_count(n_tx, n_rx, n_users), configs.size());
  ds.targets.set_size(configs.size());

  std::vector<double> rates = run_indexed<double>(
      configs.size(),
      [&](std::size_t i) { return solve(configs[i], channels[i]).first.sum_rate; }, parallel);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    ds.features.col(i) = sample_features(configs[i].per_antenna_power, channels[i]);
    ds.targets[i] = rates[i];
  }
  if (!ds.features.is_finite() || !ds.targets.is_finite()) {
    throw std::runtime_error("build_dataset: non-finite entries");
  }
  return ds;
}

FeatureDesign select_features(const FeatureDataset& train, double log_base) {
  const arma::uword p = train.n_features();
  const arma::uword s = train.n_samples();
  if (s < 2) throw std::invalid_argument("select_features: need at least two samples");
  const arma::uword l = design_size(train.n_tx, train.n_rx, train.n_users);
  if (l >= p) throw std::logic_error("select_features: design size must stay below feature count");

  Standardized std_rows = standardize_rows(train.features);
  arma::mat correlation = std_rows.data * std_rows.data.t() / static_cast<double>(s - 1);
  correlation = 0.5 * (correlation + correlation.t());
  arma::vec evals;
  arma::mat evecs;
  if (!arma::eig_sym(evals, evecs, correlation)) {
    throw std::runtime_error("select_features: eigendecomposition failed");
  }

  // eigenvalues ascend; keep those above one, or the strongest if none qualify
  arma::uword kept = 0;
  for (arma::uword i = 0; i < evals.n_elem; ++i) {
    if (evals[i] > 1.0) ++kept;
  }
  if (kept == 0) kept = 1;
  arma::mat loadings = evecs.cols(p - kept, p - 1);
  arma::vec contribution = arma::sum(arma::abs(loadings), 1);

  std::vector<arma::uword> order(p);
  std::iota(order.begin(), order.end(), arma::uword(0));
  std::stable_sort(order.begin(), order.end(), [&](arma::uword a, arma::uword b) {
    if (contribution[a] != contribution[b]) return contribution[a] > contribution[b];
    return a < b;
  });
  order.resize(l);
  std::sort(order.begin(), order.end());

  FeatureDesign design;
  design.selected = arma::uvec(order);
  design.n_components = kept;
  design.log_base = log_base;
  design.standardize_mean = std::move(std_rows.mean);
  design.standardize_scale = std::move(std_rows.scale);
  return design;
}

arma::vec transform(const FeatureDesign& design, const arma::vec& raw) {
  arma::vec out(design.selected.n_elem + 1);
  out[0] = 1.0;
  const double log_b = std::log(design.log_base);
  for (arma::uword j = 0; j < design.selected.n_elem; ++j) {
    double magnitude = std::max(std::abs(raw[design.selected[j]]), kLogFloor);
    out[j + 1] = std::log(magnitude) / log_b;
  }
  return out;
}

arma::mat transform_all(const FeatureDesign& design, const arma::mat& raw_columns) {
  arma::mat out(raw_columns.n_cols, design.selected.n_elem + 1);
  for (arma::uword i = 0; i < raw_columns.n_cols; ++i) {
    out.row(i) = transform(design, raw_columns.col(i)).t();
  }
  return out;
}

std::pair<arma::vec, bool> fit_linear(RegMethod method, const arma::mat& design_matrix,
                                      const arma::vec& targets, double lambda) {
  const arma::uword rows = design_matrix.n_rows;
  const arma::uword cols = design_matrix.n_cols;
  if (targets.n_elem != rows) throw dimension_error("fit_linear: target length mismatch");
  if (rows == 0 || cols == 0) throw std::invalid_argument("fit_linear: empty design matrix");

  switch (method) {
    case RegMethod::ols: {
      if (rows < cols || arma::rank(design_matrix) < cols) {
        return {arma::pinv(design_matrix) * targets, true};
      }
      return {arma::solve(design_matrix, targets), false};
    }
    case RegMethod::ridge: {
      if (lambda < 0.0) throw std::invalid_argument("fit_linear: ridge lambda must be nonnegative");
      arma::mat normal = design_matrix.t() * design_matrix;
      for (arma::uword j = 1; j < cols; ++j) normal(j, j) += lambda;  // intercept unpenalized
      return {arma::solve(normal, design_matrix.t() * targets, arma::solve_opts::likely_sympd), false};
    }
    case RegMethod::pcr: {
      if (cols < 2) throw std::invalid_argument("fit_linear: PCR needs at least one feature column");
      arma::mat cols_only = design_matrix.cols(1, cols - 1);
      Standardized std_cols = standardize_rows(cols_only.t());
      arma::mat z = std_cols.data.t();  // s x l standardized columns
      arma::mat correlation = z.t() * z / static_cast<double>(std::max<arma::uword>(rows, 2) - 1);
      correlation = 0.5 * (correlation + correlation.t());
      arma::vec evals;
      arma::mat evecs;
      if (!arma::eig_sym(evals, evecs, correlation)) {
        throw std::runtime_error("fit_linear: PCR eigendecomposition failed");
      }
      arma::uword kept = 0;
      for (arma::uword i = 0; i < evals.n_elem; ++i) {
        if (evals[i] > 1.0) ++kept;
      }
      if (kept == 0) kept = 1;
      arma::mat components = evecs.cols(evals.n_elem - kept, evals.n_elem - 1);
      arma::mat scores(rows, kept + 1);
      scores.col(0).ones();
      scores.cols(1, kept) = z * components;
      auto [score_weights, flagged] = fit_linear(RegMethod::ols, scores, targets, 0.0);
      arma::vec back = components * score_weights.subvec(1, kept);
      arma::vec weights(cols);
      for (arma::uword j = 0; j < cols - 1; ++j) weights[j + 1] = back[j] / std_cols.scale[j];
      weights[0] =
          score_weights[0] - arma::dot(weights.subvec(1, cols - 1), std_cols.mean);
      return {std::move(weights), flagged};
    }
  }
  throw std::logic_error("fit_linear: unknown method");
}

RegressionModel fit_model(RegMethod method, const FeatureDataset& train, double lambda,
                          double log_base) {
  RegressionModel model;
  model.method = method;
  model.lambda = lambda;
  model.design = select_features(train, log_base);
  arma::mat phi = transform_all(model.design, train.features);
  auto [weights, flagged] = fit_linear(method, phi, train.targets, lambda);
  model.weights = std::move(weights);
  model.used_pseudoinverse = flagged;
  return model;
}

double predict(const RegressionModel& model, const arma::vec& raw) {
  return arma::dot(model.weights, transform(model.design, raw));
}

double evaluate_arrmse(RegMethod method, const FeatureDataset& dataset, arma::uword folds,
                       double lambda, std::uint64_t seed) {
  const arma::uword s = dataset.n_samples();
  if (folds < 2) throw std::invalid_argument("evaluate_arrmse: need at least two folds");
  if (s < folds) throw std::invalid_argument("evaluate_arrmse: more folds than samples");

  std::vector<arma::uword> perm(s);
  std::iota(perm.begin(), perm.end(), arma::uword(0));
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  double total = 0.0;
  arma::uword used = 0;
  for (arma::uword f = 0; f < folds; ++f) {
    std::vector<arma::uword> test_idx, train_idx;
    for (arma::uword j = 0; j < s; ++j) {
      (j % folds == f ? test_idx : train_idx).push_back(perm[j]);
    }
    FeatureDataset train;
    train.n_tx = dataset.n_tx;
    train.n_rx = dataset.n_rx;
    train.n_users = dataset.n_users;
    train.features = dataset.features.cols(arma::uvec(train_idx));
    train.targets = dataset.targets(arma::uvec(train_idx));

    RegressionModel model = fit_model(method, train, lambda);
    arma::vec truth = dataset.targets(arma::uvec(test_idx));
    arma::vec predicted(test_idx.size());
    for (std::size_t j = 0; j < test_idx.size(); ++j) {
      predicted[j] = predict(model, dataset.features.col(test_idx[j]));
    }
    double denom = arma::accu(arma::square(truth - arma::mean(truth)));
    if (denom <= 0.0) continue;  // constant targets in this fold, skip
    total += 100.0 * std::sqrt(arma::accu(arma::square(truth - predicted)) / denom);
    ++used;
  }
  if (used == 0) throw std::runtime_error("evaluate_arrmse: all folds had constant targets");
  return total / static_cast<double>(used);
}

void save_dataset(const FeatureDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error("save_dataset: cannot open " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "# n_tx=" << dataset.n_tx << " n_rx=" << dataset.n_rx << " n_users=" << dataset.n_users
      << '\n';
  for (arma::uword j = 0; j < dataset.n_features(); ++j) out << "feature_" << j << ',';
  out << "target\n";
  for (arma::uword i = 0; i < dataset.n_samples(); ++i) {
    for (arma::uword j = 0; j < dataset.n_features(); ++j) out << dataset.features(j, i) << ',';
    out << dataset.targets[i] << '\n';
  }
  if (!out) throw parse_error("save_dataset: write failed for " + path);
}

FeatureDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("load_dataset: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw parse_error("load_dataset: missing meta line in " + path);
  }
  FeatureDataset ds;
  {
    std::istringstream meta(line.substr(2));
    std::string token;
    while (meta >> token) {
      auto eq = token.find('=');
      if (eq == std::string::npos) throw parse_error("load_dataset: bad meta token " + token);
      std::string key = token.substr(0, eq);
      arma::uword value = std::stoul(token.substr(eq + 1));
      if (key == "n_tx") ds.n_tx = value;
      else if (key == "n_rx") ds.n_rx = value;
      else if (key == "n_users") ds.n_users = value;
      else throw parse_error("load_dataset: unknown meta key " + key);
    }
  }
  if (ds.n_tx == 0 || ds.n_rx == 0 || ds.n_users == 0) {
    throw parse_error("load_dataset: incomplete meta line");
  }
  const arma::uword p = feature_count(ds.n_tx, ds.n_rx, ds.n_users);
  if (!std::getline(in, line)) throw parse_error("load_dataset: missing header");

  std::vector<arma::vec> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    arma::vec row(p + 1);
    std::istringstream ss(line);
    std::string cell;
    for (arma::uword j = 0; j <= p; ++j) {
      if (!std::getline(ss, cell, ',')) throw parse_error("load_dataset: short row");
      row[j] = std::stod(cell);
    }
    if (std::getline(ss, cell, ',')) throw parse_error("load_dataset: long row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("load_dataset: no samples");
  ds.features.set_size(p, rows.size());
  ds.targets.set_size(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.features.col(i) = rows[i].subvec(0, p - 1);
    ds.targets[i] = rows[i][p];
  }
  return ds;
}

void save_model(const RegressionModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error("save_model: cannot open " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "method " << method_name(model.method) << '\n';
  out << "lambda " << model.lambda << '\n';
  out << "log_base " << model.design.log_base << '\n';
  out << "n_components " << model.design.n_components << '\n';
  out << "pseudoinverse " << (model.used_pseudoinverse ? 1 : 0) << '\n';
  auto write_vec = [&out](const std::string& name, const arma::vec& v) {
    out << name;
    for (double x : v) out << ' ' << x;
    out << '\n';
  };
  out << "selected";
  for (arma::uword idx : model.design.selected) out << ' ' << idx;
  out << '\n';
  write_vec("standardize_mean", model.design.standardize_mean);
  write_vec("standardize_scale", model.design.standardize_scale);
  write_vec("weights", model.weights);
  if (!out) throw parse_error("save_model: write failed for " + path);
}

RegressionModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("load_model: cannot open " + path);
  RegressionModel model;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "method") {
      std::string name;
      ss >> name;
      model.method = parse_method(name);
    } else if (key == "lambda") {
      ss >> model.lambda;
    } else if (key == "log_base") {
      ss >> model.design.log_base;
    } else if (key == "n_components") {
      ss >> model.design.n_components;
    } else if (key == "pseudoinverse") {
      int flag = 0;
      ss >> flag;
      model.used_pseudoinverse = flag != 0;
    } else if (key == "selected") {
      std::vector<arma::uword> idx;
      arma::uword v;
      while (ss >> v) idx.push_back(v);
      model.design.selected = arma::uvec(idx);
    } else {
      std::vector<double> values;
      double v;
      while (ss >> v) values.push_back(v);
      arma::vec vec(values);
      if (key == "standardize_mean") model.design.standardize_mean = std::move(vec);
      else if (key == "standardize_scale") model.design.standardize_scale = std::move(vec);
      else if (key == "weights") model.weights = std::move(vec);
      else throw parse_error("load_model: unknown key " + key);
    }
  }
  if (model.weights.n_elem != model.design.selected.n_elem + 1) {
    throw parse_error("load_model: weight length does not match the selection");
  }
  return model;
}

std::string method_name(RegMethod method) {
  switch (method) {
    case RegMethod::ols: return "ols";
    case RegMethod::ridge: return "ridge";
    case RegMethod::pcr: return "pcr";
  }
  return "?";
}

RegMethod parse_method(const std::string& name) {
  if (name == "ols") return RegMethod::ols;
  if (name == "ridge") return RegMethod::ridge;
  if (name == "pcr") return RegMethod::pcr;
  throw parse_error("unknown regression method: " + name);
}

}  // namespace srmax
