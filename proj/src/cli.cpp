#include "srmax/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "srmax/ao_solver.hpp"
#include "srmax/batch.hpp"
#include "srmax/oracle.hpp"

namespace srmax {

namespace {

constexpr double kNatsToBits = 1.4426950408889634;  // 1 / ln 2

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open output file " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double timed_seconds(const std::function<void()>& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) values.push_back(std::stod(trim(cell)));
  return values;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open config file " + path);

  ScenarioConfig config;
  config.per_antenna_power.reset();
  double snr_dbw = 0.0;
  bool have_snr = false;
  std::string papc_mode = "uniform";
  std::vector<double> papc_values;

  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw parse_error("config: expected key=value, got: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "n_tx") config.n_tx = std::stoul(value);
      else if (key == "n_rx") config.n_rx = std::stoul(value);
      else if (key == "n_users") config.n_users = std::stoul(value);
      else if (key == "snr_dbw") { snr_dbw = std::stod(value); have_snr = true; }
      else if (key == "papc_mode") papc_mode = value;
      else if (key == "papc_values") papc_values = parse_double_list(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "tolerance") config.tolerance = std::stod(value);
      else if (key == "max_outer_iters") config.max_outer_iters = std::stoul(value);
      else throw parse_error("config: unknown key " + key);
    } catch (const std::invalid_argument&) {
      throw parse_error("config: bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
      throw parse_error("config: value out of range for " + key + ": " + value);
    }
  }

  if (papc_mode == "explicit") {
    if (papc_values.empty()) throw parse_error("config: explicit mode needs papc_values");
    if (have_snr) throw parse_error("config: explicit papc_values fix the power, drop snr_dbw");
    config.per_antenna_power = arma::vec(papc_values);
    config.total_power = arma::accu(config.per_antenna_power);
  } else {
    config.total_power = snr_to_power(snr_dbw);
    if (papc_mode == "uniform") {
      config.per_antenna_power = arma::vec(
          config.n_tx, arma::fill::value(config.total_power / static_cast<double>(config.n_tx)));
    } else if (papc_mode == "random") {
      std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
      config.per_antenna_power = dirichlet_power_split(config.n_tx, config.total_power, rng);
    } else {
      throw parse_error("config: papc_mode must be uniform, random or explicit");
    }
  }
  config.validate();
  return config;
}

int cmd_solve(const SolveOptions& options) {
  ScenarioConfig config = load_config(options.config_path);
  ChannelSet channels = options.channel_path.empty() ? generate_channels(config)
                                                     : load_channels(options.channel_path);
  auto [solution, report] = solve(config, channels);

  EffectiveChannelSet eff = effective_channels(channels);
  arma::vec user_rates = bc_user_rates(eff, solution.downlink_covs);
  arma::vec usage = papc_usage(eff, solution.downlink_covs);
  double residual = zero_interference_residual(channels, solution.full_covs);

  bool invariants_ok = residual <= 1e-8 &&
                       solution.papc_slack.min() >= -1e-6 * config.total_power;

  std::cout << std::setprecision(10);
  std::cout << "sum rate: " << solution.sum_rate << " nats (" << solution.sum_rate * kNatsToBits
            << " bits), " << report.outer_iterations << " outer iterations, tau "
            << report.final_tau << (report.converged ? "" : " [not converged]") << "\n";
  if (options.verbose) {
    for (std::size_t i = 0; i < report.objective_trace.size(); ++i) {
      std::cout << "iter " << i << " objective " << report.objective_trace[i] << " tau "
                << report.tau_trace[i] << " time " << report.time_trace[i] << "s\n";
    }
  }

  if (!options.out_path.empty()) {
    std::ofstream out = open_csv(options.out_path);
    out << "record,index,value\n";
    out << "sum_rate_nats,0," << solution.sum_rate << '\n';
    out << "sum_rate_bits,0," << solution.sum_rate * kNatsToBits << '\n';
    for (arma::uword k = 0; k < user_rates.n_elem; ++k) {
      out << "user_rate_nats," << k + 1 << ',' << user_rates[k] << '\n';
      out << "user_rate_bits," << k + 1 << ',' << user_rates[k] * kNatsToBits << '\n';
    }
    for (arma::uword i = 0; i < usage.n_elem; ++i) {
      out << "papc_limit," << i + 1 << ',' << config.per_antenna_power[i] << '\n';
      out << "papc_usage," << i + 1 << ',' << usage[i] << '\n';
      out << "papc_slack," << i + 1 << ',' << solution.papc_slack[i] << '\n';
    }
    out << "zero_interference_residual,0," << residual << '\n';
    out << "outer_iterations,0," << report.outer_iterations << '\n';
    out << "final_tau,0," << report.final_tau << '\n';
    out << "wall_time_s,0," << report.wall_time_s << '\n';
    out << "converged,0," << (report.converged ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < report.objective_trace.size(); ++i) {
      out << "trace_objective," << i << ',' << report.objective_trace[i] << '\n';
      out << "trace_tau," << i << ',' << report.tau_trace[i] << '\n';
      out << "trace_time_s," << i << ',' << report.time_trace[i] << '\n';
    }
  }
  return (report.converged && invariants_ok) ? 0 : 3;
}

int cmd_montecarlo(const MonteCarloOptions& options) {
  if (options.trials == 0) throw std::invalid_argument("montecarlo: trials must be at least 1");
  for (arma::uword k : options.k_list) {
    make_uniform_config(options.n_tx, options.n_rx, k, options.snr_dbw).validate();
  }

  std::ofstream out = open_csv(options.out_path.empty() ? "montecarlo.csv" : options.out_path);
  out << "k_users,trials,mean_sum_rate_nats,std_sum_rate_nats,mean_sum_rate_bits,unconverged\n";

  bool all_converged = true;
  for (std::size_t ki = 0; ki < options.k_list.size(); ++ki) {
    arma::uword k = options.k_list[ki];
    std::uint64_t block = options.seed + static_cast<std::uint64_t>(ki) * options.trials;
    auto results = run_indexed<std::pair<double, int>>(
        options.trials,
        [&](std::size_t t) {
          ScenarioConfig config = make_uniform_config(options.n_tx, options.n_rx, k,
                                                      options.snr_dbw, block + t);
          auto [solution, report] = solve(config, generate_channels(config));
          return std::make_pair(solution.sum_rate, report.converged ? 0 : 1);
        },
        options.parallel);

    arma::vec rates(options.trials);
    arma::uword unconverged = 0;
    for (std::size_t t = 0; t < results.size(); ++t) {
      rates[t] = results[t].first;
      unconverged += results[t].second;
    }
    if (unconverged > 0) all_converged = false;
    double mean = arma::mean(rates);
    double sd = options.trials > 1 ? arma::stddev(rates) : 0.0;
    out << k << ',' << options.trials << ',' << mean << ',' << sd << ',' << mean * kNatsToBits
        << ',' << unconverged << '\n';
    std::cout << "K=" << k << ": mean " << mean << " nats over " << options.trials << " trials\n";
  }
  return all_converged ? 0 : 3;
}

int cmd_benchmark(const BenchmarkOptions& options) {
  if (options.trials == 0) throw std::invalid_argument("benchmark: trials must be at least 1");
  constexpr arma::uword kOracleCap = 12;

  std::ofstream out = open_csv(options.out_path.empty() ? "benchmark.csv" : options.out_path);
  out << "n_tx,trials,ao_runtime_s,oracle_runtime_s\n";

  for (std::size_t ni = 0; ni < options.n_list.size(); ++ni) {
    arma::uword n = options.n_list[ni];
    std::vector<double> ao_times, oracle_times;
    for (arma::uword t = 0; t < options.trials; ++t) {
      ScenarioConfig config =
          make_uniform_config(n, options.n_rx, options.n_users, options.snr_dbw,
                              options.seed + ni * options.trials + t);
      ChannelSet channels = generate_channels(config);
      ao_times.push_back(timed_seconds([&] { solve(config, channels); }));
      if (n <= kOracleCap) {
        EffectiveChannelSet eff = effective_channels(channels);
        oracle_times.push_back(
            timed_seconds([&] { barrier_primal_solve(eff, config.per_antenna_power, 1e-4); }));
      }
    }
    double ao_med = median(ao_times);
    out << n << ',' << options.trials << ',' << ao_med << ',';
    if (!oracle_times.empty()) {
      out << median(oracle_times);
    } else {
      out << "nan";
    }
    out << '\n';
    std::cout << "N=" << n << ": ao " << ao_med << "s"
              << (oracle_times.empty() ? " (oracle skipped)" : "") << "\n";
  }
  return 0;
}

int cmd_dataset(const DatasetOptions& options) {
  auto [configs, channels] =
      make_experiment_samples(options.n_tx, options.n_rx, options.n_users, options.samples,
                              options.seed, options.snr_dbw_set);
  FeatureDataset dataset = build_dataset(configs, channels, options.parallel);
  save_dataset(dataset, options.out_path.empty() ? "dataset.csv" : options.out_path);
  std::cout << "wrote " << dataset.n_samples() << " samples with " << dataset.n_features()
            << " features\n";
  return 0;
}

int cmd_train(const TrainOptions& options) {
  FeatureDataset dataset = load_dataset(options.data_path);
  RegressionModel model = fit_model(options.method, dataset, options.lambda);
  save_model(model, options.out_path.empty() ? "model.txt" : options.out_path);
  std::cout << "trained " << method_name(options.method) << " on " << dataset.n_samples()
            << " samples, " << model.design.selected.n_elem << " selected features\n";
  return 0;
}

int cmd_eval(const EvalOptions& options) {
  FeatureDataset dataset = load_dataset(options.data_path);
  const arma::uword s = dataset.n_samples();
  arma::uword train_count = options.train_count > 0
                                ? options.train_count
                                : static_cast<arma::uword>(std::lround(0.9 * s));
  if (train_count < 2 || train_count >= s) {
    throw std::invalid_argument("eval: holdout training size must be in [2, samples)");
  }

  std::vector<arma::uword> perm(s);
  std::iota(perm.begin(), perm.end(), arma::uword(0));
  std::mt19937_64 rng(options.seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  arma::uvec train_idx(std::vector<arma::uword>(perm.begin(), perm.begin() + train_count));
  arma::uvec test_idx(std::vector<arma::uword>(perm.begin() + train_count, perm.end()));

  FeatureDataset train;
  train.n_tx = dataset.n_tx;
  train.n_rx = dataset.n_rx;
  train.n_users = dataset.n_users;
  train.features = dataset.features.cols(train_idx);
  train.targets = dataset.targets(train_idx);
  arma::mat test_features = dataset.features.cols(test_idx);
  arma::vec test_targets = dataset.targets(test_idx);

  std::ofstream out = open_csv(options.out_path.empty() ? "eval.csv" : options.out_path);
  out << "record,method,index,value,value2\n";

  auto rmse = [](const arma::vec& truth, const arma::vec& predicted) {
    return std::sqrt(arma::mean(arma::square(truth - predicted)));
  };

  for (RegMethod method : options.methods) {
    double arrmse = evaluate_arrmse(method, dataset, options.folds, options.lambda, options.seed);
    out << "arrmse_percent," << method_name(method) << ",0," << arrmse << ",\n";
    std::cout << method_name(method) << ": aRRMSE " << std::setprecision(4) << arrmse << "%\n";

    RegressionModel model = fit_model(method, train, options.lambda);
    arma::vec predicted(test_idx.n_elem);
    for (arma::uword j = 0; j < test_idx.n_elem; ++j) {
      predicted[j] = predict(model, test_features.col(j));
    }
    out << "test_rmse_fd," << method_name(method) << ",0," << rmse(test_targets, predicted)
        << ",\n";
    for (arma::uword j = 0; j < test_idx.n_elem; ++j) {
      out << "pred_fd," << method_name(method) << ',' << j << ',' << test_targets[j] << ','
          << predicted[j] << '\n';
    }
  }

  // untransformed baseline: plain least squares on the raw feature columns
  {
    arma::mat raw_train(train.n_samples(), dataset.n_features() + 1);
    raw_train.col(0).ones();
    raw_train.cols(1, dataset.n_features()) = train.features.t();
    auto [weights, flagged] = fit_linear(RegMethod::ols, raw_train, train.targets, 0.0);
    (void)flagged;
    arma::mat raw_test(test_idx.n_elem, dataset.n_features() + 1);
    raw_test.col(0).ones();
    raw_test.cols(1, dataset.n_features()) = test_features.t();
    arma::vec predicted = raw_test * weights;
    out << "test_rmse_raw,ols,0," << rmse(test_targets, predicted) << ",\n";
    for (arma::uword j = 0; j < test_idx.n_elem; ++j) {
      out << "pred_raw,ols," << j << ',' << test_targets[j] << ',' << predicted[j] << '\n';
    }
  }
  return 0;
}

}  // namespace srmax
