#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "srmax/ao_solver.hpp"
#include "srmax/linalg.hpp"
#include "srmax/scenario.hpp"

using namespace srmax;

namespace {

// dual objective evaluated from scratch: sum_k log(|A_k + H_k' S_k H_k| / |A_k|)
double dual_objective(const EffectiveChannelSet& eff, const arma::vec& q,
                      const std::vector<arma::cx_mat>& uplink_covs) {
  double value = 0.0;
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    const arma::cx_mat& h = eff.eff_channels[k];
    arma::cx_mat a = mac_noise_matrix(eff, q, k);
    value += logdet_eig(a + h.t() * uplink_covs[k] * h) - logdet_eig(a);
  }
  return value;
}

arma::vec random_feasible_q(const arma::vec& weights, double budget, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  arma::vec q(weights.n_elem);
  for (auto& v : q) v = unif(rng);
  return q * (budget / arma::dot(weights, q));
}

}  // namespace

TEST_CASE("surrogate coefficients for the identity case") {
  ChannelSet channels;
  channels.channels.push_back(arma::cx_mat(1, 3, arma::fill::zeros));
  channels.channels[0](0, 0) = 1.0;  // any nonzero row; covariance below is zero anyway
  EffectiveChannelSet eff = effective_channels(channels);
  arma::vec q(3, arma::fill::ones);
  std::vector<arma::cx_mat> covs{arma::cx_mat(1, 1, arma::fill::zeros)};
  arma::vec alpha = sca_alpha(eff, q, covs);
  CHECK(arma::abs(alpha - arma::vec(3, arma::fill::ones)).max() < 1e-12);
}

TEST_CASE("surrogate is tight at the expansion point and an upper bound elsewhere") {
  for (std::uint64_t seed : {1, 2, 3}) {
    ScenarioConfig config = make_uniform_config(6, 2, 2, 0.0, 100 + seed);
    EffectiveChannelSet eff = effective_channels(generate_channels(config));
    std::mt19937_64 rng(seed);
    arma::vec q = random_feasible_q(config.per_antenna_power, config.total_power, rng);
    InnerSolution inner = solve_inner(q, eff, config.total_power);
    arma::vec alpha = sca_alpha(eff, q, inner.uplink_covs);

    // value and surrogate of sum_k log|A_k(q') + H_k' S_k H_k| as q' varies
    auto truth = [&](const arma::vec& qq) {
      double v = 0.0;
      for (arma::uword k = 0; k < eff.n_users(); ++k) {
        const arma::cx_mat& h = eff.eff_channels[k];
        v += logdet_eig(weighted_gram(eff.bases[k], qq) + h.t() * inner.uplink_covs[k] * h);
      }
      return v;
    };
    double at_expansion = truth(q);
    auto surrogate = [&](const arma::vec& qq) { return at_expansion + arma::dot(alpha, qq - q); };

    // tightness: the solver-side sum_k log|Phi_k| equals the independent route
    CHECK(inner.value == doctest::Approx(at_expansion).epsilon(1e-12));
    for (int rep = 0; rep < 100; ++rep) {
      arma::vec sample = random_feasible_q(config.per_antenna_power, config.total_power, rng);
      CHECK(truth(sample) <= surrogate(sample) + 1e-9);
    }
  }
}

TEST_CASE("scalar system reaches log(1 + |h|^2 P) exactly") {
  ScenarioConfig config = make_uniform_config(1, 1, 1, 3.0, 77);
  ChannelSet channels = generate_channels(config);
  auto [solution, report] = solve(config, channels);
  double h2 = std::norm(channels.channels[0](0, 0));
  CHECK(report.converged);
  CHECK(solution.sum_rate ==
        doctest::Approx(std::log(1.0 + h2 * config.total_power)).epsilon(1e-10));
  CHECK(bc_sum_rate(effective_channels(channels), solution.downlink_covs) ==
        doctest::Approx(solution.sum_rate).epsilon(1e-8));
}

TEST_CASE("dead antenna caps the rate at log(1.5)") {
  ScenarioConfig config = make_uniform_config(2, 1, 1, 0.0, 1);
  config.max_outer_iters = 20000;
  ChannelSet channels;
  channels.channels.push_back(
      arma::cx_mat{{std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 0.0)}});
  auto [solution, report] = solve(config, channels);
  CHECK(solution.sum_rate == doctest::Approx(std::log(1.5)).epsilon(1e-3));
}

TEST_CASE("transform leaves zero covariances at zero") {
  ScenarioConfig config = make_uniform_config(4, 2, 2, 0.0, 8);
  EffectiveChannelSet eff = effective_channels(generate_channels(config));
  // uplink covariances are M x M regardless of the user subspace size
  std::vector<arma::cx_mat> zeros{arma::cx_mat(2, 2, arma::fill::zeros),
                                  arma::cx_mat(2, 2, arma::fill::zeros)};
  arma::vec q(4, arma::fill::ones);
  std::vector<arma::cx_mat> downlink = mac_to_bc(eff, q, zeros);
  for (const auto& cov : downlink) CHECK(arma::abs(cov).max() < 1e-14);
}

TEST_CASE("scalar transform divides by the dual weight") {
  ChannelSet channels;
  arma::cx_mat h_scalar(1, 1);
  h_scalar(0, 0) = std::complex<double>(0.6, -0.8);
  channels.channels.push_back(h_scalar);
  EffectiveChannelSet eff = effective_channels(channels);
  arma::vec q{2.0};
  arma::cx_mat s_scalar(1, 1);
  s_scalar(0, 0) = 3.0;
  std::vector<arma::cx_mat> uplink{s_scalar};
  std::vector<arma::cx_mat> downlink = mac_to_bc(eff, q, uplink);
  CHECK(downlink[0](0, 0).real() == doctest::Approx(1.5).epsilon(1e-12));  // S / q
}

TEST_CASE("transform preserves every per-user rate") {
  for (std::uint64_t seed : {11, 12, 13}) {
    ScenarioConfig config = make_uniform_config(6, 2, 2, 0.0, seed);
    EffectiveChannelSet eff = effective_channels(generate_channels(config));
    std::mt19937_64 rng(seed);
    arma::vec q = random_feasible_q(config.per_antenna_power, config.total_power, rng);
    InnerSolution inner = solve_inner(q, eff, config.total_power);
    std::vector<arma::cx_mat> downlink = mac_to_bc(eff, q, inner.uplink_covs);
    arma::vec bc_rates = bc_user_rates(eff, downlink);
    for (arma::uword k = 0; k < eff.n_users(); ++k) {
      const arma::cx_mat& h = eff.eff_channels[k];
      arma::cx_mat a = mac_noise_matrix(eff, q, k);
      double mac_term = logdet_eig(a + h.t() * inner.uplink_covs[k] * h) - logdet_eig(a);
      CHECK(bc_rates[k] == doctest::Approx(mac_term).epsilon(1e-8));
    }
  }
}

TEST_CASE("full solve is self-consistent at termination") {
  for (std::uint64_t seed : {21, 22}) {
    ScenarioConfig config = make_uniform_config(8, 2, 3, 0.0, seed);
    ChannelSet channels = generate_channels(config);
    auto [solution, report] = solve(config, channels);
    EffectiveChannelSet eff = effective_channels(channels);

    CHECK(report.converged);
    CHECK(report.final_tau <= config.tolerance);
    CHECK(bc_sum_rate(eff, solution.downlink_covs) ==
          doctest::Approx(solution.sum_rate).epsilon(1e-4));
    CHECK(solution.papc_slack.min() >= -1e-6 * config.total_power);
    CHECK(zero_interference_residual(channels, solution.full_covs) <= 1e-8);

    // trace converged: consecutive entries differ at most by the tolerance at the end
    const auto& trace = report.objective_trace;
    REQUIRE(trace.size() >= 2);
    CHECK(std::abs(trace.back() - trace[trace.size() - 2]) <= config.tolerance);
  }
}

TEST_CASE("solution dominates random feasible covariance sets") {
  ScenarioConfig config = make_uniform_config(6, 2, 2, 0.0, 55);
  ChannelSet channels = generate_channels(config);
  auto [solution, report] = solve(config, channels);
  EffectiveChannelSet eff = effective_channels(channels);

  arma::arma_rng::set_seed(55);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<arma::cx_mat> covs;
    for (arma::uword k = 0; k < eff.n_users(); ++k) {
      arma::cx_mat g(eff.sub_dim(k), eff.sub_dim(k), arma::fill::randn);
      covs.push_back(g * g.t());
    }
    arma::vec usage = papc_usage(eff, covs);
    double scale = arma::min(config.per_antenna_power / usage) * 0.999;
    for (auto& cov : covs) cov *= scale;
    CHECK(bc_sum_rate(eff, covs) <= solution.sum_rate + 1e-6);
  }
}

TEST_CASE("reported dual objective matches an independent evaluation") {
  ScenarioConfig config = make_uniform_config(6, 2, 2, 0.0, 91);
  ChannelSet channels = generate_channels(config);
  auto [solution, report] = solve(config, channels);
  EffectiveChannelSet eff = effective_channels(channels);

  CHECK(dual_objective(eff, solution.mac.q, solution.mac.uplink_covs) ==
        doctest::Approx(solution.sum_rate).epsilon(1e-10));
  CHECK(report.objective_trace.back() == doctest::Approx(solution.sum_rate).epsilon(1e-12));

  // dual variables respect both equality constraints
  CHECK(std::abs(arma::dot(config.per_antenna_power, solution.mac.q) - config.total_power) <=
        1e-8 * config.total_power);
  double trace_sum = 0.0;
  for (const auto& cov : solution.mac.uplink_covs) trace_sum += arma::trace(cov).real();
  CHECK(std::abs(trace_sum - config.total_power) <= 1e-8 * config.total_power);
}
