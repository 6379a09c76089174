#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "srmax/linalg.hpp"
#include "srmax/scenario.hpp"
#include "srmax/waterfill.hpp"

using namespace srmax;

namespace {

EffectiveChannelSet random_eff(arma::uword n, arma::uword m, arma::uword k, std::uint64_t seed) {
  return effective_channels(generate_channels(make_uniform_config(n, m, k, 0.0, seed)));
}

double inner_objective(const arma::vec& q, const EffectiveChannelSet& eff,
                       const std::vector<arma::cx_mat>& covs) {
  double value = 0.0;
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    const arma::cx_mat& h = eff.eff_channels[k];
    value += logdet_eig(mac_noise_matrix(eff, q, k) + h.t() * covs[k] * h);
  }
  return value;
}

}  // namespace

TEST_CASE("water level hand cases") {
  CHECK(water_level(arma::vec{1.0, 4.0}, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(water_level(arma::vec{1.0, 1.0, 1.0}, 3.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(water_level(arma::vec{1.0}, 0.0) <= 1.0);
}

TEST_CASE("water level input validation") {
  CHECK_THROWS_AS(water_level(arma::vec{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(water_level(arma::vec{-1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(water_level(arma::vec{1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("water level balances the budget on random inputs") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(0.05, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    arma::uword n = 1 + rng() % 12;
    arma::vec inv_gains(n);
    for (auto& v : inv_gains) v = unif(rng);
    double budget = unif(rng);
    double mu = water_level(inv_gains, budget);
    double allocated = arma::accu(arma::clamp(mu - inv_gains, 0.0, arma::datum::inf));
    CHECK(std::abs(allocated - budget) <= 1e-10);
  }
}

TEST_CASE("zero power returns zero covariances and the base log-det") {
  EffectiveChannelSet eff = random_eff(6, 2, 2, 3);
  arma::vec q(6, arma::fill::ones);
  InnerSolution sol = solve_inner(q, eff, 0.0);
  double base = 0.0;
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    CHECK(arma::abs(sol.uplink_covs[k]).max() == 0.0);
    base += logdet_eig(mac_noise_matrix(eff, q, k));
  }
  CHECK(sol.value == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("hand water-filling: gains (1, 0.25), unit power") {
  // identity noise, channel H' with singular values (1, 0.5)
  ChannelSet channels;
  arma::cx_mat h(2, 2, arma::fill::zeros);
  h(0, 0) = 1.0;
  h(1, 1) = 0.5;
  channels.channels.push_back(h);
  EffectiveChannelSet eff = effective_channels(channels);
  arma::vec q(2, arma::fill::ones);
  InnerSolution sol = solve_inner(q, eff, 1.0);
  // mu = 2: the strong mode takes all the power
  CHECK(sol.value == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(arma::trace(sol.uplink_covs[0]).real() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("single-mode case puts the whole budget on the mode") {
  ChannelSet channels;
  arma::cx_mat h_scalar(1, 1);
  h_scalar(0, 0) = 1.0;
  channels.channels.push_back(h_scalar);
  EffectiveChannelSet eff = effective_channels(channels);
  InnerSolution sol = solve_inner(arma::vec{1.0}, eff, 3.0);
  CHECK(sol.value == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("solve_inner satisfies the water-filling KKT conditions") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    EffectiveChannelSet eff = random_eff(8, 2, 2, seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.2, 2.0);
    arma::vec q(8);
    for (auto& v : q) v = unif(rng);
    double power = 2.0;
    InnerSolution sol = solve_inner(q, eff, power);

    // recover per-mode inverse gains and allocations from the solution
    double budget = 0.0;
    double mu_active_min = arma::datum::inf, mu_active_max = -arma::datum::inf;
    double idle_floor = arma::datum::inf;
    for (arma::uword k = 0; k < eff.n_users(); ++k) {
      budget += arma::trace(sol.uplink_covs[k]).real();
      arma::cx_mat a = mac_noise_matrix(eff, q, k);
      arma::cx_mat l = arma::chol(a, "lower");
      arma::cx_mat f = arma::solve(arma::trimatl(l), eff.eff_channels[k].t());
      arma::cx_mat u, v;
      arma::vec sv;
      arma::svd_econ(u, sv, v, f);
      arma::cx_mat rotated = v.t() * sol.uplink_covs[k] * v;
      arma::vec rho = arma::real(rotated.diag());
      for (arma::uword i = 0; i < sv.n_elem; ++i) {
        double inv_gain = 1.0 / (sv[i] * sv[i]);
        if (rho[i] > 1e-9) {
          double level = rho[i] + inv_gain;
          mu_active_min = std::min(mu_active_min, level);
          mu_active_max = std::max(mu_active_max, level);
        } else {
          idle_floor = std::min(idle_floor, inv_gain);
        }
      }
    }
    CHECK(std::abs(budget - power) <= 1e-8 * power);
    CHECK(mu_active_max - mu_active_min <= 1e-8);            // common water level
    CHECK(idle_floor >= mu_active_max - 1e-8);               // idle modes sit above it
  }
}

TEST_CASE("solve_inner beats random feasible allocations") {
  EffectiveChannelSet eff = random_eff(6, 2, 2, 11);
  arma::vec q(6, arma::fill::value(0.7));
  double power = 1.5;
  InnerSolution sol = solve_inner(q, eff, power);
  double optimal = inner_objective(q, eff, sol.uplink_covs);
  CHECK(sol.value == doctest::Approx(optimal).epsilon(1e-9));

  arma::arma_rng::set_seed(99);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<arma::cx_mat> covs;
    double trace_sum = 0.0;
    for (arma::uword k = 0; k < eff.n_users(); ++k) {
      arma::cx_mat g(eff.n_rx(), eff.n_rx(), arma::fill::randn);
      arma::cx_mat s = g * g.t();
      trace_sum += arma::trace(s).real();
      covs.push_back(std::move(s));
    }
    for (auto& s : covs) s *= power / trace_sum;
    CHECK(inner_objective(q, eff, covs) <= sol.value + 1e-9);
  }
}

TEST_CASE("degenerate all-zero channels are rejected when power is positive") {
  ChannelSet channels;
  channels.channels.push_back(arma::cx_mat(2, 4, arma::fill::zeros));
  EffectiveChannelSet eff = effective_channels(channels);
  arma::vec q(4, arma::fill::ones);
  CHECK_THROWS_AS(solve_inner(q, eff, 1.0), degenerate_channel_error);
  CHECK_NOTHROW(solve_inner(q, eff, 0.0));
}
