#include "srmax/ao_solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srmax/linalg.hpp"

namespace srmax {

namespace {

double base_logdet(const EffectiveChannelSet& eff, const arma::vec& q) {
  double acc = 0.0;
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    acc += logdet_hpd(mac_noise_matrix(eff, q, k));
  }
  return acc;
}

}  // namespace

arma::vec sca_alpha(const EffectiveChannelSet& eff, const arma::vec& q,
                    const std::vector<arma::cx_mat>& uplink_covs) {
  if (uplink_covs.size() != eff.n_users()) {
    throw dimension_error("sca_alpha: one uplink covariance per user required");
  }
  arma::vec alpha(eff.n_tx(), arma::fill::zeros);
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    const arma::cx_mat& basis = eff.bases[k];
    const arma::cx_mat& h = eff.eff_channels[k];
    arma::cx_mat phi = mac_noise_matrix(eff, q, k) + h.t() * uplink_covs[k] * h;
    phi = 0.5 * (phi + phi.t());
    arma::cx_mat chol_lower;
    if (!arma::chol(chol_lower, phi, "lower")) {
      throw std::domain_error("sca_alpha: Phi is singular");
    }
    arma::cx_mat solved = arma::solve(arma::trimatl(chol_lower), basis.t());
    alpha += arma::sum(arma::square(arma::abs(solved)), 0).t();
  }
  return alpha;
}

std::vector<arma::cx_mat> mac_to_bc(const EffectiveChannelSet& eff, const arma::vec& q,
                                    const std::vector<arma::cx_mat>& uplink_covs) {
  if (uplink_covs.size() != eff.n_users()) {
    throw dimension_error("mac_to_bc: one uplink covariance per user required");
  }
  std::vector<arma::cx_mat> downlink(eff.n_users());
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    arma::cx_mat b_inv_sqrt = inv_sqrt_hpd(mac_noise_matrix(eff, q, k));
    arma::cx_mat whitened = b_inv_sqrt * eff.eff_channels[k].t();  // d_k x M
    arma::cx_mat u, v;
    arma::vec sv;
    if (!arma::svd_econ(u, sv, v, whitened)) {
      throw std::runtime_error("mac_to_bc: SVD failed");
    }
    arma::cx_mat rotated = u * (v.t() * uplink_covs[k] * v) * u.t();
    arma::cx_mat cov = b_inv_sqrt * rotated * b_inv_sqrt;
    downlink[k] = 0.5 * (cov + cov.t());
  }
  return downlink;
}

std::pair<BcSolution, SolveReport> solve(const ScenarioConfig& config, const ChannelSet& channels) {
  config.validate();
  if (channels.n_users() != config.n_users || channels.n_rx() != config.n_rx ||
      channels.n_tx() != config.n_tx) {
    throw dimension_error("solve: channel set does not match the scenario dimensions");
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  EffectiveChannelSet eff = effective_channels(channels);
  const arma::vec& limits = config.per_antenna_power;
  const double power = config.total_power;
  const double epsilon = config.tolerance;

  // scaled all-ones start so that limits' q = power holds from iteration zero
  arma::vec q(config.n_tx, arma::fill::value(power / arma::accu(limits)));

  SolveReport report;
  MacState state;
  std::vector<arma::cx_mat> downlink;
  double objective = 0.0;
  double prev_objective = std::numeric_limits<double>::quiet_NaN();
  double tau = std::numeric_limits<double>::infinity();

  for (arma::uword n = 0; n < config.max_outer_iters; ++n) {
    InnerSolution inner = solve_inner(q, eff, power);
    state.q = q;
    state.uplink_covs = inner.uplink_covs;
    objective = inner.value - base_logdet(eff, q);

    report.objective_trace.push_back(objective);
    report.time_trace.push_back(elapsed());
    report.outer_iterations = n + 1;
    if (n >= 1) {
      tau = std::abs(objective - prev_objective);
      report.tau_trace.push_back(tau);
      // the dual residual lands on the recovered solution as a per-antenna
      // overshoot of roughly sqrt(tau) * P / 10, so feasibility of the
      // transformed covariances gates the stop together with tau
      if (tau <= epsilon) {
        downlink = mac_to_bc(eff, q, state.uplink_covs);
        double slack_min = (limits - papc_usage(eff, downlink)).min();
        if (slack_min >= -1e-6 * power) {
          report.converged = true;
          break;
        }
      }
    } else {
      report.tau_trace.push_back(std::numeric_limits<double>::infinity());
    }
    prev_objective = objective;

    QSubproblem sub;
    sub.alpha = sca_alpha(eff, q, state.uplink_covs);
    sub.eff = &eff;
    sub.weights = limits;
    sub.budget = power;
    auto [q_next, gp_report] = gp_solve(sub, q, epsilon);
    q = std::move(q_next);
  }

  BcSolution solution;
  // the cached transform is only current when the loop broke right after it
  solution.downlink_covs = report.converged && !downlink.empty()
                               ? std::move(downlink)
                               : mac_to_bc(eff, state.q, state.uplink_covs);
  solution.full_covs.resize(eff.n_users());
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    arma::cx_mat lifted = eff.bases[k] * solution.downlink_covs[k] * eff.bases[k].t();
    solution.full_covs[k] = 0.5 * (lifted + lifted.t());
  }
  solution.sum_rate = objective;
  solution.papc_slack = limits - papc_usage(eff, solution.downlink_covs);
  solution.mac = std::move(state);

  report.final_tau = tau;
  report.wall_time_s = elapsed();
  return {std::move(solution), std::move(report)};
}

}  // namespace srmax
