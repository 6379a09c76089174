#include "srmax/gp_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srmax/linalg.hpp"

namespace srmax {

namespace {

constexpr double kQFloor = 1e-12;

void check_problem(const QSubproblem& prob) {
  if (prob.eff == nullptr) throw std::invalid_argument("q subproblem: missing channel bases");
  arma::uword n = prob.eff->n_tx();
  if (prob.alpha.n_elem != n || prob.weights.n_elem != n) {
    throw dimension_error("q subproblem: alpha and weights must have n_tx entries");
  }
  if (prob.weights.min() <= 0.0) {
    throw std::invalid_argument("q subproblem: weights must be strictly positive");
  }
  if (!(prob.budget > 0.0)) {
    throw std::invalid_argument("q subproblem: budget must be positive");
  }
}

arma::vec floored(const arma::vec& q) {
  return arma::clamp(q, kQFloor, std::numeric_limits<double>::infinity());
}

arma::cx_mat chol_of_gram(const arma::cx_mat& basis, const arma::vec& qf) {
  arma::cx_mat gram = weighted_gram(basis, qf);
  arma::cx_mat chol_lower;
  if (!arma::chol(chol_lower, gram, "lower")) {
    gram.diag() += 1e-14 * arma::trace(gram).real() / static_cast<double>(gram.n_rows);
    if (!arma::chol(chol_lower, gram, "lower")) {
      throw std::domain_error("q subproblem: V' diag(q) V is singular after flooring");
    }
  }
  return chol_lower;
}

}  // namespace

double q_objective(const QSubproblem& prob, const arma::vec& q) {
  check_problem(prob);
  if (q.n_elem != prob.alpha.n_elem) throw dimension_error("q_objective: size mismatch");
  arma::vec qf = floored(q);
  double value = arma::dot(prob.alpha, q);
  for (arma::uword k = 0; k < prob.eff->n_users(); ++k) {
    arma::cx_mat chol_lower = chol_of_gram(prob.eff->bases[k], qf);
    value -= 2.0 * arma::accu(arma::log(arma::real(chol_lower.diag())));
  }
  return value;
}

arma::vec q_gradient(const QSubproblem& prob, const arma::vec& q) {
  check_problem(prob);
  if (q.n_elem != prob.alpha.n_elem) throw dimension_error("q_gradient: size mismatch");
  arma::vec qf = floored(q);
  arma::vec grad = prob.alpha;
  for (arma::uword k = 0; k < prob.eff->n_users(); ++k) {
    const arma::cx_mat& basis = prob.eff->bases[k];
    arma::cx_mat chol_lower = chol_of_gram(basis, qf);
    // [V A^{-1} V']_ii = || L^{-1} (row i of V)' ||^2
    arma::cx_mat solved = arma::solve(arma::trimatl(chol_lower), basis.t());
    grad -= arma::sum(arma::square(arma::abs(solved)), 0).t();
  }
  return grad;
}

arma::vec project_weighted_simplex(const arma::vec& point, const arma::vec& weights, double budget) {
  const arma::uword n = point.n_elem;
  if (weights.n_elem != n) throw dimension_error("projection: size mismatch");
  if (n == 0 || weights.min() <= 0.0) {
    throw std::invalid_argument("projection: weights must be strictly positive");
  }
  if (!(budget > 0.0)) throw std::invalid_argument("projection: budget must be positive");

  auto residual = [&](double gamma) {
    double acc = 0.0;
    for (arma::uword i = 0; i < n; ++i) {
      double v = point[i] - gamma * weights[i];
      if (v > 0.0) acc += weights[i] * v;
    }
    return acc - budget;
  };

  // residual is continuous and nonincreasing in gamma; bracket the root
  double hi = (point / weights).max();  // all coordinates clipped: residual = -budget
  double lo = hi - 1.0;
  double step = 1.0 + std::abs(hi);
  while (residual(lo) < 0.0) {
    lo -= step;
    step *= 2.0;
    if (!std::isfinite(lo)) throw std::runtime_error("projection: bracketing failed");
  }

  double gamma = lo;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    gamma = 0.5 * (lo + hi);
    double r = residual(gamma);
    if (std::abs(r) <= 1e-10 * budget) break;
    if (r > 0.0) {
      lo = gamma;
    } else {
      hi = gamma;
    }
  }

  // closed-form polish on the support found by bisection
  double wx = 0.0, ww = 0.0;
  for (arma::uword i = 0; i < n; ++i) {
    if (point[i] - gamma * weights[i] > 0.0) {
      wx += weights[i] * point[i];
      ww += weights[i] * weights[i];
    }
  }
  if (ww > 0.0) {
    double polished = (wx - budget) / ww;
    if (std::abs(residual(polished)) <= std::abs(residual(gamma))) gamma = polished;
  }

  arma::vec result(n);
  for (arma::uword i = 0; i < n; ++i) {
    result[i] = std::max(point[i] - gamma * weights[i], 0.0);
  }
  return result;
}

std::pair<arma::vec, GpReport> gp_solve(const QSubproblem& prob, arma::vec q0, double epsilon,
                                        arma::uword max_iters) {
  check_problem(prob);
  if (!(epsilon > 0.0)) throw std::invalid_argument("gp_solve: epsilon must be positive");
  if (q0.n_elem != prob.alpha.n_elem) throw dimension_error("gp_solve: size mismatch");
  if (q0.min() < -1e-12 ||
      std::abs(arma::dot(prob.weights, q0) - prob.budget) > 1e-6 * prob.budget) {
    throw std::invalid_argument("gp_solve: q0 must lie on the weighted simplex");
  }
  q0.transform([](double v) { return std::max(v, 0.0); });

  GpReport report;
  arma::vec q = std::move(q0);
  double value = q_objective(prob, q);
  report.objective_trace.push_back(value);
  double tau = std::numeric_limits<double>::infinity();

  arma::uword m = 0;
  for (; m < max_iters; ++m) {
    arma::vec grad = q_gradient(prob, q);
    arma::vec target = project_weighted_simplex(q - grad, prob.weights, prob.budget);
    arma::vec dir = target - q;
    double slope = arma::dot(grad, dir);
    if (slope >= 0.0) {  // stationary within precision
      tau = 0.0;
      break;
    }

    double beta = 1.0;
    bool accepted = false;
    double trial_value = value;
    arma::vec trial;
    for (int halvings = 0; halvings < 60; ++halvings) {
      trial = q + beta * dir;
      trial_value = q_objective(prob, trial);
      if (trial_value <= value + 1e-4 * beta * slope) {
        accepted = true;
        break;
      }
      beta *= 0.5;
    }
    if (!accepted) {  // no usable decrease left at this precision
      tau = 0.0;
      break;
    }

    q = std::move(trial);
    value = trial_value;
    report.objective_trace.push_back(value);
    tau = beta * std::abs(slope);
    if (tau <= epsilon) {
      ++m;
      break;
    }
  }

  report.iterations = m;
  report.final_tau = tau;
  report.hit_iteration_cap = (m == max_iters && tau > epsilon);
  return {std::move(q), std::move(report)};
}

}  // namespace srmax
