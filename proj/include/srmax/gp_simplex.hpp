#pragma once

#include <armadillo>
#include <utility>
#include <vector>

#include "srmax/szfdpc.hpp"

namespace srmax {

// Linearized dual subproblem: minimize alpha' q - sum_k log|V_k' diag(q) V_k|
// over the weighted simplex { q >= 0, weights' q = budget }.
struct QSubproblem {
  arma::vec alpha;                      // nonnegative linear coefficients
  const EffectiveChannelSet* eff = nullptr;  // supplies the bases V_k (not owned)
  arma::vec weights;                    // strictly positive
  double budget = 0.0;
};

struct GpReport {
  arma::uword iterations = 0;
  double final_tau = 0.0;               // |grad' (q_next - q)| at the last step
  std::vector<double> objective_trace;  // objective at every iterate, q0 included
  bool hit_iteration_cap = false;
};

// Objective value. Coordinates of q below 1e-12 are floored inside the
// log-det evaluation only; a matrix that stays singular raises std::domain_error.
double q_objective(const QSubproblem& prob, const arma::vec& q);

// Gradient alpha_i - sum_k [V_k (V_k' diag(q) V_k)^{-1} V_k']_ii.
arma::vec q_gradient(const QSubproblem& prob, const arma::vec& q);

// Euclidean projection onto { q >= 0, weights' q = budget }: the multiplier of
// the equality constraint is bracketed and bisected, then polished on the
// identified support so the constraint residual is at rounding level.
arma::vec project_weighted_simplex(const arma::vec& point, const arma::vec& weights, double budget);

// Gradient projection with a unit pre-projection step and Armijo backtracking
// on the feasible direction. Stops when |grad' (q_{m+1} - q_m)| <= epsilon.
std::pair<arma::vec, GpReport> gp_solve(const QSubproblem& prob, arma::vec q0, double epsilon,
                                        arma::uword max_iters = 10000);

}  // namespace srmax
