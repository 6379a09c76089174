#include "srmax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srmax/linalg.hpp"

namespace srmax {

namespace {

// The reported rate goes through the eigenvalue route so this solver shares
// no factorization path with the solver it cross-checks.
double logdet_via_eig(const arma::cx_mat& a) {
  arma::vec evals = arma::eig_sym(a);
  if (evals.min() <= 0.0) return -std::numeric_limits<double>::infinity();
  return arma::accu(arma::log(evals));
}

double rate_of(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs) {
  double rate = 0.0;
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    const arma::cx_mat& h = eff.eff_channels[k];
    arma::cx_mat inner = arma::cx_mat(h.n_rows, h.n_rows, arma::fill::eye) + h * covs[k] * h.t();
    rate += logdet_via_eig(0.5 * (inner + inner.t()));
  }
  return rate;
}

arma::vec usage_of(const EffectiveChannelSet& eff, const std::vector<arma::cx_mat>& covs) {
  arma::vec usage(eff.n_tx(), arma::fill::zeros);
  for (arma::uword k = 0; k < eff.n_users(); ++k) {
    const arma::cx_mat& basis = eff.bases[k];
    usage += arma::real(arma::sum((basis * covs[k]) % arma::conj(basis), 1));
  }
  return usage;
}

// isometric real coordinates for a family of Hermitian matrices:
// diagonal entries, then sqrt(2) * (Re, Im) of the strict upper triangle,
// so that tr(G S) = pack(G) . pack(S)
struct HermPacker {
  std::vector<arma::uword> dims;
  std::vector<arma::uword> offsets;
  arma::uword total = 0;

  explicit HermPacker(const EffectiveChannelSet& eff) {
    for (arma::uword k = 0; k < eff.n_users(); ++k) {
      dims.push_back(eff.sub_dim(k));
      offsets.push_back(total);
      total += eff.sub_dim(k) * eff.sub_dim(k);
    }
  }

  arma::vec pack(const std::vector<arma::cx_mat>& mats) const {
    static const double root2 = std::sqrt(2.0);
    arma::vec x(total);
    for (std::size_t k = 0; k < dims.size(); ++k) {
      arma::uword pos = offsets[k];
      const arma::uword d = dims[k];
      for (arma::uword i = 0; i < d; ++i) x[pos++] = mats[k](i, i).real();
      for (arma::uword j = 1; j < d; ++j) {
        for (arma::uword i = 0; i < j; ++i) {
          x[pos++] = root2 * mats[k](i, j).real();
          x[pos++] = root2 * mats[k](i, j).imag();
        }
      }
    }
    return x;
  }

  void unpack(const arma::vec& x, std::vector<arma::cx_mat>& mats) const {
    static const double root2 = std::sqrt(2.0);
    mats.resize(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) {
      arma::uword pos = offsets[k];
      const arma::uword d = dims[k];
      mats[k].set_size(d, d);
      for (arma::uword i = 0; i < d; ++i) mats[k](i, i) = x[pos++];
      for (arma::uword j = 1; j < d; ++j) {
        for (arma::uword i = 0; i < j; ++i) {
          double re = x[pos++] / root2;
          double im = x[pos++] / root2;
          mats[k](i, j) = std::complex<double>(re, im);
          mats[k](j, i) = std::complex<double>(re, -im);
        }
      }
    }
  }
};

}  // namespace

OracleResult barrier_primal_solve(const EffectiveChannelSet& eff, const arma::vec& per_antenna_power,
                                  double tol) {
  const arma::uword n_users = eff.n_users();
  const arma::uword n_tx = eff.n_tx();
  if (n_tx > 12) throw std::invalid_argument("barrier_primal_solve: desk-scale solver, n_tx <= 12");
  if (per_antenna_power.n_elem != n_tx || per_antenna_power.min() <= 0.0) {
    throw std::invalid_argument("barrier_primal_solve: bad per-antenna limits");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("barrier_primal_solve: tol must be positive");

  // constraint count behind the m/t suboptimality bound
  double m_total = static_cast<double>(n_tx);
  for (arma::uword k = 0; k < n_users; ++k) m_total += static_cast<double>(eff.sub_dim(k));

  HermPacker packer(eff);
  const arma::vec& limits = per_antenna_power;

  // strictly interior start: scaled identities using half the tightest limit
  std::vector<arma::cx_mat> covs(n_users);
  {
    arma::vec unit_usage(n_tx, arma::fill::zeros);
    for (arma::uword k = 0; k < n_users; ++k) {
      unit_usage += arma::real(arma::sum(eff.bases[k] % arma::conj(eff.bases[k]), 1));
    }
    double scale = 0.5 * limits.min() / unit_usage.max();
    for (arma::uword k = 0; k < n_users; ++k) {
      covs[k] = scale * arma::cx_mat(eff.sub_dim(k), eff.sub_dim(k), arma::fill::eye);
    }
  }

  // fast feasibility + value for the line search; the Cholesky doubles as the
  // positive-definiteness test
  auto chol_logdet = [](const arma::cx_mat& a, bool& ok) {
    arma::cx_mat l;
    ok = arma::chol(l, a, "lower");
    return ok ? 2.0 * arma::accu(arma::log(arma::real(l.diag()))) : 0.0;
  };
  auto barrier_value = [&](const std::vector<arma::cx_mat>& c, double t, bool& ok) {
    ok = false;
    bool sub_ok = false;
    double logs = 0.0;
    for (const auto& s : c) {
      logs += chol_logdet(s, sub_ok);
      if (!sub_ok) return 0.0;
    }
    arma::vec slack = limits - usage_of(eff, c);
    if (slack.min() <= 0.0) return 0.0;
    logs += arma::accu(arma::log(slack));
    double rate = 0.0;
    for (arma::uword k = 0; k < n_users; ++k) {
      const arma::cx_mat& h = eff.eff_channels[k];
      arma::cx_mat inner = arma::cx_mat(h.n_rows, h.n_rows, arma::fill::eye) + h * c[k] * h.t();
      rate += chol_logdet(0.5 * (inner + inner.t()), sub_ok);
      if (!sub_ok) return 0.0;
    }
    ok = true;
    return rate + logs / t;
  };
  auto barrier_gradient = [&](const std::vector<arma::cx_mat>& c, double t) {
    arma::vec slack_inv = 1.0 / (limits - usage_of(eff, c));
    std::vector<arma::cx_mat> grads(n_users);
    for (arma::uword k = 0; k < n_users; ++k) {
      const arma::cx_mat& h = eff.eff_channels[k];
      arma::cx_mat inner = arma::cx_mat(h.n_rows, h.n_rows, arma::fill::eye) + h * c[k] * h.t();
      arma::cx_mat g = h.t() * arma::inv_sympd(0.5 * (inner + inner.t())) * h;
      g += (arma::inv_sympd(c[k]) - weighted_gram(eff.bases[k], slack_inv)) / t;
      grads[k] = 0.5 * (g + g.t());
    }
    return packer.pack(grads);
  };

  OracleResult result;
  double t = 1.0;
  double grad_norm = std::numeric_limits<double>::infinity();
  arma::vec x = packer.pack(covs);
  // BFGS curvature carries over between rounds; each 10x jump in t only
  // rescales the barrier block and the updates absorb it quickly
  arma::mat h_inv(packer.total, packer.total, arma::fill::eye);

  while (true) {
    bool final_round = (m_total / t <= 2.0 * tol);
    double grad_tol = final_round ? 1e-9 : 1e-6;
    bool ok = false;
    double value = barrier_value(covs, t, ok);
    arma::vec grad = barrier_gradient(covs, t);
    grad_norm = arma::norm(grad);

    for (int iter = 0; iter < 600; ++iter) {
      if (grad_norm <= grad_tol * (1.0 + std::abs(value))) break;
      arma::vec dir = h_inv * grad;
      double slope = arma::dot(grad, dir);
      if (slope <= 0.0) {  // curvature estimate went bad, restart from identity
        h_inv.eye();
        dir = grad;
        slope = arma::dot(grad, grad);
      }

      double step = 1.0;
      bool moved = false;
      std::vector<arma::cx_mat> trial(n_users);
      double trial_value = value;
      for (int halvings = 0; halvings < 70; ++halvings) {
        packer.unpack(x + step * dir, trial);
        bool feasible = false;
        trial_value = barrier_value(trial, t, feasible);
        if (feasible && trial_value >= value + 1e-4 * step * slope) {
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;

      arma::vec x_next = x + step * dir;
      arma::vec grad_next = barrier_gradient(trial, t);
      arma::vec s = x_next - x;
      arma::vec y = grad - grad_next;  // descent convention on -value
      double sy = arma::dot(s, y);
      if (sy > 1e-12 * arma::norm(s) * arma::norm(y)) {
        arma::vec hy = h_inv * y;
        h_inv += ((sy + arma::dot(y, hy)) / (sy * sy)) * (s * s.t()) -
                 (hy * s.t() + s * hy.t()) / sy;
      }
      x = std::move(x_next);
      grad = std::move(grad_next);
      covs = trial;
      value = trial_value;
      grad_norm = arma::norm(grad);
    }

    ++result.barrier_rounds;
    result.round_rates.push_back(rate_of(eff, covs));
    result.round_kkt.push_back(m_total / t + grad_norm);
    if (m_total / t <= 0.2 * tol) {
      result.converged = true;
      break;
    }
    if (t >= 1e14) break;  // flagged as not converged
    t *= 10.0;
  }

  result.rate = rate_of(eff, covs);
  result.covs = std::move(covs);
  result.kkt_residual = m_total / t + grad_norm;
  return result;
}

arma::vec brute_force_projection(const arma::vec& point, const arma::vec& weights, double budget) {
  const arma::uword n = point.n_elem;
  if (weights.n_elem != n) throw std::invalid_argument("brute_force_projection: size mismatch");
  if (n == 0 || n > 20) throw std::invalid_argument("brute_force_projection: dimension must be 1..20");
  if (weights.min() <= 0.0 || !(budget > 0.0)) {
    throw std::invalid_argument("brute_force_projection: weights and budget must be positive");
  }

  arma::vec best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << n); ++mask) {
    double wx = 0.0, ww = 0.0;
    for (arma::uword i = 0; i < n; ++i) {
      if (mask & (std::uint64_t(1) << i)) {
        wx += weights[i] * point[i];
        ww += weights[i] * weights[i];
      }
    }
    double gamma = (wx - budget) / ww;
    arma::vec candidate(n, arma::fill::zeros);
    bool ok = true;
    for (arma::uword i = 0; i < n; ++i) {
      if (mask & (std::uint64_t(1) << i)) {
        double v = point[i] - gamma * weights[i];
        if (v < -1e-13) {
          ok = false;
          break;
        }
        candidate[i] = std::max(v, 0.0);
      }
    }
    if (!ok) continue;
    double cost = arma::accu(arma::square(candidate - point));
    if (cost < best_cost) {
      best_cost = cost;
      best = candidate;
    }
  }
  return best;
}

arma::vec fd_gradient(const std::function<double(const arma::vec&)>& f, const arma::vec& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: h must be positive");
  arma::vec grad(x.n_elem);
  arma::vec probe = x;
  for (arma::uword i = 0; i < x.n_elem; ++i) {
    probe[i] = x[i] + h;
    double up = f(probe);
    probe[i] = x[i] - h;
    double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace srmax
