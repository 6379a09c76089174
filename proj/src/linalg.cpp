#include "srmax/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace srmax {

double logdet_hpd(arma::cx_mat A) {
  arma::cx_mat L;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (arma::chol(L, A, "lower")) {
      return 2.0 * arma::accu(arma::log(arma::real(L.diag())));
    }
    double scale = std::abs(arma::trace(A).real()) / static_cast<double>(A.n_rows);
    if (scale <= 0.0) break;
    A.diag() += scale * 1e-14 * std::pow(1e3, attempt);
  }
  throw std::domain_error("logdet_hpd: matrix is not positive definite");
}

double logdet_eig(const arma::cx_mat& A) {
  arma::vec evals = arma::eig_sym(A);
  if (evals.min() <= 0.0) {
    throw std::domain_error("logdet_eig: matrix is not positive definite");
  }
  return arma::accu(arma::log(evals));
}

arma::cx_mat inv_sqrt_hpd(const arma::cx_mat& A, double rel_floor) {
  arma::vec evals;
  arma::cx_mat evecs;
  if (!arma::eig_sym(evals, evecs, A)) {
    throw std::domain_error("inv_sqrt_hpd: eigendecomposition failed");
  }
  double floor = rel_floor * evals.max();
  if (floor <= 0.0) {
    throw std::domain_error("inv_sqrt_hpd: matrix has no positive eigenvalue");
  }
  arma::vec lifted = arma::clamp(evals, floor, evals.max());
  return evecs * arma::diagmat(arma::conv_to<arma::cx_vec>::from(1.0 / arma::sqrt(lifted))) * evecs.t();
}

arma::cx_mat weighted_gram(const arma::cx_mat& basis, const arma::vec& q) {
  arma::cx_mat scaled = basis;
  scaled.each_col() %= arma::conv_to<arma::cx_vec>::from(q);
  arma::cx_mat gram = basis.t() * scaled;
  return 0.5 * (gram + gram.t());
}

double min_eig_herm(const arma::cx_mat& A) {
  return arma::eig_sym(A).min();
}

}  // namespace srmax
