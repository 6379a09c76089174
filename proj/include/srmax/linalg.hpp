#pragma once

#include <armadillo>

namespace srmax {

// log|A| for Hermitian positive definite A via Cholesky. Retries with a tiny
// diagonal jitter when the factorization stalls at the PSD boundary; throws
// std::domain_error when A is not positive definite.
double logdet_hpd(arma::cx_mat A);

// log-determinant through the eigenvalues of a Hermitian matrix. Slower than
// the Cholesky route; kept as an algebraically independent evaluation path.
double logdet_eig(const arma::cx_mat& A);

// A^{-1/2} for Hermitian positive definite A. Eigenvalues below
// rel_floor * lambda_max are lifted to the floor before inversion.
arma::cx_mat inv_sqrt_hpd(const arma::cx_mat& A, double rel_floor = 1e-12);

// V' * diag(q) * V with q real. Result is Hermitian by construction.
arma::cx_mat weighted_gram(const arma::cx_mat& basis, const arma::vec& q);

// Smallest eigenvalue of a Hermitian matrix.
double min_eig_herm(const arma::cx_mat& A);

}  // namespace srmax
