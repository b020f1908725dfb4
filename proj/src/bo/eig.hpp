#pragma once

#include <Eigen/Dense>

namespace bo {

// Dense symmetric eigensolve, eigenvalues ascending. Backed by LAPACK's
// dsyevd/dsygvd when available (single-threaded for reproducibility),
// otherwise by Eigen's solvers.
void sym_eigensolve(const Eigen::MatrixXd& a, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs);

// generalized symmetric-definite problem A v = lambda B v, B SPD
void sym_geigensolve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::VectorXd& evals,
                     Eigen::MatrixXd& evecs);

}  // namespace bo
