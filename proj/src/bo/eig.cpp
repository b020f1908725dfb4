#include "eig.hpp"

#include <stdexcept>

#ifdef BO_HAVE_LAPACKE
#include <lapacke.h>
extern "C" void openblas_set_num_threads(int);
namespace {
struct BlasThreadPin {
    BlasThreadPin() { openblas_set_num_threads(1); }
};
const BlasThreadPin pin;
}  // namespace
#else
#include <Eigen/Eigenvalues>
#endif

namespace bo {

void sym_eigensolve(const Eigen::MatrixXd& a, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs) {
    const auto n = a.rows();
#ifdef BO_HAVE_LAPACKE
    evecs = a;
    evals.resize(n);
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<int>(n), evecs.data(),
                              static_cast<int>(n), evals.data());
    if (info != 0) throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
#else
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
#endif
}

void sym_geigensolve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::VectorXd& evals,
                     Eigen::MatrixXd& evecs) {
    const auto n = a.rows();
#ifdef BO_HAVE_LAPACKE
    evecs = a;
    Eigen::MatrixXd bb = b;
    evals.resize(n);
    int info = LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'V', 'L', static_cast<int>(n), evecs.data(),
                              static_cast<int>(n), bb.data(), static_cast<int>(n), evals.data());
    if (info != 0) throw std::runtime_error("dsygvd failed, info=" + std::to_string(info));
#else
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
    if (es.info() != Eigen::Success) throw std::runtime_error("geigensolve failed");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
#endif
}

}  // namespace bo
