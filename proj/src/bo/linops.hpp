#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"
#include "profiles.hpp"

namespace bo {

// Linearized operators around the soliton:
//   L   = D + 1 - Q            (D = -H d/dx, symbol |k|)
//   L_c = D + c - Q_c
//   Ltilde: quadratic form 2 int |D^{1/2}z|^2 + int z^2 - int (xQ'+Q) z^2,
//           i.e. the operator 2D + 1 - (xQ' + Q)

Field apply_L(const Field& f);
Field apply_L_c(const Field& f, double c);
double quadform_Ltilde(const Field& z);

enum class OperatorKind { L, Lc, Ltilde };
enum class Metric { L2, Hhalf };

struct OperatorMatrix {
    Grid grid;
    OperatorKind kind = OperatorKind::L;
    double c = 1.0;
    Eigen::MatrixXd entries;  // symmetrized dense operator matrix
    double max_asymmetry = 0.0;
    double quadrature_weight() const { return grid.spacing(); }
};

// dense assembly via the circulant structure of the multiplier part;
// grids below n = 64 are rejected (too coarse for spectrum work)
OperatorMatrix assemble(OperatorKind kind, const Grid& g, double c = 1.0);

struct SpectrumReport {
    std::vector<double> eigenvalues;
    std::vector<Field> eigenvectors;   // L2-normalized
    std::vector<double> residuals;     // ||Av - lambda Bv||_2 / ||v||_2, reduced problem
    std::vector<Field> constraint_set;
    double rayleigh_min = 0.0;
    Metric metric = Metric::L2;
};

SpectrumReport spectrum(const OperatorMatrix& m, int n_lowest);

// Minimize z^T M z subject to <z, g_i>_L2 = 0 and ||z||_metric = 1 by
// projecting onto the constraint complement and solving the (generalized)
// eigenproblem there; the H^{1/2} metric uses the (1+|k|) Gram matrix.
SpectrumReport constrained_rayleigh_min(const OperatorMatrix& m,
                                        const std::vector<Field>& constraints, Metric metric);

// beta(t) of the linear flow:  (int (Q')^2) beta = int w L(Q'')
double beta_from_w(const Field& w);

struct TraversalReport {
    double eps = 0.0;
    double residual_LTeps = 0.0;   // || L T_eps - S_eps ||_L2
    double ip_S_T_eps = 0.0;       // (L T_eps, T_eps) = (S_eps, T_eps)
    double ip_predicted = 0.0;     // (S,T) + eps(-(S,S)+(T,Q)) - eps^2 (S,Q)
    double constrained_min = 0.0;  // min of L over { int w S_eps = 0 }
    bool with_eigensolve = false;
};

TraversalReport traversal_check(double eps, const Grid& identity_grid, const Grid& eig_grid,
                                bool with_eigensolve = true);

// human-readable report with correlations against named profiles
std::string spectrum_report_text(const SpectrumReport& rep,
                                 const std::vector<std::pair<std::string, Field>>& named);

}  // namespace bo
