#include "linops.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eig.hpp"
#include "spectral.hpp"

namespace bo {

Field apply_L(const Field& f) { return apply_L_c(f, 1.0); }

Field apply_L_c(const Field& f, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("apply_L_c: c must be positive");
    Field qc = soliton(SolitonParams{c, 0.0}, f.grid);
    Field out = frac_deriv(f, 1.0);
    for (std::size_t j = 0; j < out.size(); ++j)
        out.values[j] += (c - qc.values[j]) * f.values[j];
    return out;
}

double quadform_Ltilde(const Field& z) {
    const double dhalf = sobolev_norm(z, 0.5, /*homogeneous=*/true);
    Field pot = sample(z.grid, [](double x) {
        const double q = 4.0 / (1.0 + x * x);
        const double xqp = -8.0 * x * x / ((1.0 + x * x) * (1.0 + x * x));
        return xqp + q;
    });
    return 2.0 * dhalf * dhalf + inner(z, z) - inner(pot, z * z);
}

namespace {

// first column of the circulant matrix of a real-even multiplier
std::vector<double> multiplier_kernel(const Grid& g, double power_weight) {
    Field e0(g);
    e0.values[0] = 1.0;
    Field col = frac_deriv(e0, 1.0);
    for (double& v : col.values) v *= power_weight;
    return col.values;
}

}  // namespace

OperatorMatrix assemble(OperatorKind kind, const Grid& g, double c) {
    if (g.n < 64) throw std::invalid_argument("assemble: grid too small for spectrum work (n < 64)");
    const auto n = static_cast<Eigen::Index>(g.n);
    OperatorMatrix m;
    m.grid = g;
    m.kind = kind;
    m.c = c;

    const double dweight = (kind == OperatorKind::Ltilde) ? 2.0 : 1.0;
    std::vector<double> kernel = multiplier_kernel(g, dweight);

    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = kernel[static_cast<std::size_t>((i - j + n) % n)];

    Field diag(g);
    switch (kind) {
        case OperatorKind::L:
            diag = sample(g, [](double x) { return 1.0 - soliton_value(1.0, x); });
            break;
        case OperatorKind::Lc:
            diag = sample(g, [c](double x) { return c - soliton_value(c, x); });
            break;
        case OperatorKind::Ltilde:
            diag = sample(g, [](double x) {
                const double q = soliton_value(1.0, x);
                const double xqp = x * soliton_deriv(1.0, x);
                return 1.0 - (xqp + q);
            });
            break;
    }
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) += diag.values[static_cast<std::size_t>(i)];

    m.max_asymmetry = (a - a.transpose()).cwiseAbs().maxCoeff();
    m.entries = 0.5 * (a + a.transpose());
    return m;
}

namespace {

Field vector_to_field(const Grid& g, const Eigen::VectorXd& v) {
    Field f(g);
    for (Eigen::Index i = 0; i < v.size(); ++i) f.values[static_cast<std::size_t>(i)] = v(i);
    const double nrm = l2_norm(f);
    if (nrm > 0.0)
        for (double& x : f.values) x /= nrm;
    return f;
}

Eigen::MatrixXd hhalf_gram(const Grid& g) {
    Field e0(g);
    e0.values[0] = 1.0;
    Field col = frac_deriv(e0, 1.0);
    const auto n = static_cast<Eigen::Index>(g.n);
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            b(i, j) = col.values[static_cast<std::size_t>((i - j + n) % n)];
    b += Eigen::MatrixXd::Identity(n, n);
    return 0.5 * (b + b.transpose());
}

}  // namespace

SpectrumReport spectrum(const OperatorMatrix& m, int n_lowest) {
    if (n_lowest < 1) throw std::invalid_argument("spectrum: n_lowest must be positive");
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    sym_eigensolve(m.entries, evals, evecs);

    SpectrumReport rep;
    rep.metric = Metric::L2;
    const int take = std::min<int>(n_lowest, static_cast<int>(evals.size()));
    for (int i = 0; i < take; ++i) {
        rep.eigenvalues.push_back(evals(i));
        Eigen::VectorXd v = evecs.col(i);
        rep.residuals.push_back((m.entries * v - evals(i) * v).norm() / v.norm());
        rep.eigenvectors.push_back(vector_to_field(m.grid, v));
    }
    rep.rayleigh_min = evals(0);
    return rep;
}

SpectrumReport constrained_rayleigh_min(const OperatorMatrix& m,
                                        const std::vector<Field>& constraints, Metric metric) {
    const auto n = static_cast<Eigen::Index>(m.grid.n);
    const auto nc = static_cast<Eigen::Index>(constraints.size());
    if (nc == 0) return spectrum(m, 5);

    Eigen::MatrixXd g(n, nc);
    for (Eigen::Index j = 0; j < nc; ++j) {
        if (!(constraints[static_cast<std::size_t>(j)].grid == m.grid))
            throw std::invalid_argument("constrained_rayleigh_min: constraint grid mismatch");
        for (Eigen::Index i = 0; i < n; ++i)
            g(i, j) = constraints[static_cast<std::size_t>(j)].values[static_cast<std::size_t>(i)];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd r = qr.matrixQR().topRows(nc).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < nc; ++j)
        if (std::abs(r(j, j)) < 1e-12 * std::sqrt(static_cast<double>(n)))
            throw std::invalid_argument("constrained_rayleigh_min: constraints not independent");
    Eigen::MatrixXd qfull = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd basis = qfull.rightCols(n - nc);

    Eigen::MatrixXd a_red = basis.transpose() * m.entries * basis;
    a_red = 0.5 * (a_red + a_red.transpose()).eval();

    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    Eigen::MatrixXd b_red;
    if (metric == Metric::L2) {
        sym_eigensolve(a_red, evals, evecs);
    } else {
        b_red = basis.transpose() * hhalf_gram(m.grid) * basis;
        b_red = 0.5 * (b_red + b_red.transpose()).eval();
        sym_geigensolve(a_red, b_red, evals, evecs);
    }

    SpectrumReport rep;
    rep.metric = metric;
    rep.constraint_set = constraints;
    const int take = std::min<int>(5, static_cast<int>(evals.size()));
    for (int i = 0; i < take; ++i) {
        rep.eigenvalues.push_back(evals(i));
        Eigen::VectorXd y = evecs.col(i);
        Eigen::VectorXd resid = a_red * y;
        if (metric == Metric::L2)
            resid -= evals(i) * y;
        else
            resid -= evals(i) * (b_red * y);
        rep.residuals.push_back(resid.norm() / y.norm());
        rep.eigenvectors.push_back(vector_to_field(m.grid, basis * y));
    }
    rep.rayleigh_min = evals(0);
    return rep;
}

double beta_from_w(const Field& w) {
    Field qpp = soliton_second_derivative(SolitonParams{1.0, 0.0}, w.grid);
    return inner(w, apply_L(qpp)) / closed_form_integrals().int_Qp2;
}

TraversalReport traversal_check(double eps, const Grid& identity_grid, const Grid& eig_grid,
                                bool with_eigensolve) {
    if (!(eps > 0.0)) throw std::invalid_argument("traversal_check: eps must be positive");
    TraversalReport rep;
    rep.eps = eps;

    Field q = soliton(SolitonParams{1.0, 0.0}, identity_grid);
    Field s = profile_S(identity_grid);
    Field t = profile_T(identity_grid);
    Field s_eps = s + eps * q;
    Field t_eps = t - eps * s;

    rep.residual_LTeps = l2_norm(apply_L(t_eps) - s_eps);
    rep.ip_S_T_eps = inner(s_eps, t_eps);
    const double st = inner(s, t), ss = inner(s, s), tq = inner(t, q), sq = inner(s, q);
    rep.ip_predicted = st + eps * (-ss + tq) - eps * eps * sq;

    rep.with_eigensolve = with_eigensolve;
    if (with_eigensolve) {
        OperatorMatrix m = assemble(OperatorKind::L, eig_grid);
        Field s_eps_eig = profile_S(eig_grid) + eps * soliton(SolitonParams{1.0, 0.0}, eig_grid);
        rep.constrained_min = constrained_rayleigh_min(m, {s_eps_eig}, Metric::L2).rayleigh_min;
    }
    return rep;
}

std::string spectrum_report_text(const SpectrumReport& rep,
                                 const std::vector<std::pair<std::string, Field>>& named) {
    std::ostringstream os;
    os.setf(std::ios::scientific);
    os.precision(6);
    os << "metric: " << (rep.metric == Metric::L2 ? "L2" : "H^1/2") << "\n";
    os << "constraints: " << rep.constraint_set.size() << "\n";
    os << "rayleigh_min: " << rep.rayleigh_min << "\n";
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        os << "lambda[" << i << "] = " << rep.eigenvalues[i]
           << "  residual = " << rep.residuals[i];
        for (const auto& [name, prof] : named) {
            const double denom = l2_norm(rep.eigenvectors[i]) * l2_norm(prof);
            const double corr = denom > 0.0 ? std::abs(inner(rep.eigenvectors[i], prof)) / denom : 0.0;
            os << "  corr(" << name << ") = " << corr;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace bo
