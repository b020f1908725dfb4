#include "modulation.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "linops.hpp"
#include "spectral.hpp"

namespace bo {

ModulationState fit_translation(const Field& u, double c, double rho_guess) {
    if (!(c > 0.0)) throw std::invalid_argument("fit_translation: c must be positive");
    const Grid& g = u.grid;
    Field qc = soliton(SolitonParams{c, 0.0}, g);
    Field qcp = soliton_derivative(SolitonParams{c, 0.0}, g);

    const double tube = l2_norm(translate(u, rho_guess) - qc);
    if (tube > 0.5 * l2_norm(qc))
        throw modulation_error("fit_translation: data outside the soliton tube");

    Field up = derivative(u);
    const double qcp_norm = l2_norm(qcp);

    double rho = rho_guess;
    double prev_abs = std::numeric_limits<double>::infinity();
    double damping = 1.0;
    ModulationState out;
    for (int it = 1; it <= 25; ++it) {
        Field eta = translate(u, rho) - qc;
        const double val = inner(qcp, eta);
        out.newton_iters = it;
        // tolerance relative to the residual itself: the functional can be
        // driven to the rounding floor of the inner product
        const double step_floor = 1e-15 * (1.0 + std::abs(rho));
        if (std::abs(val) <= 1e-12 * qcp_norm * std::max(l2_norm(eta), 1e-30)) {
            out.rho = rho;
            out.c = c;
            out.eta = std::move(eta);
            out.ortho_defect = std::abs(val);
            return out;
        }
        damping = (std::abs(val) > prev_abs) ? 0.5 * damping : 1.0;
        prev_abs = std::abs(val);
        const double slope = inner(qcp, translate(up, rho));
        const double step = damping * val / slope;
        if (std::abs(step) <= step_floor) {
            out.rho = rho;
            out.c = c;
            out.eta = std::move(eta);
            out.ortho_defect = std::abs(val);
            return out;
        }
        rho -= step;
    }
    throw modulation_error("fit_translation: Newton did not converge in 25 iterations");
}

ModulationState fit_scale_translation(const Field& u, double c_guess, double rho_guess) {
    if (!(c_guess > 0.0)) throw std::invalid_argument("fit_scale_translation: c must be positive");
    const Grid& g = u.grid;
    Field up = derivative(u);

    auto residual = [&](double c, double rho, double& r1, double& r2) {
        Field qc = soliton(SolitonParams{c, 0.0}, g);
        Field qcp = soliton_derivative(SolitonParams{c, 0.0}, g);
        Field eta = translate(u, rho) - qc;
        r1 = inner(qc, eta);
        r2 = inner(qcp, eta);
    };

    double c = c_guess, rho = rho_guess;
    double r1, r2;
    residual(c, rho, r1, r2);
    ModulationState out;
    for (int it = 1; it <= 50; ++it) {
        out.newton_iters = it;
        Field qc = soliton(SolitonParams{c, 0.0}, g);
        Field qcp = soliton_derivative(SolitonParams{c, 0.0}, g);
        Field eta = translate(u, rho) - qc;
        if (std::abs(r1) + std::abs(r2) <= 1e-12 * std::max(1.0, inner(qc, qc))) {
            out.rho = rho;
            out.c = c;
            out.eta = std::move(eta);
            out.ortho_defect = std::max(std::abs(r1), std::abs(r2));
            return out;
        }
        Field dq_dc = soliton_scale_derivative(SolitonParams{c, 0.0}, g);
        Field dqp_dc = sample(g, [c](double x) {
            // d/dc Q_c' = 2c Q'(cx) + c^2 x Q''(cx)
            return 2.0 * soliton_deriv(c, x) / c + x * soliton_second_deriv(c, x) / c;
        });
        Field up_shift = translate(up, rho);
        const double j11 = inner(dq_dc, eta) - inner(qc, dq_dc);
        const double j12 = inner(qc, up_shift);
        const double j21 = inner(dqp_dc, eta) - inner(qcp, dq_dc);
        const double j22 = inner(qcp, up_shift);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) throw modulation_error("fit_scale_translation: singular Jacobian");
        const double dc = -(r1 * j22 - r2 * j12) / det;
        const double dr = -(-r1 * j21 + r2 * j11) / det;

        // backtracking: halve the step while the residual norm increases
        const double base = std::abs(r1) + std::abs(r2);
        double lam = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 12; ++bt, lam *= 0.5) {
            const double ct = c + lam * dc, rt = rho + lam * dr;
            if (!(ct > 0.0)) continue;
            double t1, t2;
            residual(ct, rt, t1, t2);
            if (std::abs(t1) + std::abs(t2) < base) {
                c = ct;
                rho = rt;
                r1 = t1;
                r2 = t2;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw modulation_error("fit_scale_translation: Newton stalled (outside the tube?)");
    }
    throw modulation_error("fit_scale_translation: Newton did not converge");
}

Field recompose(const ModulationState& s, const Grid& g) {
    Field lab = soliton(SolitonParams{s.c, 0.0}, g) + s.eta;
    return translate(lab, -s.rho);
}

double rho_dot_estimate(const ModulationState& s) {
    const Grid& g = s.eta.grid;
    const double c = s.c;
    Field qcpp = soliton_second_derivative(SolitonParams{c, 0.0}, g);
    Field qcp = soliton_derivative(SolitonParams{c, 0.0}, g);
    const double num = inner(s.eta, apply_L_c(qcpp, c)) - 0.5 * inner(s.eta * s.eta, qcpp);
    const double den = inner(qcp, qcp) - inner(s.eta, qcpp);
    return c + num / den;
}

double estimate_c_plus(const Trajectory& traj, double A) {
    if (traj.times.empty()) return 0.0;
    const double T = traj.times.back();
    double best = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < 2.0 * T / 3.0) continue;
        Field phi = phi_weight(WeightParams{A, t / 10.0}, traj.snapshots[i].grid);
        best = std::max(best, inner(traj.snapshots[i] * traj.snapshots[i], phi));
    }
    const double q2 = closed_form_integrals().int_Q2;
    return best / (std::numbers::pi * q2);
}

std::vector<ModulationState> multisoliton_decompose(const Field& u,
                                                    const std::vector<SolitonParams>& guesses,
                                                    double min_gap) {
    const auto nsol = guesses.size();
    if (nsol == 0) throw std::invalid_argument("multisoliton_decompose: empty guess list");
    for (std::size_t j = 1; j < nsol; ++j)
        if (!(guesses[j].x0 - guesses[j - 1].x0 >= min_gap))
            throw modulation_error("multisoliton_decompose: guesses not separated by min_gap");

    const Grid& g = u.grid;
    const auto dim = static_cast<Eigen::Index>(2 * nsol);

    {
        // tube precondition; far guesses would let Newton slide into the
        // degenerate small-c basin where all residuals vanish
        Field sum0(g);
        for (const auto& gp : guesses) sum0 = sum0 + soliton(gp, g);
        if (l2_norm(u - sum0) > 0.5 * l2_norm(sum0))
            throw modulation_error("multisoliton_decompose: data outside the tube of the sum");
    }

    auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& res) {
        Field sum(g);
        for (std::size_t j = 0; j < nsol; ++j) {
            if (!(p(2 * j) > 0.0)) return false;
            sum = sum + soliton(SolitonParams{p(2 * j), p(2 * j + 1)}, g);
        }
        Field eta = u - sum;
        for (std::size_t j = 0; j < nsol; ++j) {
            Field rj = soliton(SolitonParams{p(2 * j), p(2 * j + 1)}, g);
            res(2 * j) = inner(rj, eta);
            res(2 * j + 1) = inner(soliton_derivative(SolitonParams{p(2 * j), p(2 * j + 1)}, g), eta);
        }
        return true;
    };

    Eigen::VectorXd p(dim), res(dim), trial(dim);
    for (std::size_t j = 0; j < nsol; ++j) {
        p(2 * j) = guesses[j].c;
        p(2 * j + 1) = guesses[j].x0;
    }
    if (!residual(p, res)) throw modulation_error("multisoliton_decompose: bad guess scales");

    int iters = 0;
    for (int it = 1; it <= 80; ++it) {
        iters = it;
        // collision guard on the current iterate
        for (std::size_t j = 1; j < nsol; ++j)
            if (p(2 * j + 1) - p(2 * (j - 1) + 1) < 0.5 * min_gap)
                throw modulation_error("multisoliton_decompose: centers collided");

        if (res.cwiseAbs().maxCoeff() <= 1e-11) break;

        std::vector<Field> r(nsol), rx(nsol), drc(nsol), drr(nsol);
        Field total(g);
        for (std::size_t j = 0; j < nsol; ++j) {
            const double c = p(2 * j), x0 = p(2 * j + 1);
            r[j] = soliton(SolitonParams{c, x0}, g);
            rx[j] = soliton_derivative(SolitonParams{c, x0}, g);
            drc[j] = sample(g, [c, x0](double x) { return soliton_dc(c, x - x0); });
            drr[j] = -1.0 * rx[j];
            total = total + r[j];
        }
        Field eta = u - total;
        Eigen::MatrixXd jac(dim, dim);
        for (std::size_t j = 0; j < nsol; ++j) {
            Field drcx = derivative(drc[j]);
            Field drrx = derivative(drr[j]);
            for (std::size_t m = 0; m < nsol; ++m) {
                jac(2 * j, 2 * m) = -inner(r[j], drc[m]) + (m == j ? inner(drc[j], eta) : 0.0);
                jac(2 * j, 2 * m + 1) = -inner(r[j], drr[m]) + (m == j ? inner(drr[j], eta) : 0.0);
                jac(2 * j + 1, 2 * m) = -inner(rx[j], drc[m]) + (m == j ? inner(drcx, eta) : 0.0);
                jac(2 * j + 1, 2 * m + 1) =
                    -inner(rx[j], drr[m]) + (m == j ? inner(drrx, eta) : 0.0);
            }
        }
        Eigen::VectorXd dp = jac.fullPivLu().solve(-res);
        const double base = res.cwiseAbs().sum();
        double lam = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 12; ++bt, lam *= 0.5) {
            trial = p + lam * dp;
            bool ordered = true;
            for (std::size_t j = 1; j < nsol; ++j)
                ordered = ordered &&
                          (trial(2 * j + 1) - trial(2 * (j - 1) + 1) >= 0.5 * min_gap);
            if (!ordered) continue;
            Eigen::VectorXd tres(dim);
            if (!residual(trial, tres)) continue;
            if (tres.cwiseAbs().sum() < base) {
                p = trial;
                res = tres;
                accepted = true;
                break;
            }
        }
        if (!accepted) throw modulation_error("multisoliton_decompose: Newton stalled");
        if (lam == 1.0 && dp.cwiseAbs().maxCoeff() < 1e-12) break;
    }
    if (res.cwiseAbs().maxCoeff() > 1e-9)
        throw modulation_error("multisoliton_decompose: Newton did not converge");

    std::vector<ModulationState> out(nsol);
    Field sum(g);
    for (std::size_t j = 0; j < nsol; ++j)
        sum = sum + soliton(SolitonParams{p(2 * j), p(2 * j + 1)}, g);
    Field eta_lab = u - sum;
    for (std::size_t j = 0; j < nsol; ++j) {
        out[j].c = p(2 * j);
        out[j].rho = p(2 * j + 1);
        out[j].eta = translate(eta_lab, out[j].rho);
        Field rj = soliton(SolitonParams{out[j].c, out[j].rho}, g);
        Field rjx = soliton_derivative(SolitonParams{out[j].c, out[j].rho}, g);
        out[j].ortho_defect =
            std::max(std::abs(inner(rj, eta_lab)), std::abs(inner(rjx, eta_lab)));
        out[j].newton_iters = iters;
    }
    return out;
}

}  // namespace bo
