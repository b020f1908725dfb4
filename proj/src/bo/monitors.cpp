#include "monitors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spectral.hpp"

namespace bo {

double weighted_mass(const Field& u, const WeightParams& w) {
    return inner(u * u, phi_weight(w, u.grid));
}

MonitorSeries kato_residual(const Trajectory& traj, const WeightParams& w) {
    MonitorSeries out;
    out.label = "kato_residual";
    if (traj.times.size() < 3) return out;
    const Grid& g = traj.snapshots.front().grid;
    Field phi = phi_weight(w, g);
    Field phip = phi_prime(w, g);
    const double s = traj.frame_speed();

    std::vector<double> m(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        m[i] = 0.5 * weighted_mass(traj.snapshots[i], w);

    for (std::size_t i = 1; i + 1 < traj.times.size(); ++i) {
        const Field& u = traj.snapshots[i];
        Field ux = derivative(u);
        Field hux = hilbert(ux);
        double rhs = inner(hux, u * phip) + inner(hux, ux * phi) +
                     integrate(u * u * u * phip) / 3.0 - 0.5 * s * inner(u * u, phip);
        const double dmdt = (m[i + 1] - m[i - 1]) / (traj.times[i + 1] - traj.times[i - 1]);
        out.times.push_back(traj.times[i]);
        out.values.push_back(std::abs(dmdt - rhs));
    }
    return out;
}

namespace {

void check_series(const Trajectory& traj, std::span<const double> rho) {
    if (rho.size() != traj.times.size())
        throw std::invalid_argument("monotonicity: rho series must align with snapshots");
}

MonotonicityReport make_report(double x0, double lambda, const WeightParams& w) {
    if (!(x0 > 1.0)) throw std::invalid_argument("monotonicity: x0 must exceed 1");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("monotonicity: lambda must lie in (0,1)");
    MonotonicityReport rep;
    rep.x0 = x0;
    rep.lambda = lambda;
    rep.weight = w;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    return rep;
}

void finalize(MonotonicityReport& rep) {
    rep.c_meas = std::max(0.0, rep.worst_violation) * rep.x0;
}

}  // namespace

MonotonicityReport monotonicity_right(const Trajectory& traj, std::span<const double> rho,
                                      double x0, double lambda, const WeightParams& w,
                                      std::size_t stride) {
    check_series(traj, rho);
    MonotonicityReport rep = make_report(x0, lambda, w);
    const std::size_t n = traj.times.size();
    for (std::size_t i = 0; i < n; i += stride) {
        for (std::size_t j = i + stride; j < n; j += stride) {
            const double t1 = traj.times[i], t2 = traj.times[j];
            const double lhs =
                weighted_mass(traj.snapshots[j], WeightParams{w.A, rho[j] + x0});
            const double rhs = weighted_mass(
                traj.snapshots[i], WeightParams{w.A, rho[i] + lambda * (t2 - t1) + x0});
            rep.pairs.push_back({t1, t2, lhs, rhs});
            rep.worst_violation = std::max(rep.worst_violation, lhs - rhs);
        }
    }
    finalize(rep);
    return rep;
}

MonotonicityReport monotonicity_left(const Trajectory& traj, std::span<const double> rho,
                                     double x0, double lambda, const WeightParams& w,
                                     std::size_t stride) {
    check_series(traj, rho);
    MonotonicityReport rep = make_report(x0, lambda, w);
    const std::size_t n = traj.times.size();
    for (std::size_t i = 0; i < n; i += stride) {
        for (std::size_t j = i + stride; j < n; j += stride) {
            const double t1 = traj.times[i], t2 = traj.times[j];
            const double lhs = weighted_mass(
                traj.snapshots[j], WeightParams{w.A, rho[j] - lambda * (t2 - t1) - x0});
            const double rhs =
                weighted_mass(traj.snapshots[i], WeightParams{w.A, rho[i] - x0});
            rep.pairs.push_back({t1, t2, lhs, rhs});
            rep.worst_violation = std::max(rep.worst_violation, lhs - rhs);
        }
    }
    finalize(rep);
    return rep;
}

MonotonicityReport monotonicity_left_reflected(const Trajectory& traj, std::span<const double> rho,
                                               double x0, double lambda, const WeightParams& w,
                                               std::size_t stride) {
    check_series(traj, rho);
    MonotonicityReport rep = make_report(x0, lambda, w);
    const Grid& g = traj.snapshots.front().grid;
    // right inequality applied to v(t,x) = u(-t,-x) with rho_v(t) = -rho(-t);
    // the x -> -x substitution is absorbed into the weight so that every
    // node pairs with itself and phi(x) = pi - phi(-x) holds pointwise
    auto reflected_mass = [&](const Field& u, double shift) {
        Field wt = sample(g, [&](double x) { return phi_value(w.A, -x - shift); });
        return inner(u * u, wt);
    };
    const std::size_t n = traj.times.size();
    for (std::size_t i = 0; i < n; i += stride) {
        for (std::size_t j = i + stride; j < n; j += stride) {
            const double t1 = traj.times[i], t2 = traj.times[j];
            // the pair (t1, t2) maps to the reflected pair (-t2, -t1)
            const double lhs_r = reflected_mass(traj.snapshots[i], -rho[i] + x0);
            const double rhs_r =
                reflected_mass(traj.snapshots[j], -rho[j] + lambda * (t2 - t1) + x0);
            const double mass1 = inner(traj.snapshots[i], traj.snapshots[i]);
            const double mass2 = inner(traj.snapshots[j], traj.snapshots[j]);
            const double lhs = std::numbers::pi * mass2 - rhs_r;
            const double rhs = std::numbers::pi * mass1 - lhs_r;
            rep.pairs.push_back({t1, t2, lhs, rhs});
            rep.worst_violation = std::max(rep.worst_violation, lhs - rhs);
        }
    }
    finalize(rep);
    return rep;
}

EtaMonotonicityReport eta_monotonicity(std::span<const Field> eta, std::span<const double> times,
                                       double x0, double lambda, const WeightParams& w,
                                       std::size_t stride) {
    if (eta.size() != times.size())
        throw std::invalid_argument("eta_monotonicity: series length mismatch");
    if (!(x0 > 1.0)) throw std::invalid_argument("eta_monotonicity: x0 must exceed 1");
    EtaMonotonicityReport rep;
    rep.x0 = x0;
    rep.lambda = lambda;
    const std::size_t n = times.size();

    std::vector<double> mass(n);
    for (std::size_t i = 0; i < n; ++i) mass[i] = inner(eta[i], eta[i]);

    auto diff_weight = [&](const Field& f, double shift, double station) {
        const Grid& g = f.grid;
        const double base = phi_value(w.A, -station);
        Field wt = sample(g, [&](double x) { return phi_value(w.A, x - shift) - base; });
        return inner(f * f, wt);
    };

    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < n; i += stride) {
        for (std::size_t j = i + stride; j < n; j += stride) {
            const double t1 = times[i], t2 = times[j];
            const double lhs = diff_weight(eta[j], x0, x0);
            const double rhs = diff_weight(eta[i], x0 + lambda * (t2 - t1), x0 + lambda * (t2 - t1));
            // trapezoid of ||eta(t)||^2 / (x0 + lambda (t2 - t))^2 over [t1, t2]
            double budget = 0.0;
            for (std::size_t k = i; k < j; ++k) {
                auto piece = [&](std::size_t idx) {
                    const double d = x0 + lambda * (t2 - times[idx]);
                    return mass[idx] / (d * d);
                };
                budget += 0.5 * (piece(k) + piece(k + 1)) * (times[k + 1] - times[k]);
            }
            rep.pairs.push_back({t1, t2, lhs, rhs, budget});
            if (budget > 0.0) worst_ratio = std::max(worst_ratio, (lhs - rhs) / budget);
        }
    }
    rep.c_meas = std::max(0.0, worst_ratio);
    return rep;
}

double decroissance_sup(const WeightParams& w, double lambda, std::span<const double> x0s,
                        std::span<const double> dts, const Grid& g) {
    double sup = 0.0;
    for (double x0 : x0s) {
        for (double dt : dts) {
            const double station = x0 + lambda * dt;
            const double base = phi_value(w.A, -station);
            for (std::int64_t j = 0; j < g.n; ++j) {
                const double x = g.node(j);
                const double q = soliton_value(1.0, x);
                const double xbar = x - station;
                const double val =
                    q * phi_d1(w.A, xbar) + std::abs(q * (phi_value(w.A, xbar) - base));
                sup = std::max(sup, val * station * station);
            }
        }
    }
    return sup;
}

double localized_distance(const Field& u, double c, double rho, double t) {
    const Grid& g = u.grid;
    double acc = 0.0;
    for (std::int64_t j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        if (x <= t / 10.0) continue;
        const double d = u.values[static_cast<std::size_t>(j)] - soliton_value(c, x - rho);
        acc += d * d;
    }
    return std::sqrt(acc * g.spacing());
}

MonitorSeries left_region_mass_gap(const Trajectory& traj, std::span<const double> rho,
                                   const WeightParams& w) {
    check_series(traj, rho);
    MonitorSeries out;
    out.label = "left_region_mass_gap";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const double far = weighted_mass(traj.snapshots[i], WeightParams{w.A, rho[i] - 0.95 * t});
        const double near = weighted_mass(traj.snapshots[i], WeightParams{w.A, rho[i] - t / 10.0});
        out.times.push_back(t);
        out.values.push_back(far - near);
    }
    return out;
}

VirialReport virial_linear_w(const Trajectory& wtraj) {
    if (wtraj.flow.kind != FlowSpec::Kind::linear_w)
        throw std::invalid_argument("virial_linear_w: trajectory is not a w-flow");
    if (wtraj.beta_series.size() != wtraj.times.size())
        throw std::invalid_argument("virial_linear_w: missing beta series");
    const Grid& g = wtraj.snapshots.front().grid;
    const double a = g.length / 8.0;

    Field psi = sample(g, [a](double x) { return a * std::atan(x / a); });
    Field psip = sample(g, [a](double x) { return 1.0 / (1.0 + (x / a) * (x / a)); });
    Field q = soliton(SolitonParams{1.0, 0.0}, g);
    Field qp = soliton_derivative(SolitonParams{1.0, 0.0}, g);
    Field psi_qp = psi * qp;

    std::vector<double> rates(wtraj.times.size());
    std::vector<double> dhalf(wtraj.times.size());
    for (std::size_t i = 0; i < wtraj.times.size(); ++i) {
        const Field& wfld = wtraj.snapshots[i];
        Field dw = frac_deriv(wfld, 1.0);
        Field wx = derivative(wfld);
        const double term_dhalf = -2.0 * (inner(psip * wfld, dw) + inner(psi * wx, dw));
        const double term_mass = -inner(psip, wfld * wfld);
        const double term_pot = inner(psip * q, wfld * wfld) - inner(psi_qp, wfld * wfld);
        const double term_beta = 2.0 * wtraj.beta_series[i] * inner(psi_qp, wfld);
        rates[i] = term_dhalf + term_mass + term_pot + term_beta;
        dhalf[i] = term_dhalf;
    }

    VirialReport rep;
    rep.sawtooth_scale = a;
    const Field& w0 = wtraj.snapshots.front();
    const Field& w1 = wtraj.snapshots.back();
    rep.lhs = inner(psi, w1 * w1) - inner(psi, w0 * w0);
    double acc = 0.0, accd = 0.0;
    for (std::size_t i = 0; i + 1 < wtraj.times.size(); ++i) {
        const double dt = wtraj.times[i + 1] - wtraj.times[i];
        acc += 0.5 * (rates[i] + rates[i + 1]) * dt;
        accd += 0.5 * (dhalf[i] + dhalf[i + 1]) * dt;
    }
    rep.rhs = acc;
    rep.dhalf_integral = accd;
    rep.residual = std::abs(rep.lhs - rep.rhs);
    return rep;
}

std::vector<ProbeRow> firstterm_probe(const Field& u, std::span<const double> A_list) {
    std::vector<ProbeRow> rows;
    Field hux = hilbert(derivative(u));
    for (double a : A_list) {
        Field phip = phi_prime(WeightParams{a, 0.0}, u.grid);
        ProbeRow row;
        row.A = a;
        row.lhs = inner(hux, u * phip);
        row.rhs = inner(u * u, phip);
        row.ratio_times_A = row.rhs != 0.0 ? a * row.lhs / row.rhs : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ProbeRow> secondterm_probe(const Field& u, std::span<const double> A_list) {
    std::vector<ProbeRow> rows;
    Field ux = derivative(u);
    Field hux = hilbert(ux);
    for (double a : A_list) {
        ProbeRow row;
        row.A = a;
        row.lhs = inner(hux, ux * phi_weight(WeightParams{a, 0.0}, u.grid));
        row.rhs = inner(u * u, phi_prime(WeightParams{a, 0.0}, u.grid));
        row.ratio_times_A = row.rhs != 0.0 ? a * std::abs(row.lhs) / row.rhs : 0.0;
        rows.push_back(row);
    }
    return rows;
}

double kernel_conformance_max_rel_err(double A, const Grid& g, int quad_points) {
    const WeightParams w{A, 0.0};
    const struct {
        double sigma, x0;
    } corpus[] = {{8.0, 0.0}, {6.0, 10.0}, {10.0, -5.0}};

    double worst = 0.0;
    for (const auto& c : corpus) {
        Field u = sample(g, [&](double x) {
            const double t = (x - c.x0) / c.sigma;
            return std::exp(-t * t);
        });
        Field ux = derivative(u);
        const double spectral = inner(hilbert(ux), ux * phi_weight(w, g));

        const double a = c.x0 - 60.0, b = c.x0 + 60.0;
        const double hq = (b - a) / quad_points;
        std::vector<double> xs(quad_points), uq(quad_points);
        for (int i = 0; i < quad_points; ++i) {
            xs[static_cast<std::size_t>(i)] = a + hq * (i + 0.5);
            const double t = (xs[static_cast<std::size_t>(i)] - c.x0) / c.sigma;
            uq[static_cast<std::size_t>(i)] = std::exp(-t * t);
        }
        double dbl = 0.0;
        for (int i = 0; i < quad_points; ++i)
            for (int j = 0; j < quad_points; ++j)
                dbl += uq[static_cast<std::size_t>(i)] * uq[static_cast<std::size_t>(j)] *
                       kernel_K_phi(xs[static_cast<std::size_t>(i)],
                                    xs[static_cast<std::size_t>(j)], w);
        dbl *= hq * hq / (2.0 * std::numbers::pi);
        worst = std::max(worst, std::abs(dbl - spectral) / std::abs(spectral));
    }
    return worst;
}

double cubic_weight_bound(const Field& eta, const WeightParams& w) {
    Field phip = phi_prime(w, eta.grid);
    Field abs3(eta.grid);
    for (std::size_t j = 0; j < eta.size(); ++j) {
        const double v = std::abs(eta.values[j]);
        abs3.values[j] = v * v * v;
    }
    const double num = inner(abs3, phip);
    const double den = sobolev_norm(eta, 0.5) * inner(eta * eta, phip);
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace bo
