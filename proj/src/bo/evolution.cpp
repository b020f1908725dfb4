#include "evolution.hpp"

#include <cmath>
#include <stdexcept>

#include "linops.hpp"
#include "profiles.hpp"
#include "spectral.hpp"

namespace bo {

namespace {

using cplx = std::complex<double>;

// phi1(z) = (e^z-1)/z and the Cox--Matthews ETDRK4 weights
//   f1 = (-4 - z + e^z(4 - 3z + z^2))/z^3
//   f2 = ( 2 + z + e^z(-2 + z))/z^3
//   f3 = (-4 - 3z - z^2 + e^z(4 - z))/z^3
// evaluated by series below |z| = 1 to avoid cancellation.
double inv_factorial(int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return 1.0 / f;
}

template <typename Coef>
cplx series_eval(cplx z, Coef coef) {
    cplx acc(0.0, 0.0);
    for (int j = 30; j >= 0; --j) acc = acc * z + coef(j);
    return acc;
}

cplx phi1(cplx z) {
    if (std::abs(z) < 1.0) return series_eval(z, [](int j) { return inv_factorial(j + 1); });
    return (std::exp(z) - 1.0) / z;
}
cplx etd_f1(cplx z) {
    if (std::abs(z) < 1.0)
        return series_eval(z, [](int j) {
            return 4.0 * inv_factorial(j + 3) - 3.0 * inv_factorial(j + 2) + inv_factorial(j + 1);
        });
    return (-4.0 - z + std::exp(z) * (4.0 - 3.0 * z + z * z)) / (z * z * z);
}
cplx etd_f2(cplx z) {
    if (std::abs(z) < 1.0)
        return series_eval(z, [](int j) {
            return -2.0 * inv_factorial(j + 3) + inv_factorial(j + 2);
        });
    return (2.0 + z + std::exp(z) * (-2.0 + z)) / (z * z * z);
}
cplx etd_f3(cplx z) {
    if (std::abs(z) < 1.0)
        return series_eval(z, [](int j) {
            return 4.0 * inv_factorial(j + 3) - inv_factorial(j + 2);
        });
    return (-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) / (z * z * z);
}

}  // namespace

Integrator::Integrator(const Grid& g, const StepperConfig& cfg, const FlowSpec& flow)
    : grid_(g), cfg_(cfg), flow_(flow) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
    const std::int64_t nm = g.num_modes();
    exp_full_.resize(nm);
    exp_half_.resize(nm);
    exp_half_inv_.resize(nm);
    phi_half_.resize(nm);
    f1_.resize(nm);
    f2_.resize(nm);
    f3_.resize(nm);
    ik_.resize(nm);
    dealias_cut_ = cfg.dealias ? g.n / 3 : g.n / 2;

    for (std::int64_t j = 0; j < nm; ++j) {
        const double k = g.wavenumber(j);
        // -H d^2/dx^2 has symbol i k|k| under the +i sgn(k) Hilbert convention
        double omega = k * std::abs(k);
        if (flow.kind != FlowSpec::Kind::bo) omega = k * (std::abs(k) + 1.0);
        if (flow.kind == FlowSpec::Kind::bo) omega += cfg.frame_speed * k;
        const cplx z = cplx(0.0, omega * cfg.dt);
        exp_full_[j] = std::exp(z);
        exp_half_[j] = std::exp(0.5 * z);
        exp_half_inv_[j] = std::exp(-0.5 * z);
        phi_half_[j] = 0.5 * cfg.dt * phi1(0.5 * z);
        f1_[j] = cfg.dt * etd_f1(z);
        f2_[j] = cfg.dt * etd_f2(z);
        f3_[j] = cfg.dt * etd_f3(z);
        ik_[j] = k;
    }
    ik_.back() = 0.0;  // odd multiplier: zero the Nyquist mode
    // the Nyquist bin of a real field must stay real: propagate it as constant
    const std::size_t ny = static_cast<std::size_t>(nm - 1);
    exp_full_[ny] = exp_half_[ny] = exp_half_inv_[ny] = 1.0;
    phi_half_[ny] = 0.5 * cfg.dt;
    f1_[ny] = f3_[ny] = cfg.dt / 6.0;
    f2_[ny] = cfg.dt / 6.0;

    if (flow.kind != FlowSpec::Kind::bo) {
        q_ = soliton(SolitonParams{1.0, 0.0}, g);
        qp_ = soliton_derivative(SolitonParams{1.0, 0.0}, g);
        q_spec_ = to_spectrum(q_);
        qp_spec_ = to_spectrum(qp_);
        lqpp_ = apply_L(soliton_second_derivative(SolitonParams{1.0, 0.0}, g));
        int_qp2_ = closed_form_integrals().int_Qp2;
    }
}

void Integrator::nonlinear(const Spectrum& state, Spectrum& out, double* beta_out) const {
    Spectrum trunc = state;
    for (std::int64_t j = dealias_cut_ + 1; j < grid_.num_modes(); ++j)
        trunc.c[static_cast<std::size_t>(j)] = 0.0;
    Field u = to_field(trunc);

    Field prod(grid_);
    double beta = 0.0;
    switch (flow_.kind) {
        case FlowSpec::Kind::bo:
            for (std::size_t j = 0; j < prod.size(); ++j)
                prod.values[j] = 0.5 * u.values[j] * u.values[j];
            break;
        case FlowSpec::Kind::linear_w: {
            for (std::size_t j = 0; j < prod.size(); ++j)
                prod.values[j] = q_.values[j] * u.values[j];
            if (flow_.beta_mode == BetaMode::closed_loop) {
                // (int (Q')^2) beta = int w L(Q''); enforces d/dt int w Q' = 0
                beta = inner(u, lqpp_) / int_qp2_;
            }
            break;
        }
        case FlowSpec::Kind::eta:
            for (std::size_t j = 0; j < prod.size(); ++j)
                prod.values[j] = q_.values[j] * u.values[j] + 0.5 * u.values[j] * u.values[j];
            break;
    }
    Spectrum ps = to_spectrum(prod);

    out = Spectrum(grid_);
    const double rho_term = flow_.rho_dot - 1.0;
    for (std::int64_t j = 0; j < grid_.num_modes(); ++j) {
        const auto js = static_cast<std::size_t>(j);
        cplx v = cplx(0.0, -ik_[js]) * ps.c[js];
        if (j > dealias_cut_) v = 0.0;
        if (flow_.kind == FlowSpec::Kind::linear_w && beta != 0.0) v += beta * qp_spec_.c[js];
        if (flow_.kind == FlowSpec::Kind::eta && rho_term != 0.0)
            v += rho_term * (cplx(0.0, ik_[js]) * (q_spec_.c[js] + state.c[js]));
        out.c[js] = v;
    }
    if (beta_out) *beta_out = beta;
}

Spectrum Integrator::step(const Spectrum& state, double* beta_out) const {
    const std::size_t nm = state.c.size();
    Spectrum n1(grid_), n2(grid_), n3(grid_), n4(grid_);
    Spectrum a(grid_), b(grid_), c(grid_);

    nonlinear(state, n1, beta_out);
    if (cfg_.scheme == Scheme::etd_rk4) {
        for (std::size_t j = 0; j < nm; ++j)
            a.c[j] = exp_half_[j] * state.c[j] + phi_half_[j] * n1.c[j];
        nonlinear(a, n2, nullptr);
        for (std::size_t j = 0; j < nm; ++j)
            b.c[j] = exp_half_[j] * state.c[j] + phi_half_[j] * n2.c[j];
        nonlinear(b, n3, nullptr);
        for (std::size_t j = 0; j < nm; ++j)
            c.c[j] = exp_half_[j] * a.c[j] + phi_half_[j] * (2.0 * n3.c[j] - n1.c[j]);
        nonlinear(c, n4, nullptr);
        Spectrum out(grid_);
        for (std::size_t j = 0; j < nm; ++j)
            out.c[j] = exp_full_[j] * state.c[j] + f1_[j] * n1.c[j] +
                       2.0 * f2_[j] * (n2.c[j] + n3.c[j]) + f3_[j] * n4.c[j];
        return out;
    }

    // integrating-factor classical RK4
    const double dt = cfg_.dt;
    for (std::size_t j = 0; j < nm; ++j)
        a.c[j] = exp_half_[j] * (state.c[j] + 0.5 * dt * n1.c[j]);
    nonlinear(a, n2, nullptr);
    for (std::size_t j = 0; j < nm; ++j)
        b.c[j] = exp_half_[j] * state.c[j] + 0.5 * dt * n2.c[j];
    nonlinear(b, n3, nullptr);
    for (std::size_t j = 0; j < nm; ++j)
        c.c[j] = exp_full_[j] * state.c[j] + dt * exp_half_[j] * n3.c[j];
    nonlinear(c, n4, nullptr);
    Spectrum out(grid_);
    for (std::size_t j = 0; j < nm; ++j)
        out.c[j] = exp_full_[j] * (state.c[j] + dt / 6.0 * n1.c[j]) +
                   dt / 3.0 * exp_half_[j] * (n2.c[j] + n3.c[j]) + dt / 6.0 * n4.c[j];
    return out;
}

Field Integrator::step(const Field& state, double* beta_out) const {
    if (!(state.grid == grid_)) throw std::invalid_argument("stepper: grid mismatch");
    return to_field(step(to_spectrum(state), beta_out));
}

Field step_bo(const Field& u, const StepperConfig& cfg) {
    return Integrator(u.grid, cfg, FlowSpec{FlowSpec::Kind::bo}).step(u);
}

Field step_linearized_w(const Field& w, BetaMode beta_mode, const StepperConfig& cfg) {
    FlowSpec flow;
    flow.kind = FlowSpec::Kind::linear_w;
    flow.beta_mode = beta_mode;
    return Integrator(w.grid, cfg, flow).step(w);
}

Field step_eta(const Field& eta, double rho_dot, const StepperConfig& cfg) {
    FlowSpec flow;
    flow.kind = FlowSpec::Kind::eta;
    flow.rho_dot = rho_dot;
    return Integrator(eta.grid, cfg, flow).step(eta);
}

std::pair<double, double> invariants(const Field& u) {
    const double mass = inner(u, u);
    Field ux = derivative(u);
    Field hu = hilbert(u);
    double energy = inner(ux, hu) - integrate(u * u * u) / 3.0;
    return {mass, energy};
}

Trajectory run(const Field& u0, double T, const StepperConfig& cfg, double cadence,
               const FlowSpec& flow) {
    if (!(T > 0.0) || !(cadence > 0.0)) throw std::invalid_argument("run: T and cadence must be positive");
    const auto per = static_cast<std::int64_t>(std::llround(cadence / cfg.dt));
    if (per < 1 || std::abs(cadence - per * cfg.dt) > 1e-9 * cfg.dt)
        throw std::invalid_argument("run: cadence must be an integer multiple of dt");
    const auto nsteps = static_cast<std::int64_t>(std::llround(T / cfg.dt));

    Integrator integ(u0.grid, cfg, flow);
    Trajectory traj;
    traj.cfg = cfg;
    traj.flow = flow;

    auto record = [&](double t, const Field& u) {
        traj.times.push_back(t);
        traj.snapshots.push_back(u);
        traj.invariant_series.push_back(invariants(u));
        // beta is a functional of the snapshot itself
        if (flow.kind == FlowSpec::Kind::linear_w) traj.beta_series.push_back(beta_from_w(u));
    };

    Spectrum state = to_spectrum(u0);
    record(0.0, u0);

    for (std::int64_t i = 1; i <= nsteps; ++i) {
        state = integ.step(state);
        if (i % per == 0 || (i == nsteps && nsteps % per != 0)) {
            Field u = to_field(state);
            double sup = 0.0;
            bool finite = true;
            for (double v : u.values) {
                if (!std::isfinite(v)) {
                    finite = false;
                    break;
                }
                sup = std::max(sup, std::abs(v));
            }
            if (!finite || sup > 1e6) {
                traj.aborted = true;
                traj.abort_reason = finite ? "blowup detected: sup |u| = " + std::to_string(sup) +
                                                 " at t = " + std::to_string(i * cfg.dt)
                                           : "blowup detected: non-finite values at t = " +
                                                 std::to_string(i * cfg.dt);
                break;
            }
            record(i * cfg.dt, u);
        }
    }
    return traj;
}

}  // namespace bo
