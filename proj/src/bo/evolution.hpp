#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"
#include "grid.hpp"

namespace bo {

enum class Scheme { etd_rk4, if_rk4 };
enum class BetaMode { closed_loop, zero };

struct StepperConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::etd_rk4;
    bool dealias = true;
    double frame_speed = 0.0;  // 0 = lab frame; c keeps a speed-c soliton centered
};

// Which flow the integrator advances:
//   bo:        u_t + H u_xx + u u_x = 0          (+ frame shift)
//   linear_w:  w_t = (L w)_x + beta(t) Q'
//   eta:       eta_t = (L eta - eta^2/2)_x + (rho' - 1)(Q + eta)_x
struct FlowSpec {
    enum class Kind { bo, linear_w, eta };
    Kind kind = Kind::bo;
    BetaMode beta_mode = BetaMode::closed_loop;
    double rho_dot = 1.0;
};

struct blowup_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exponential/integrating-factor RK4 with the linear multiplier handled
// exactly; the quadratic terms are dealiased by the 2/3 rule.
class Integrator {
  public:
    Integrator(const Grid& g, const StepperConfig& cfg, const FlowSpec& flow);

    // advances one step; beta_out (linear_w flow) reports the stage-1 beta
    Spectrum step(const Spectrum& state, double* beta_out = nullptr) const;
    Field step(const Field& state, double* beta_out = nullptr) const;

    const Grid& grid() const { return grid_; }
    const StepperConfig& config() const { return cfg_; }

  private:
    void nonlinear(const Spectrum& state, Spectrum& out, double* beta_out) const;

    Grid grid_;
    StepperConfig cfg_;
    FlowSpec flow_;
    std::vector<std::complex<double>> exp_full_, exp_half_, exp_half_inv_;
    std::vector<std::complex<double>> phi_half_, f1_, f2_, f3_;  // ETDRK4 tables (x dt)
    std::vector<double> ik_;  // imaginary parts of ik, Nyquist zeroed
    Field q_, qp_, lqpp_;
    Spectrum qp_spec_, q_spec_;
    double int_qp2_ = 0.0;
    std::int64_t dealias_cut_ = 0;
};

Field step_bo(const Field& u, const StepperConfig& cfg);
Field step_linearized_w(const Field& w, BetaMode beta_mode, const StepperConfig& cfg);
Field step_eta(const Field& eta, double rho_dot, const StepperConfig& cfg);

// mass = int u^2, energy = int (u_x H u - u^3/3)
std::pair<double, double> invariants(const Field& u);

struct ModulationSample {
    double rho = 0.0;
    double c = 1.0;
    double eta_l2 = 0.0;
};

struct Trajectory {
    StepperConfig cfg;
    FlowSpec flow;
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<std::pair<double, double>> invariant_series;
    std::vector<double> beta_series;                   // linear_w runs
    std::vector<ModulationSample> modulation_series;   // filled by the lab layer
    bool aborted = false;
    std::string abort_reason;

    double frame_speed() const { return cfg.frame_speed; }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

// Repeated stepping with snapshots every `cadence` time units; cadence must
// be an integer multiple of dt. Blowup (NaN or sup-norm above 1e6, checked
// at snapshot times) aborts and returns the partial trajectory.
Trajectory run(const Field& u0, double T, const StepperConfig& cfg, double cadence,
               const FlowSpec& flow = {});

}  // namespace bo
