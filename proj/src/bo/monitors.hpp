#pragma once

#include <span>
#include <string>
#include <vector>

#include "evolution.hpp"
#include "grid.hpp"
#include "profiles.hpp"

namespace bo {

struct MonitorSeries {
    std::string label;
    std::vector<double> times;
    std::vector<double> values;
    double slack_budget = 0.0;
};

// int u^2 phi_A(x - shift)
double weighted_mass(const Field& u, const WeightParams& w);

// | d/dt (1/2 int u^2 phi) - int (H u_x)(u phi' + u_x phi) - 1/3 int u^3 phi'
//   + (s/2) int u^2 phi' |  with s the co-moving frame speed; centered
// differences at snapshot cadence, one value per interior sample.
MonitorSeries kato_residual(const Trajectory& traj, const WeightParams& w);

struct PairSample {
    double t1 = 0.0, t2 = 0.0;
    double lhs = 0.0, rhs = 0.0;  // inequality: lhs <= rhs + C/x0
};

struct MonotonicityReport {
    double x0 = 0.0, lambda = 0.0;
    WeightParams weight;
    std::vector<PairSample> pairs;
    double worst_violation = 0.0;  // max over pairs of (lhs - rhs)
    double c_meas = 0.0;           // max(0, worst_violation) * x0
};

// weighted mass right of the soliton is almost non-increasing:
//   int u^2(t2) phi(x - rho(t2) - x0)
//     <= int u^2(t1) phi(x - rho(t1) - lambda (t2-t1) - x0) + C/x0
MonotonicityReport monotonicity_right(const Trajectory& traj, std::span<const double> rho,
                                      double x0, double lambda, const WeightParams& w,
                                      std::size_t stride = 1);

// mirror inequality on the left; independent code path from the reflected
// variant below
MonotonicityReport monotonicity_left(const Trajectory& traj, std::span<const double> rho,
                                     double x0, double lambda, const WeightParams& w,
                                     std::size_t stride = 1);

// left monotonicity obtained by applying the right inequality to
// u(-t, -x) and using phi(x) + phi(-x) = pi; the exact mass difference of
// each pair enters the algebra, so this must agree with monotonicity_left
// to rounding.
MonotonicityReport monotonicity_left_reflected(const Trajectory& traj, std::span<const double> rho,
                                               double x0, double lambda, const WeightParams& w,
                                               std::size_t stride = 1);

struct EtaPairSample {
    double t1 = 0.0, t2 = 0.0;
    double lhs = 0.0, rhs = 0.0;
    double budget = 0.0;  // int ||eta||^2 / (x0 + lambda (t2 - t))^2 dt
};

struct EtaMonotonicityReport {
    double x0 = 0.0, lambda = 0.0;
    std::vector<EtaPairSample> pairs;
    double c_meas = 0.0;  // max over pairs of (lhs - rhs)/budget, clamped at 0
};

// residual-mass monotonicity with the difference weight
// phi(x - x0) - phi(-x0); eta fields live in the soliton frame
EtaMonotonicityReport eta_monotonicity(std::span<const Field> eta, std::span<const double> times,
                                       double x0, double lambda, const WeightParams& w,
                                       std::size_t stride = 1);

// sup over x and the (x0, dt) lists of
//   (x0 + lambda dt)^2 [ Q phi'(xbar) + |Q (phi(xbar) - phi(-(x0+lambda dt)))| ]
double decroissance_sup(const WeightParams& w, double lambda, std::span<const double> x0s,
                        std::span<const double> dts, const Grid& g);

// L2 norm of u - Q_c(.-rho) restricted to nodes x > t/10
double localized_distance(const Field& u, double c, double rho, double t);

// mass left behind between the 0.95 t and t/10 stations (decay diagnostic)
MonitorSeries left_region_mass_gap(const Trajectory& traj, std::span<const double> rho,
                                   const WeightParams& w);

struct VirialReport {
    double lhs = 0.0;            // int psi w^2(t2) - int psi w^2(t1)
    double rhs = 0.0;            // time integral of the instantaneous terms
    double residual = 0.0;
    double dhalf_integral = 0.0;  // accumulated D^{1/2} term (negative)
    double sawtooth_scale = 0.0;
};

// first-moment identity for the linear flow with x realized as the odd
// sawtooth A g(x/A), g = arctan, A = L/8; the instantaneous right-hand side
// is evaluated exactly in space and integrated by trapezoid in time
VirialReport virial_linear_w(const Trajectory& wtraj);

struct ProbeRow {
    double A = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;            // int u^2 phi'
    double ratio_times_A = 0.0;  // A * lhs / rhs (secondterm: A * |lhs| / rhs)
};

std::vector<ProbeRow> firstterm_probe(const Field& u, std::span<const double> A_list);
std::vector<ProbeRow> secondterm_probe(const Field& u, std::span<const double> A_list);

// int |eta|^3 phi' / ( ||eta||_{H^{1/2}} int eta^2 phi' ); 0 for eta == 0
double cubic_weight_bound(const Field& eta, const WeightParams& w);

// worst relative gap between int (H u_x) u_x phi and the kernel double
// integral (1/2pi) iint u(x) u(y) K_phi over a small Gaussian corpus; the
// spectral side needs a wide grid to suppress the periodization drift
double kernel_conformance_max_rel_err(double A, const Grid& g, int quad_points);

}  // namespace bo
