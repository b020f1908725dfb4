#pragma once

#include <stdexcept>
#include <vector>

#include "evolution.hpp"
#include "grid.hpp"
#include "profiles.hpp"

namespace bo {

// Raised when a decomposition cannot be computed: data outside the soliton
// tube, Newton non-convergence, or colliding centers.
struct modulation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModulationState {
    double rho = 0.0;
    double c = 1.0;
    Field eta;               // residual in the soliton frame: u(x+rho) - Q_c(x)
    double ortho_defect = 0.0;
    int newton_iters = 0;
};

// Translation fit at fixed scale: Newton on
//   I(y) = int Q_c'(x) (u(x+y) - Q_c(x)) dx = 0,
// translations realized spectrally. Fails (modulation_error) outside the
// tube ||u - Q_c(.-guess)||_L2 > 0.5 ||Q_c||_L2 or after 25 iterations.
ModulationState fit_translation(const Field& u, double c, double rho_guess);

// Joint (c, rho) fit enforcing int Q_c eta = int Q_c' eta = 0.
ModulationState fit_scale_translation(const Field& u, double c_guess, double rho_guess);

// Q_c(.-rho) + eta(.-rho); reproduces the decomposed field
Field recompose(const ModulationState& s, const Grid& g);

// rho' = c + [ int eta L_c(Q_c'') - 1/2 int eta^2 Q_c'' ]
//            / [ int (Q_c')^2 - int eta Q_c'' ]
double rho_dot_estimate(const ModulationState& s);

// c+ from the weighted mass in the rightward region x > t/10: running max
// over the final third of the time window, normalized by pi * int Q^2.
double estimate_c_plus(const Trajectory& traj, double A);

// 2N-dimensional Newton solve for (c_j, rho_j) enforcing
// int R_j eta = int (R_j)_x eta = 0 with eta = u - sum R_j.
std::vector<ModulationState> multisoliton_decompose(const Field& u,
                                                    const std::vector<SolitonParams>& guesses,
                                                    double min_gap = 20.0);

}  // namespace bo
