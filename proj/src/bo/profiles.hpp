#pragma once

#include <vector>

#include "grid.hpp"

namespace bo {

// Soliton Q_c(x - x0) with Q(x) = 4/(1+x^2), Q_c(x) = c Q(c x).
struct SolitonParams {
    double c = 1.0;
    double x0 = 0.0;
};

// Arctan weight phi_A(x - shift), phi_A(x) = pi/2 + arctan(x/A), A > 1.
struct WeightParams {
    double A = 20.0;
    double shift = 0.0;
};

// ---- closed-form scalar profiles -------------------------------------

double soliton_value(double c, double x);         // c Q(c x)
double soliton_deriv(double c, double x);         // d/dx
double soliton_second_deriv(double c, double x);  // d^2/dx^2
double soliton_dc(double c, double x);            // d/dc Q_c = Q(cx) + cx Q'(cx)

Field soliton(const SolitonParams& p, const Grid& g);
Field soliton_derivative(const SolitonParams& p, const Grid& g);
Field soliton_second_derivative(const SolitonParams& p, const Grid& g);
Field soliton_scale_derivative(const SolitonParams& p, const Grid& g);

// S = (xQ)' = Q^2/2 - Q,  T = S - Q,
// f0 = Q + (1+sqrt5)/4 Q^2,  f1 = Q + (1-sqrt5)/4 Q^2
Field profile_S(const Grid& g);
Field profile_T(const Grid& g);
Field profile_f0(const Grid& g);
Field profile_f1(const Grid& g);

// ---- arctan weight family ---------------------------------------------

double phi_value(double A, double x);   // pi/2 + arctan(x/A)
double phi_d1(double A, double x);      // A/(A^2+x^2)
double phi_d2(double A, double x);
double phi_d3(double A, double x);

Field phi_weight(const WeightParams& p, const Grid& g);
Field phi_prime(const WeightParams& p, const Grid& g);
Field phi_second(const WeightParams& p, const Grid& g);
Field phi_third(const WeightParams& p, const Grid& g);

// closed forms of H phi' and H phi'' (shift = 0 weights):
//   H phi'  = -x/(A^2+x^2),   H phi'' = (1/A) phi' - 2 (phi')^2
double hilbert_phi_prime_closed(double A, double x);
double hilbert_phi_second_closed(double A, double x);
struct HilbertPhiOracle {
    Field h_phi_prime;
    Field h_phi_second;
};
HilbertPhiOracle hilbert_phi_oracle(const WeightParams& p, const Grid& g);

// Kernel K_phi(x,y) of the weighted symmetrized Hilbert form. Bounded and
// symmetric; near the diagonal (|x-y| < 1e-3 A) the raw quotient cancels
// catastrophically and a Taylor-regularized form with midpoint phi''' is
// used instead; the diagonal value is -phi'''(x)/6.
double kernel_K_phi(double x, double y, const WeightParams& p);

// Superposition of well-separated solitons; centers must increase with
// pairwise gaps >= min_gap. Empty list gives the zero field.
Field multisoliton_sum(const std::vector<SolitonParams>& params, const Grid& g,
                       double min_gap = 20.0);

// Exact integral table for Q. The values are frozen constants; tests
// re-derive them by high-resolution quadrature before trusting them.
struct ClosedFormIntegrals {
    double int_Q;        // 4 pi
    double int_Q2;       // 8 pi
    double int_Q3;       // 24 pi
    double int_Q4;       // 80 pi
    double int_Qp2;      // int (Q')^2 = int S^2 = 4 pi
    double energy_Q;     // E(Q) = -4 pi
};
ClosedFormIntegrals closed_form_integrals();

// Maximum absolute disagreement between the table and quadrature on the
// given grid (int Q gets an analytic 1/x^2 tail correction; all other
// integrands decay fast enough for plain quadrature).
double verify_closed_form_integrals(const Grid& g);

}  // namespace bo
