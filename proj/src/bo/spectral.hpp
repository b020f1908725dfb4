#pragma once

#include <complex>
#include <functional>

#include "fft.hpp"
#include "grid.hpp"

namespace bo {

// Fourier-multiplier calculus on the periodic grid. All operations are
// pure; fields are immutable values.
//
// Sign convention: the Hilbert transform has symbol +i*sgn(k), so that
// D = -H d/dx has symbol |k| and  int u_x H u = || D^{1/2} u ||_L2^2 >= 0.

// multiplier m(k) applied on the half spectrum; m must map the implicit
// negative modes to conjugates (real-even or imaginary-odd symbols).
Field apply_multiplier(const Field& f, const std::function<std::complex<double>(double)>& m,
                       bool zero_nyquist);

Field hilbert(const Field& f);
Field derivative(const Field& f, int order = 1);
Field frac_deriv(const Field& f, double s);
Field helmholtz_smooth(const Field& f, double gamma);
Field poisson_extension(const Field& f, double y);

// f(. + a) realized as a spectral phase shift; exact on band-limited data.
Field translate(const Field& f, double a);

double mean(const Field& f);
Field remove_mean(const Field& f);

// sqrt( sum w(k) |fhat|^2 ) with Parseval scaling such that w == 1 gives the
// trapezoid L2 norm exactly.
double spectral_norm(const Field& f, const std::function<double(double)>& w);

// s in [0,2]; inhomogeneous weight (1+k^2)^s, homogeneous |k|^(2s)
double sobolev_norm(const Field& f, double s, bool homogeneous = false);

double l4_norm(const Field& f);

// 2/3-rule dealiasing: zero modes with index > n/3
Spectrum dealias(Spectrum s);
Field dealias(const Field& f);
Field dealiased_product(const Field& a, const Field& b);

// || f ||_L4^2 / ( ||f||_L2 * ||D^{1/2} f||_L2 ); 0 for f == 0
double gn_ratio(const Field& f);

// || D^s(fg) - g D^s f ||_L2 / ( ||f||_L4 * ||D^s g||_L4 );  s in {1/2, 1}
double commutator_defect(const Field& f, const Field& g, double s);

// Discrepancy of the half-plane energy identity
//   int (H u_x) u phi'  =  - iint_{y>0} |grad U|^2 Phi + 1/2 int u^2 (H phi'')
// with U the harmonic extension of u and Phi the explicit extension of
// phi' for the arctan weight of scale A. The half-plane integral is
// approximated by n_layers trapezoid layers up to y_max.
double green_identity_residual(const Field& u, double A, double y_max, int n_layers);

}  // namespace bo
