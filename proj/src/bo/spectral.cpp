#include "spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "profiles.hpp"

namespace bo {

Field apply_multiplier(const Field& f, const std::function<std::complex<double>(double)>& m,
                       bool zero_nyquist) {
    Spectrum s = to_spectrum(f);
    const std::int64_t nm = f.grid.num_modes();
    for (std::int64_t j = 0; j < nm; ++j)
        s.c[static_cast<std::size_t>(j)] *= m(f.grid.wavenumber(j));
    if (zero_nyquist) s.c.back() = 0.0;
    return to_field(s);
}

Field hilbert(const Field& f) {
    Spectrum s = to_spectrum(f);
    const std::complex<double> i_unit(0.0, 1.0);
    for (std::size_t j = 1; j + 1 < s.c.size(); ++j) s.c[j] *= i_unit;
    s.c.front() = 0.0;  // sgn(0) = 0
    s.c.back() = 0.0;   // Nyquist has no unambiguous sign
    return to_field(s);
}

Field derivative(const Field& f, int order) {
    if (order < 1) throw std::invalid_argument("derivative: order must be >= 1");
    Spectrum s = to_spectrum(f);
    const std::complex<double> i_unit(0.0, 1.0);
    for (std::int64_t j = 0; j < f.grid.num_modes(); ++j) {
        std::complex<double> mul = std::pow(i_unit * f.grid.wavenumber(j),
                                            static_cast<double>(order));
        s.c[static_cast<std::size_t>(j)] *= mul;
    }
    if (order % 2 == 1) s.c.back() = 0.0;
    return to_field(s);
}

Field frac_deriv(const Field& f, double s) {
    if (s < 0.0) throw std::invalid_argument("frac_deriv: s must be >= 0");
    if (s == 0.0) return f;
    Spectrum sp = to_spectrum(f);
    for (std::int64_t j = 0; j < f.grid.num_modes(); ++j)
        sp.c[static_cast<std::size_t>(j)] *= std::pow(std::abs(f.grid.wavenumber(j)), s);
    return to_field(sp);
}

Field helmholtz_smooth(const Field& f, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("helmholtz_smooth: gamma must be positive");
    return apply_multiplier(
        f, [gamma](double k) { return std::complex<double>(1.0 / (1.0 + gamma * k * k), 0.0); },
        false);
}

Field poisson_extension(const Field& f, double y) {
    if (y < 0.0) throw std::invalid_argument("poisson_extension: y must be >= 0");
    if (y == 0.0) return f;
    return apply_multiplier(
        f, [y](double k) { return std::complex<double>(std::exp(-y * std::abs(k)), 0.0); },
        false);
}

Field translate(const Field& f, double a) {
    Spectrum s = to_spectrum(f);
    const std::int64_t nm = f.grid.num_modes();
    for (std::int64_t j = 0; j + 1 < nm; ++j) {
        const double k = f.grid.wavenumber(j);
        s.c[static_cast<std::size_t>(j)] *= std::complex<double>(std::cos(k * a), std::sin(k * a));
    }
    // Nyquist carries only a cosine mode for real data
    s.c.back() *= std::cos(f.grid.nyquist() * a);
    return to_field(s);
}

double mean(const Field& f) { return integrate(f) / f.grid.length; }

Field remove_mean(const Field& f) {
    Field out = f;
    const double mu = mean(f);
    for (double& v : out.values) v -= mu;
    return out;
}

double spectral_norm(const Field& f, const std::function<double(double)>& w) {
    Spectrum s = to_spectrum(f);
    const std::int64_t n = f.grid.n;
    double acc = w(0.0) * std::norm(s.c.front());
    for (std::int64_t j = 1; j < n / 2; ++j)
        acc += 2.0 * w(f.grid.wavenumber(j)) * std::norm(s.c[static_cast<std::size_t>(j)]);
    acc += w(f.grid.nyquist()) * std::norm(s.c.back());
    // h/n scaling makes w == 1 coincide with the trapezoid L2 norm
    return std::sqrt(acc * f.grid.spacing() / static_cast<double>(n));
}

double sobolev_norm(const Field& f, double s, bool homogeneous) {
    if (s < 0.0 || s > 2.0) throw std::invalid_argument("sobolev_norm: s must lie in [0,2]");
    if (homogeneous)
        return spectral_norm(f, [s](double k) { return std::pow(std::abs(k), 2.0 * s); });
    return spectral_norm(f, [s](double k) { return std::pow(1.0 + k * k, s); });
}

double l4_norm(const Field& f) {
    double acc = 0.0;
    for (double v : f.values) acc += v * v * v * v;
    return std::pow(acc * f.grid.spacing(), 0.25);
}

Spectrum dealias(Spectrum s) {
    const std::int64_t cut = s.grid.n / 3;
    for (std::int64_t j = cut + 1; j < s.grid.num_modes(); ++j)
        s.c[static_cast<std::size_t>(j)] = 0.0;
    return s;
}

Field dealias(const Field& f) { return to_field(dealias(to_spectrum(f))); }

Field dealiased_product(const Field& a, const Field& b) {
    require_same_grid(a, b);
    return to_field(dealias(to_spectrum(dealias(a) * dealias(b))));
}

double gn_ratio(const Field& f) {
    const double l2 = l2_norm(f);
    if (l2 == 0.0) return 0.0;
    const double dh = sobolev_norm(f, 0.5, /*homogeneous=*/true);
    if (dh == 0.0) return 0.0;
    const double l4 = l4_norm(f);
    return l4 * l4 / (l2 * dh);
}

double commutator_defect(const Field& f, const Field& g, double s) {
    if (s != 0.5 && s != 1.0) throw std::invalid_argument("commutator_defect: s must be 1/2 or 1");
    Field lhs = frac_deriv(f * g, s) - g * frac_deriv(f, s);
    const double denom = l4_norm(f) * l4_norm(frac_deriv(g, s));
    if (denom == 0.0) return 0.0;
    return l2_norm(lhs) / denom;
}

double green_identity_residual(const Field& u, double A, double y_max, int n_layers) {
    if (!(A > 1.0)) throw std::invalid_argument("green_identity_residual: A must exceed 1");
    if (!(y_max > 0.0) || n_layers <= 0)
        throw std::invalid_argument("green_identity_residual: y_max and n_layers must be positive");

    const Grid& g = u.grid;
    const WeightParams w{A, 0.0};
    Field phip = phi_prime(w, g);
    Field hphipp = sample(g, [A](double x) { return hilbert_phi_second_closed(A, x); });

    const double lhs = inner(hilbert(derivative(u)), u * phip);

    // layered quadrature for iint |grad U|^2 Phi, Phi(x,y) the harmonic
    // extension of phi' (a Lorentzian of scale A + y); composite Simpson
    // when the layer count is even, trapezoid otherwise
    Spectrum base = to_spectrum(u);
    const double dy = y_max / static_cast<double>(n_layers);
    const bool simpson = (n_layers % 2 == 0);
    double bulk = 0.0;
    for (int layer = 0; layer <= n_layers; ++layer) {
        const double y = dy * layer;
        Spectrum sx = base, sy = base;
        for (std::int64_t j = 0; j < g.num_modes(); ++j) {
            const double k = g.wavenumber(j);
            const double damp = std::exp(-y * k);
            sx.c[static_cast<std::size_t>(j)] *= std::complex<double>(0.0, k) * damp;
            sy.c[static_cast<std::size_t>(j)] *= -k * damp;
        }
        sx.c.back() = 0.0;
        Field ux = to_field(sx);
        Field uy = to_field(sy);
        Field phi_layer = sample(g, [A, y](double x) {
            const double ay = A + y;
            return ay / (x * x + ay * ay);
        });
        const double slab = integrate((ux * ux + uy * uy) * phi_layer);
        double weight;
        if (simpson)
            weight = (layer == 0 || layer == n_layers) ? 1.0 / 3.0
                     : (layer % 2 == 1)                ? 4.0 / 3.0
                                                       : 2.0 / 3.0;
        else
            weight = (layer == 0 || layer == n_layers) ? 0.5 : 1.0;
        bulk += weight * slab;
    }
    bulk *= dy;

    const double rhs = -bulk + 0.5 * inner(u * u, hphipp);
    return std::abs(lhs - rhs);
}

}  // namespace bo
