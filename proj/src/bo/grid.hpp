#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bo {

// Uniform periodic grid on [-length/2, length/2). Two grids are
// interchangeable iff (n, length) match; every binary field operation
// requires that.
struct Grid {
    std::int64_t n = 0;
    double length = 0.0;

    double spacing() const { return length / static_cast<double>(n); }
    double node(std::int64_t j) const { return -0.5 * length + spacing() * static_cast<double>(j); }
    // wavenumber of half-spectrum bin m, m in [0, n/2]
    double wavenumber(std::int64_t m) const {
        return 2.0 * std::numbers::pi * static_cast<double>(m) / length;
    }
    std::int64_t num_modes() const { return n / 2 + 1; }
    double nyquist() const { return wavenumber(n / 2); }

    bool operator==(const Grid&) const = default;
};

inline Grid make_grid(std::int64_t n, double length) {
    if (n < 16 || n % 2 != 0) throw std::invalid_argument("grid: n must be even and >= 16");
    if (!(length > 0.0)) throw std::invalid_argument("grid: length must be positive");
    return Grid{n, length};
}

// Real-valued samples on a Grid. Value semantics; all operations return
// fresh fields and never mutate their inputs.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), values(static_cast<std::size_t>(g.n), 0.0) {}

    double& operator[](std::size_t j) { return values[j]; }
    double operator[](std::size_t j) const { return values[j]; }
    std::size_t size() const { return values.size(); }
};

inline void require_same_grid(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field: grid mismatch");
}

template <typename F>
Field sample(const Grid& g, F&& f) {
    Field out(g);
    for (std::int64_t j = 0; j < g.n; ++j) out.values[static_cast<std::size_t>(j)] = f(g.node(j));
    return out;
}

inline Field zeros(const Grid& g) { return Field(g); }

// compensated accumulation keeps million-node quadratures at rounding level
struct KahanSum {
    double sum = 0.0, carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// trapezoidal quadrature; exact spectral quadrature on the torus
inline double integrate(const Field& f) {
    KahanSum s;
    for (double v : f.values) s.add(v);
    return s.sum * f.grid.spacing();
}

inline double inner(const Field& a, const Field& b) {
    require_same_grid(a, b);
    KahanSum s;
    for (std::size_t j = 0; j < a.size(); ++j) s.add(a.values[j] * b.values[j]);
    return s.sum * a.grid.spacing();
}

inline double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

inline double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] += b.values[j];
    return out;
}

inline Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] -= b.values[j];
    return out;
}

// pointwise product (plain, undealiased; steppers use their own dealiased products)
inline Field operator*(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] *= b.values[j];
    return out;
}

inline Field operator*(double s, const Field& a) {
    Field out = a;
    for (double& v : out.values) v *= s;
    return out;
}

inline Field operator-(const Field& a) { return -1.0 * a; }

}  // namespace bo
