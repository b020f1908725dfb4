#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "grid.hpp"

namespace bo {

// Half-complex spectrum of a real field: raw r2c sums
//   c[m] = sum_j f_j exp(-2*pi*i*j*m/n),  m = 0..n/2.
// Negative modes are implicit conjugates. Multipliers act on this
// representation; realness is preserved by construction for real-even
// multipliers and for i-odd multipliers with the Nyquist bin zeroed.
struct Spectrum {
    Grid grid;
    std::vector<std::complex<double>> c;

    Spectrum() = default;
    explicit Spectrum(const Grid& g) : grid(g), c(static_cast<std::size_t>(g.num_modes()), {0.0, 0.0}) {}
};

// Cached FFTW plans per transform size. Plan creation is serialized;
// execution is safe for concurrent use on distinct buffers.
Spectrum to_spectrum(const Field& f);
Field to_field(const Spectrum& s);

}  // namespace bo
