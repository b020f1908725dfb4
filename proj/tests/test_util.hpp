#pragma once

#include <cstdint>
#include <random>

#include "bo/fft.hpp"
#include "bo/grid.hpp"

namespace bo::testutil {

// small grid for cheap operator algebra
inline Grid small_grid() { return make_grid(1024, 400.0); }
// production dynamics grid
inline Grid default_grid() { return make_grid(4096, 400.0); }
// wide grid where the 1/x^2 profile tails are resolved to ~1e-5 residuals
inline Grid oracle_grid() { return make_grid(262144, 20000.0); }

// deterministic band-limited real field with |k| in [kmin, kmax]
inline Field random_bandlimited(const Grid& g, double kmin, double kmax, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    auto unit = [&eng]() { return (static_cast<double>(eng() >> 11) + 1.0) * 0x1p-53 - 0.5; };
    Spectrum s(g);
    for (std::int64_t j = 1; j + 1 < g.num_modes(); ++j) {
        const double k = g.wavenumber(j);
        if (k < kmin || k > kmax) continue;
        s.c[static_cast<std::size_t>(j)] = {unit(), unit()};
    }
    return to_field(s);
}

}  // namespace bo::testutil
