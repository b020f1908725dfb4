#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bo {
namespace {

struct Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::int64_t, Plans>& plan_cache() {
    static std::map<std::int64_t, Plans> cache;
    return cache;
}

// FFTW_ESTIMATE keeps plan selection deterministic across runs.
const Plans& plans_for(std::int64_t n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> cplx(static_cast<std::size_t>(n / 2 + 1));
    Plans p;
    p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(),
                                 reinterpret_cast<fftw_complex*>(cplx.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.inv = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                 reinterpret_cast<fftw_complex*>(cplx.data()), real.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

}  // namespace

Spectrum to_spectrum(const Field& f) {
    const auto& p = plans_for(f.grid.n);
    Spectrum s(f.grid);
    // r2c does not touch its input; copy only because the API is const.
    std::vector<double> in(f.values);
    fftw_execute_dft_r2c(p.fwd, in.data(), reinterpret_cast<fftw_complex*>(s.c.data()));
    return s;
}

Field to_field(const Spectrum& s) {
    const auto& p = plans_for(s.grid.n);
    Field f(s.grid);
    // 1-d c2r destroys its input; work on a copy.
    std::vector<std::complex<double>> in(s.c);
    fftw_execute_dft_c2r(p.inv, reinterpret_cast<fftw_complex*>(in.data()), f.values.data());
    const double scale = 1.0 / static_cast<double>(s.grid.n);
    for (double& v : f.values) v *= scale;
    return f;
}

}  // namespace bo
