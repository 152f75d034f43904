#include "decaylab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

// FFTW planning is not thread-safe; executing an existing plan on new arrays is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(const GridSpec& grid, int sign) {
        const auto key = std::make_tuple(grid.dim(), grid.points(0), grid.dim() == 2 ? grid.points(1) : 1, sign);
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        const std::size_t n = grid.size();
        fftw_complex* in = fftw_alloc_complex(n);
        fftw_complex* out = fftw_alloc_complex(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p = grid.dim() == 1
                          ? fftw_plan_dft_1d(static_cast<int>(grid.points(0)), in, out, sign, flags)
                          : fftw_plan_dft_2d(static_cast<int>(grid.points(0)), static_cast<int>(grid.points(1)), in,
                                             out, sign, flags);
        fftw_free(in);
        fftw_free(out);
        if (!p) throw std::runtime_error("FFTW planning failed");
        plans_.emplace(key, p);
        return p;
    }

    ~PlanCache() {
        for (auto& [key, p] : plans_) fftw_destroy_plan(p);
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, std::size_t, std::size_t, int>, fftw_plan> plans_;
};

std::vector<cplx> execute(const GridSpec& grid, std::span<const cplx> data, int sign) {
    if (data.size() != grid.size()) throw std::invalid_argument("fft: data size does not match grid");
    fftw_plan p = PlanCache::instance().get(grid, sign);
    std::vector<cplx> in(data.begin(), data.end());
    std::vector<cplx> out(data.size());
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

std::vector<double> wavenumbers(const GridSpec& grid, int axis) {
    const std::size_t n = grid.points(axis);
    const double k0 = 2.0 * std::numbers::pi / grid.extent(axis);
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<double>(j);
        k[j] = (j < (n + 1) / 2 ? jj : jj - static_cast<double>(n)) * k0;
    }
    return k;
}

bool is_nyquist(const GridSpec& grid, int axis, std::size_t index) {
    const std::size_t n = grid.points(axis);
    return n % 2 == 0 && index == n / 2;
}

std::vector<cplx> fft_forward(const GridSpec& grid, std::span<const cplx> values) {
    return execute(grid, values, FFTW_FORWARD);
}

std::vector<cplx> fft_inverse(const GridSpec& grid, std::span<const cplx> spectrum) {
    auto out = execute(grid, spectrum, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (auto& v : out) v *= scale;
    return out;
}

SampledField apply_multiplier(const SampledField& field, const Multiplier& m) {
    const GridSpec& g = field.grid();
    auto spec = fft_forward(g, field.values());
    const auto k0 = wavenumbers(g, 0);
    if (g.dim() == 1) {
        for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= m(k0[j], 0.0);
    } else {
        const auto k1 = wavenumbers(g, 1);
        const std::size_t n1 = g.points(1);
        for (std::size_t i = 0; i < g.points(0); ++i)
            for (std::size_t j = 0; j < n1; ++j) spec[i * n1 + j] *= m(k0[i], k1[j]);
    }
    return SampledField(g, fft_inverse(g, spec), FieldKind::Complex);
}

SampledField spectral_derivative(const SampledField& field, int order, int axis) {
    if (order < 0 || order > 6) throw RangeError("spectral_derivative: order must be in [0, 6]");
    const GridSpec& g = field.grid();
    if (axis < 0 || axis >= g.dim()) throw RangeError("spectral_derivative: axis out of range");
    if (order == 0) return field;
    auto spec = fft_forward(g, field.values());
    const auto k = wavenumbers(g, axis);
    const std::size_t n1 = g.dim() == 2 ? g.points(1) : 1;
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        const std::size_t j = axis == 0 ? idx / n1 : idx % n1;
        if (order % 2 == 1 && is_nyquist(g, axis, j)) {
            spec[idx] = 0.0;
            continue;
        }
        cplx factor = 1.0;
        for (int o = 0; o < order; ++o) factor *= cplx(0.0, k[j]);
        spec[idx] *= factor;
    }
    return SampledField(g, fft_inverse(g, spec), FieldKind::Complex);
}

double l2_norm_spectral(const SampledField& field) {
    const auto spec = fft_forward(field.grid(), field.values());
    double sum = 0.0;
    for (const auto& v : spec) sum += std::norm(v);
    return std::sqrt(sum * field.grid().cell_volume() / static_cast<double>(field.size()));
}

}  // namespace decaylab
