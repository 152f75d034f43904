#include "decaylab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "decaylab/errors.hpp"
#include "decaylab/fft.hpp"

namespace decaylab {

namespace {

double smoothstep5(double u) { return u * u * u * (u * (6.0 * u - 15.0) + 10.0); }

double radius(const std::array<double, 2>& x, int dim) { return dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]); }

void check_grid(const SampledField& f, const DyadicPartition& partition) {
    if (!(f.grid() == partition.grid())) throw std::invalid_argument("x_norm: field and partition grids differ");
}

double sequence_norm(const std::vector<double>& seq, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : seq) m = std::max(m, v);
        return m;
    }
    double s = 0.0;
    for (double v : seq) s += std::pow(v, q);
    return std::pow(s, 1.0 / q);
}

}  // namespace

double dyadic_profile(double u) {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    if (u <= 0.0) return smoothstep5(u + 1.0);
    return 1.0 - smoothstep5(u);
}

Interval DyadicPartition::shell() const { return {std::ldexp(1.0, k_min_), std::ldexp(1.0, k_max_)}; }

std::pair<int, int> resolvable_window(const GridSpec& grid) {
    double h = 0.0, half = std::numeric_limits<double>::infinity();
    for (int a = 0; a < grid.dim(); ++a) {
        h = std::max(h, grid.spacing(a));
        half = std::min(half, 0.5 * grid.extent(a));
    }
    return {static_cast<int>(std::ceil(std::log2(4.0 * h))), static_cast<int>(std::floor(std::log2(half))) - 1};
}

DyadicPartition build_dyadic_partition(const GridSpec& grid, int k_min, int k_max) {
    if (k_min > k_max) throw RangeError("build_dyadic_partition: k_min > k_max");
    for (int a = 0; a < grid.dim(); ++a) {
        if (std::ldexp(1.0, k_min) < 4.0 * grid.spacing(a))
            throw RangeError("build_dyadic_partition: 2^k_min is below four grid spacings");
        if (std::ldexp(1.0, k_max + 1) > 0.5 * grid.extent(a))
            throw RangeError("build_dyadic_partition: 2^(k_max+1) exceeds the grid half-extent");
    }
    DyadicPartition p;
    p.grid_ = grid;
    p.k_min_ = k_min;
    p.k_max_ = k_max;
    const SampledField probe = SampledField::zeros(grid);
    std::vector<double> logr(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = radius(probe.point(i), grid.dim());
        logr[i] = r > 0.0 ? std::log2(r) : -std::numeric_limits<double>::infinity();
    }
    for (int k = k_min; k <= k_max; ++k) {
        std::vector<double> phi(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) phi[i] = dyadic_profile(logr[i] - k);
        p.bumps_.push_back(std::move(phi));
    }
    return p;
}

NormValue x_norm(const SampledField& f, double theta, double q, const DyadicPartition& partition) {
    check_grid(f, partition);
    if (!(q >= 1.0)) throw std::invalid_argument("x_norm: q must be >= 1");
    NormValue nv;
    nv.kind = NormKind::Xnorm;
    nv.parameter = theta;
    nv.q = q;
    nv.detail = kDyadicProfileId;
    nv.k_min = partition.k_min();
    nv.k_max = partition.k_max();
    const double cell = f.grid().cell_volume();
    std::vector<double> seq;
    for (int k = partition.k_min(); k <= partition.k_max(); ++k) {
        const auto& phi = partition.bump(k);
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (phi[i] != 0.0) s += phi[i] * phi[i] * std::norm(f[i]);
        seq.push_back(std::exp2(theta * k) * std::sqrt(s * cell));
    }
    nv.value = sequence_norm(seq, q);
    const Interval shell = partition.shell();
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double m = std::norm(f[i]);
        total += m;
        const double r = radius(f.point(i), f.grid().dim());
        if (r < shell.lo || r > shell.hi) outside += m;
    }
    nv.outside_fraction = total > 0.0 ? std::sqrt(outside / total) : 0.0;
    nv.truncated = nv.outside_fraction > 1e-10;
    return nv;
}

NormValue lp_norm(const SampledField& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    NormValue nv;
    nv.kind = NormKind::Lp;
    nv.parameter = p;
    if (std::isinf(p)) {
        nv.value = max_abs(f);
        return nv;
    }
    double s = 0.0;
    for (const auto& v : f.values()) s += std::pow(std::abs(v), p);
    nv.value = std::pow(s * f.grid().cell_volume(), 1.0 / p);
    return nv;
}

NormValue hs_norm(const SampledField& f, double s) {
    const GridSpec& g = f.grid();
    const auto spec = fft_forward(g, f.values());
    const auto k0 = wavenumbers(g, 0);
    const auto k1 = g.dim() == 2 ? wavenumbers(g, 1) : std::vector<double>{0.0};
    const std::size_t n1 = g.dim() == 2 ? g.points(1) : 1;
    double sum = 0.0;
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        const double kk = k0[idx / n1] * k0[idx / n1] + k1[idx % n1] * k1[idx % n1];
        sum += std::norm(spec[idx]) * (s == 0.0 ? 1.0 : std::pow(1.0 + kk, s));
    }
    NormValue nv;
    nv.kind = NormKind::Hs;
    nv.parameter = s;
    nv.value = std::sqrt(sum * g.cell_volume() / static_cast<double>(f.size()));
    return nv;
}

NormValue weighted_l2(const SampledField& f, Weight w, double a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = radius(f.point(i), f.grid().dim());
        const double weight = w == Weight::Power ? (a == 0.0 ? 1.0 : std::pow(r, a)) : std::pow(1.0 + r * r, 0.5 * a);
        sum += weight * weight * std::norm(f[i]);
    }
    NormValue nv;
    nv.kind = NormKind::WeightedL2;
    nv.parameter = a;
    nv.detail = w == Weight::Power ? "power" : "japanese";
    nv.value = std::sqrt(sum * f.grid().cell_volume());
    return nv;
}

NormValue translated_xnorm_inf(const AnalyticField& f, double theta, double q, const DyadicPartition& partition,
                               const ShiftSearch& search) {
    const int d = f.dim();
    if (static_cast<int>(search.window.size()) != d || partition.grid().dim() != d)
        throw std::invalid_argument("translated_xnorm_inf: dimension mismatch");
    if (search.points < 2 || search.levels < 1) throw std::invalid_argument("translated_xnorm_inf: empty search");
    NormValue best;
    best.value = std::numeric_limits<double>::infinity();
    Box window = search.window;
    for (int level = 0; level < search.levels; ++level) {
        std::vector<double> step(d);
        for (int a = 0; a < d; ++a)
            step[a] = window[a].length() / static_cast<double>(search.points - 1);
        const std::size_t total = d == 1 ? search.points : search.points * search.points;
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::vector<double> y(d);
            y[0] = window[0].lo + static_cast<double>(d == 1 ? idx : idx / search.points) * step[0];
            if (d == 2) y[1] = window[1].lo + static_cast<double>(idx % search.points) * step[1];
            const SampledField g = sample(f.translated(y), partition.grid(), true);
            NormValue nv = x_norm(g, theta, q, partition);
            if (nv.value < best.value) {
                nv.shift = y;
                best = nv;
            }
        }
        for (int a = 0; a < d; ++a) window[a] = {best.shift[a] - step[a], best.shift[a] + step[a]};
    }
    return best;
}

double annulus_linf_constant(const SampledField& f, const DyadicPartition& partition) {
    check_grid(f, partition);
    const double linf = max_abs(f);
    if (linf == 0.0) return 0.0;
    const int d = f.grid().dim();
    const double cell = f.grid().cell_volume();
    double c = 0.0;
    for (int k = partition.k_min(); k <= partition.k_max(); ++k) {
        const auto& phi = partition.bump(k);
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += phi[i] * phi[i] * std::norm(f[i]);
        c = std::max(c, std::sqrt(s * cell) / (std::exp2(0.5 * k * d) * linf));
    }
    return c;
}

}  // namespace decaylab
