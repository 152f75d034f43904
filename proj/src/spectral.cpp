#include "decaylab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "decaylab/errors.hpp"
#include "decaylab/fft.hpp"

namespace decaylab {

namespace {

cplx ipow(cplx z, int n) {
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

}  // namespace

DispersionPolynomial DispersionPolynomial::schrodinger() { return {Normalization::Schrodinger, 2, cplx(0.0, -1.0)}; }

DispersionPolynomial DispersionPolynomial::airy() { return {Normalization::Airy, 3, cplx(1.0, 0.0)}; }

DispersionPolynomial DispersionPolynomial::even_order(int k) {
    if (k < 1 || k > 3) throw RangeError("even_order: k must be in [1, 3]");
    return {Normalization::EvenOrder2k, 2 * k, cplx(0.0, 1.0)};
}

std::string DispersionPolynomial::name() const {
    switch (norm_) {
        case Normalization::Schrodinger: return "schrodinger";
        case Normalization::Airy: return "airy";
        case Normalization::EvenOrder2k: return "even-order-" + std::to_string(m_);
    }
    return "unknown";
}

std::vector<cplx> DispersionPolynomial::symbol_coefficients() const {
    std::vector<cplx> s(m_ + 1, 0.0);
    s[m_] = c_ * ipow(cplx(0.0, 1.0), m_);
    return s;
}

cplx DispersionPolynomial::symbol(double xi) const { return c_ * ipow(cplx(0.0, xi), m_); }

cplx DispersionPolynomial::symbol(double xi0, double xi1) const {
    if (norm_ != Normalization::Schrodinger) throw UnsupportedError(name() + " is one-dimensional");
    return c_ * cplx(-(xi0 * xi0 + xi1 * xi1), 0.0);
}

double DispersionPolynomial::group_speed(double xi) const {
    return static_cast<double>(m_) * std::pow(std::abs(xi), m_ - 1) * std::abs(c_);
}

SampledField propagate(const SampledField& u0, const DispersionPolynomial& disp, double t) {
    const GridSpec& g = u0.grid();
    if (g.dim() == 2 && disp.normalization() != Normalization::Schrodinger)
        throw UnsupportedError(disp.name() + " is one-dimensional");
    if (t == 0.0) return u0;
    const auto k0 = wavenumbers(g, 0);
    const double nyquist = g.points(0) % 2 == 0 ? k0[g.points(0) / 2] : std::nan("");
    SampledField out = g.dim() == 1
                           ? apply_multiplier(u0,
                                              [&](double k, double) {
                                                  if (disp.preserves_reality() && k == nyquist) return cplx(1.0);
                                                  return std::exp(t * disp.symbol(k));
                                              })
                           : apply_multiplier(u0, [&](double ka, double kb) { return std::exp(t * disp.symbol(ka, kb)); });
    if (u0.kind() == FieldKind::Real && disp.preserves_reality()) return SampledField::real_part_of(out, 1e-10);
    return out;
}

double group_property_check(const SampledField& u0, const DispersionPolynomial& disp, double s, double t) {
    const double n0 = l2_norm(u0);
    if (n0 == 0.0) return 0.0;
    const auto direct = propagate(u0, disp, s + t);
    const auto stepped = propagate(propagate(u0, disp, s), disp, t);
    return l2_norm(direct - stepped) / n0;
}

double edge_mass_fraction(const SampledField& f, double edge) {
    const GridSpec& g = f.grid();
    double total = 0.0, outer = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double m = std::norm(f[i]);
        total += m;
        const auto x = f.point(i);
        bool near = false;
        for (int a = 0; a < g.dim(); ++a) {
            const double band = edge * g.extent(a);
            near = near || x[a] < g.origin(a) + band || x[a] >= g.origin(a) + g.extent(a) - band;
        }
        if (near) outer += m;
    }
    return total == 0.0 ? 0.0 : outer / total;
}

bool wrap_contaminated(const SampledField& f, double threshold) { return edge_mass_fraction(f, 0.05) > threshold; }

double effective_band(const SampledField& u0, double tail) {
    const GridSpec& g = u0.grid();
    const auto spec = fft_forward(g, u0.values());
    const auto k0 = wavenumbers(g, 0);
    const auto k1 = g.dim() == 2 ? wavenumbers(g, 1) : std::vector<double>{0.0};
    const std::size_t n1 = g.dim() == 2 ? g.points(1) : 1;
    std::vector<std::pair<double, double>> modes;  // (|k|, mass)
    modes.reserve(spec.size());
    double total = 0.0;
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        const double kk = std::hypot(k0[idx / n1], k1[idx % n1]);
        const double m = std::norm(spec[idx]);
        modes.emplace_back(kk, m);
        total += m;
    }
    if (total == 0.0) return 0.0;
    std::sort(modes.begin(), modes.end());
    // accumulate from the top so the tail sum is not swamped by round-off
    double outside = 0.0;
    for (std::size_t i = modes.size(); i-- > 0;) {
        if (outside + modes[i].second > tail * total) return modes[i].first;
        outside += modes[i].second;
    }
    return 0.0;
}

BoxSizing size_box(const AnalyticField& datum, const DispersionPolynomial& disp, double t_max, double band_tail,
                   double resolution_tail) {
    if (datum.dim() != 1 && datum.dim() != 2) throw UnsupportedError("size_box: d must be 1 or 2");
    BoxSizing b;
    const Box support = datum.support();
    for (const auto& iv : support) b.support_radius = std::max({b.support_radius, std::abs(iv.lo), std::abs(iv.hi)});
    // reference sampling: box sixteen support radii wide (fine wavenumber steps), resolution refined until
    // the resolution band sits well inside the Nyquist limit
    const double half = 8.0 * b.support_radius + 1.0;
    std::size_t n = 256;
    SampledField ref = SampledField::zeros(GridSpec::centered(datum.dim(), half, 8));
    for (;; n *= 2) {
        ref = sample(datum, GridSpec::centered(datum.dim(), half, n), true);
        const double nyq = std::numbers::pi * static_cast<double>(n) / (2.0 * half);
        b.nyquist_band = effective_band(ref, resolution_tail);
        if (b.nyquist_band < 0.5 * nyq || n >= (datum.dim() == 1 ? (1u << 18) : 1024u)) break;
    }
    b.band = effective_band(ref, band_tail);
    b.max_group_speed = disp.group_speed(b.band);
    b.required_half_width = b.support_radius + std::abs(t_max) * b.max_group_speed;
    b.required_spacing = b.nyquist_band > 0.0 ? std::numbers::pi / b.nyquist_band : half;
    return b;
}

}  // namespace decaylab
