#pragma once

#include <string>
#include <vector>

#include "decaylab/analytic.hpp"
#include "decaylab/grid.hpp"

namespace decaylab {

enum class Normalization {
    Schrodinger,  // d_t u + i Laplacian u = 0
    Airy,         // d_t u - d^3 u = 0
    EvenOrder2k   // i d_t u + d^{2k} u = 0
};

/// Constant-coefficient dispersive equation written as d_t u = c d^m u (d = 1), with the
/// Laplacian in place of d^2 for two-dimensional Schrodinger. Its evolution symbol is
/// sigma(xi) = c (i xi)^m, so that u_hat(t, xi) = exp(t sigma(xi)) u_hat(0, xi).
class DispersionPolynomial {
public:
    static DispersionPolynomial schrodinger();
    static DispersionPolynomial airy();
    /// i d_t u + d^{2k} u = 0, k >= 1.
    static DispersionPolynomial even_order(int k);

    Normalization normalization() const { return norm_; }
    int degree() const { return m_; }
    /// c in d_t u = c d^m u.
    cplx time_coefficient() const { return c_; }
    std::string name() const;

    /// Coefficients s_n of sigma(xi) = sum_n s_n xi^n, n = 0..m.
    std::vector<cplx> symbol_coefficients() const;
    cplx symbol(double xi) const;
    /// Two-dimensional symbol; Schrodinger only.
    cplx symbol(double xi0, double xi1) const;
    /// |sigma'(xi)|, the speed of the wave packet at frequency xi.
    double group_speed(double xi) const;
    /// sigma(-xi) = conj(sigma(xi)), so real data stay real.
    bool preserves_reality() const { return m_ % 2 == 1; }

private:
    DispersionPolynomial(Normalization n, int m, cplx c) : norm_(n), m_(m), c_(c) {}
    Normalization norm_;
    int m_;
    cplx c_;
};

/// Exact evolution by the unit-modulus multiplier exp(t sigma). For odd degree the unpaired
/// Nyquist mode is held fixed, which keeps real data real. Airy and even-order equations are
/// one-dimensional.
SampledField propagate(const SampledField& u0, const DispersionPolynomial& disp, double t);

/// ||U(s + t) u0 - U(t) U(s) u0|| / ||u0||.
double group_property_check(const SampledField& u0, const DispersionPolynomial& disp, double s, double t);

/// Fraction of the L^2 mass lying within `edge` * extent of either end of some axis.
double edge_mass_fraction(const SampledField& f, double edge = 0.05);

/// Wrap-around guard: true when more than `threshold` of the mass sits in the outer 5% of the box.
bool wrap_contaminated(const SampledField& f, double threshold = 1e-6);

/// Smallest K such that modes with |k| <= K hold at least 1 - tail of the spectral mass.
double effective_band(const SampledField& u0, double tail);

struct BoxSizing {
    double band = 0.0;             // effective band for the propagation tail
    double max_group_speed = 0.0;  // over that band
    double support_radius = 0.0;   // of the datum, measured from the origin
    double required_half_width = 0.0;
    double nyquist_band = 0.0;     // band holding all but the resolution tail
    double required_spacing = 0.0;
};

/// Box sizing rule: half-width >= support radius + t_max * max group speed over the band holding
/// 1 - band_tail of the spectral mass, and grid spacing <= pi / (band holding 1 - resolution_tail).
/// The bands are measured on a reference sampling of the datum.
BoxSizing size_box(const AnalyticField& datum, const DispersionPolynomial& disp, double t_max,
                   double band_tail = 1e-12, double resolution_tail = 1e-28);

}  // namespace decaylab
