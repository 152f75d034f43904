#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "decaylab/grid.hpp"

namespace decaylab {

/// prod_a exp(-(x_a - c_a)^2 / (2 w_a^2)) * exp(i k . x)
struct Gaussian {
    std::vector<double> center;
    std::vector<double> width;
    std::vector<double> modulation;  // empty means no modulation
    cplx amplitude = 1.0;
};

/// lambda * phi(lambda q, lambda p) on the (q, p) phase plane, where phi is the
/// fixed radial bump: 1 on the unit disc, 0 outside radius 2, C-infinity in between.
struct BumpLambda {
    double lambda = 1.0;
};

/// Indicator of the half-open cube prod_a [c_a - side/2, c_a + side/2).
struct CubeIndicator {
    std::vector<double> center;
    double side = 1.0;
};

/// Centered phase-space Gaussian exp(-|q|^2/(2 a^2) - |p|^2/(2 b^2)) on R^d x R^d.
struct ProductGaussianPhase {
    int d = 1;
    double q_width = 1.0;
    double p_width = 1.0;

    Gaussian as_gaussian() const;
};

/// The fixed radial bump profile phi(r) and its derivative.
double bump_profile(double r);
double bump_profile_derivative(double r);

/// Closed-form initial datum with value, derivative and moment oracles.
class AnalyticField {
public:
    using Family = std::variant<Gaussian, BumpLambda, CubeIndicator, ProductGaussianPhase>;

    explicit AnalyticField(Family family);

    static AnalyticField gaussian(std::vector<double> center, double width,
                                  std::vector<double> modulation = {});
    static AnalyticField bump(double lambda);
    static AnalyticField cube(std::vector<double> center, double side);
    static AnalyticField product_gaussian_phase(int d, double q_width, double p_width);

    const Family& family() const { return family_; }
    int dim() const { return dim_; }
    /// Short identifier used in reports, e.g. "gaussian".
    std::string family_name() const;

    cplx value(std::span<const double> x) const;
    bool has_derivatives() const;
    std::vector<cplx> gradient(std::span<const double> x) const;
    /// Mixed partial derivative with `orders[a]` derivatives along axis a.
    cplx partial(std::span<const double> x, std::span<const int> orders) const;

    /// Closed-form integral of the datum, where available.
    std::optional<cplx> integral() const;
    std::optional<double> l1_norm() const;
    std::optional<double> l2_norm_sq() const;
    /// Closed form of int x_axis^2 |f|^2 dx.
    std::optional<double> weighted_l2_sq(int axis) const;

    /// Box outside of which |f| is below rel_tol times its maximum.
    Box support(double rel_tol = 1e-18) const;
    /// Fraction of the L^1 mass lying outside `box`.
    double mass_outside(const Box& box) const;

    /// The same datum translated so that f_shifted(x) = f(x + shift).
    AnalyticField translated(std::span<const double> shift) const;

private:
    Family family_;
    int dim_ = 1;
};

/// Samples `datum` on every node of `grid`. Throws SupportOverflowError when more than
/// 1e-10 of the datum's mass lies outside the grid box, unless `allow_overflow`.
SampledField sample(const AnalyticField& datum, const GridSpec& grid, bool allow_overflow = false);

}  // namespace decaylab
