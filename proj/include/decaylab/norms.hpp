#pragma once

#include <string>
#include <vector>

#include "decaylab/analytic.hpp"
#include "decaylab/grid.hpp"

namespace decaylab {

/// Radial profile of the dyadic bumps in the log2 variable u = log2|x| - k: a quintic
/// smoothstep rising on [-1, 0] and falling on [0, 1], so that consecutive bumps sum to 1.
double dyadic_profile(double u);

/// Identifier carried by every report that depends on the bump profile.
inline constexpr const char* kDyadicProfileId = "log2-quintic-smoothstep";

/// phi_k(x) = dyadic_profile(log2|x| - k), k in [k_min, k_max], sampled on a reference grid.
/// |x| is measured from the coordinate origin.
class DyadicPartition {
public:
    const GridSpec& grid() const { return grid_; }
    int k_min() const { return k_min_; }
    int k_max() const { return k_max_; }
    std::size_t count() const { return bumps_.size(); }
    const std::vector<double>& bump(int k) const { return bumps_.at(static_cast<std::size_t>(k - k_min_)); }
    /// Shell 2^{k_min} <= |x| <= 2^{k_max} on which the bumps sum to one.
    Interval shell() const;

private:
    friend DyadicPartition build_dyadic_partition(const GridSpec&, int, int);
    GridSpec grid_;
    int k_min_ = 0;
    int k_max_ = 0;
    std::vector<std::vector<double>> bumps_;
};

/// Requires 2^{k_min} >= 4 * spacing and 2^{k_max + 1} <= half-extent on every axis; throws
/// RangeError otherwise.
DyadicPartition build_dyadic_partition(const GridSpec& grid, int k_min, int k_max);

/// Largest dyadic window the grid resolves (the bounds of build_dyadic_partition).
std::pair<int, int> resolvable_window(const GridSpec& grid);

enum class NormKind { Lp, Hs, Xnorm, WeightedL2 };

enum class Weight {
    Power,    // |x|^a
    Japanese  // <x>^a = (1 + |x|^2)^{a/2}
};

struct NormValue {
    NormKind kind = NormKind::Lp;
    double parameter = 0.0;  // p, s, theta, or the weight exponent a
    double q = 0.0;          // sequence exponent of X^{theta,q}
    std::string detail;      // weight name or profile id
    double value = 0.0;
    /// X-norms only: the k-range used and the share of ||f|| lying outside its shell.
    int k_min = 0;
    int k_max = 0;
    double outside_fraction = 0.0;
    bool truncated = false;
    /// translated_xnorm_inf only: the minimizing shift.
    std::vector<double> shift;
};

/// (sum_k (2^{theta k} ||phi_k f||_{L^2})^q)^{1/q}, or the max over k for q = inf. Truncated
/// when more than 1e-10 of ||f|| lies outside the partition shell.
NormValue x_norm(const SampledField& f, double theta, double q, const DyadicPartition& partition);

/// Periodic trapezoid L^p norm, p >= 1, p = inf giving the max over nodes.
NormValue lp_norm(const SampledField& f, double p);

/// (sum |f_hat|^2 (1 + |k|^2)^s)^{1/2} with the Parseval normalization.
NormValue hs_norm(const SampledField& f, double s);

/// ||w f||_{L^2} with w = |x|^a or <x>^a.
NormValue weighted_l2(const SampledField& f, Weight w, double a);

struct ShiftSearch {
    Box window;               // candidate shifts y
    std::size_t points = 17;  // per axis and level
    int levels = 3;
};

/// Minimum over a coarse-to-fine shift grid of ||tau_y f||_{X^{theta,q}}, tau_y f(x) = f(x + y).
/// Each level re-centers a window of two coarse spacings on the best shift found so far.
NormValue translated_xnorm_inf(const AnalyticField& f, double theta, double q, const DyadicPartition& partition,
                               const ShiftSearch& search);

/// max_k ||phi_k f||_{L^2} / (2^{k d / 2} ||f||_{L^inf}), the constant in the
/// annulus-volume bound; 0 for f = 0.
double annulus_linf_constant(const SampledField& f, const DyadicPartition& partition);

}  // namespace decaylab
