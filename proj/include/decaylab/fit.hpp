#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "decaylab/grid.hpp"

namespace decaylab {

/// One (t, value) point of a decay series; excluded points keep their reason.
struct SeriesSample {
    double t = 0.0;
    double value = 0.0;
    bool excluded = false;
    std::string reason;
};

/// Least-squares power law value ~ exp(intercept) * t^slope.
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_abs_residual = 0.0;  // in log space
    Interval window;
    std::size_t used = 0;
    std::vector<SeriesSample> samples;
    std::vector<SeriesSample> excluded_samples;
};

/// Fits log(value) against log(t) over samples with t inside `window` that are not excluded.
/// Requires at least 5 usable samples, strictly increasing t and positive values.
DecayFit fit_decay(std::span<const SeriesSample> series, Interval window);
DecayFit fit_decay(std::span<const SeriesSample> series);

/// t0, t0*r, t0*r^2, ... up to t1 (t1 itself is included when hit within 1e-9 relative).
std::vector<double> geometric_times(double t0, double t1, double ratio);

struct InequalitySample {
    double t = 0.0;
    double x = std::numeric_limits<double>::quiet_NaN();  // probe location, when the check is pointwise
    double lhs = 0.0;
    double rhs = 0.0;
    bool excluded = false;
    std::string reason;

    /// lhs / rhs with 0/0 read as 0.
    double ratio() const;
};

/// Sampled left/right sides of one inequality. A sample holds when
/// lhs <= declared_bound * rhs + tolerance; declared_bound = +inf means the constant is
/// empirical and only finiteness is required.
struct InequalityReport {
    std::string name;
    std::string anchor;
    std::vector<InequalitySample> samples;
    double declared_bound = std::numeric_limits<double>::infinity();
    double tolerance = 1e-6;
    double max_ratio = 0.0;
    double min_ratio = 0.0;  // over samples with positive ratio
    bool pass = false;

    /// Recomputes max_ratio, min_ratio and pass from the samples.
    void finalize();
    /// max_ratio / min_ratio, 1 when no positive ratios exist.
    double ratio_spread() const;
};

}  // namespace decaylab
