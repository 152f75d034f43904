#include "decaylab/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "decaylab/errors.hpp"
#include "decaylab/parallel.hpp"

namespace decaylab {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) { g_threads = std::max(1, threads); }
int thread_count() { return g_threads; }

DecayFit fit_decay(std::span<const SeriesSample> series, Interval window) {
    DecayFit fit;
    fit.window = window;
    fit.samples.assign(series.begin(), series.end());
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].t > series[i - 1].t)) throw std::invalid_argument("fit_decay: times must be strictly increasing");

    const double slack = 1e-9 * std::max(std::abs(window.lo), std::abs(window.hi));
    std::vector<double> lx, ly;
    for (const auto& s : series) {
        if (s.t < window.lo - slack || s.t > window.hi + slack) continue;
        if (s.excluded) {
            fit.excluded_samples.push_back(s);
            continue;
        }
        if (!(s.t > 0.0)) throw NonPositiveValueError("fit_decay: times must be positive");
        if (!(s.value > 0.0))
            throw NonPositiveValueError("fit_decay: nonpositive value " + std::to_string(s.value) + " at t = " +
                                        std::to_string(s.t));
        lx.push_back(std::log(s.t));
        ly.push_back(std::log(s.value));
    }
    fit.used = lx.size();
    if (fit.used < 5)
        throw InsufficientWindowError("fit_decay: only " + std::to_string(fit.used) + " usable samples in window");

    const auto n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < lx.size(); ++i)
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(ly[i] - fit.intercept - fit.slope * lx[i]));
    return fit;
}

DecayFit fit_decay(std::span<const SeriesSample> series) {
    if (series.empty()) throw InsufficientWindowError("fit_decay: empty series");
    return fit_decay(series, {series.front().t, series.back().t});
}

std::vector<double> geometric_times(double t0, double t1, double ratio) {
    if (!(t0 > 0.0) || !(t1 >= t0) || !(ratio > 1.0))
        throw std::invalid_argument("geometric_times: need 0 < t0 <= t1 and ratio > 1");
    std::vector<double> ts;
    for (int k = 0;; ++k) {
        double t = t0 * std::pow(ratio, k);
        if (t > t1 * (1.0 + 1e-9)) break;
        if (std::abs(t - t1) <= 1e-9 * t1) t = t1;
        ts.push_back(t);
    }
    return ts;
}

double InequalitySample::ratio() const {
    if (rhs > 0.0) return lhs / rhs;
    if (lhs <= 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
}

void InequalityReport::finalize() {
    max_ratio = 0.0;
    min_ratio = std::numeric_limits<double>::infinity();
    pass = true;
    for (const auto& s : samples) {
        if (s.excluded) continue;
        const double r = s.ratio();
        if (!(r <= max_ratio)) max_ratio = r;  // also propagates NaN
        if (r > 0.0) min_ratio = std::min(min_ratio, r);
        const bool holds = std::isinf(declared_bound) ? std::isfinite(r) : s.lhs <= declared_bound * s.rhs + tolerance;
        if (!holds) pass = false;
    }
    if (std::isinf(min_ratio)) min_ratio = 0.0;
    if (std::isnan(max_ratio)) pass = false;
}

double InequalityReport::ratio_spread() const {
    if (!(min_ratio > 0.0)) return 1.0;
    return max_ratio / min_ratio;
}

}  // namespace decaylab
