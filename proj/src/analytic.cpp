#include "decaylab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

constexpr double kPi = std::numbers::pi;

// Smooth transition 0 -> 1 on [0, 1] built from exp(-1/s).
double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double smooth_step_derivative(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    const double da = a / (s * s);
    const double db = -b / ((1.0 - s) * (1.0 - s));
    return (da * b - a * db) / ((a + b) * (a + b));
}

// int_0^2 phi(r)^power r dr, trapezoid on the transition band (integrand is flat at both ends).
double bump_radial_moment(int power) {
    constexpr int n = 4096;
    double sum = 0.0;
    for (int i = 1; i < n; ++i) {
        const double r = 1.0 + static_cast<double>(i) / n;
        sum += std::pow(bump_profile(r), power) * r;
    }
    return 0.5 + sum / n;
}

double bump_integral() {
    static const double v = 2.0 * kPi * bump_radial_moment(1);
    return v;
}

double bump_l2_sq() {
    static const double v = 2.0 * kPi * bump_radial_moment(2);
    return v;
}

void require_dim(std::span<const double> x, int dim) {
    if (static_cast<int>(x.size()) != dim)
        throw std::invalid_argument("AnalyticField: point dimension " + std::to_string(x.size()) +
                                    " does not match datum dimension " + std::to_string(dim));
}

// n-th derivative of exp(g(x)) divided by exp(g(x)), where g'(x) = y and g'' = curvature is constant.
cplx gaussian_derivative_factor(int n, cplx y, double curvature) {
    std::vector<cplx> poly{1.0};  // coefficients in y
    for (int k = 0; k < n; ++k) {
        std::vector<cplx> next(poly.size() + 1, 0.0);
        for (std::size_t j = 0; j < poly.size(); ++j) next[j + 1] += poly[j];
        for (std::size_t j = 1; j < poly.size(); ++j) next[j - 1] += curvature * static_cast<double>(j) * poly[j];
        poly = std::move(next);
    }
    cplx acc = 0.0;
    for (std::size_t j = poly.size(); j-- > 0;) acc = acc * y + poly[j];
    return acc;
}

double modulation_at(const Gaussian& g, std::size_t a) {
    return g.modulation.empty() ? 0.0 : g.modulation[a];
}

cplx gaussian_value(const Gaussian& g, std::span<const double> x) {
    double expo = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double u = (x[a] - g.center[a]) / g.width[a];
        expo -= 0.5 * u * u;
    }
    if (g.modulation.empty()) return g.amplitude * std::exp(expo);
    double phase = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) phase += g.modulation[a] * x[a];
    return g.amplitude * std::exp(expo) * cplx(std::cos(phase), std::sin(phase));
}

cplx gaussian_partial(const Gaussian& g, std::span<const double> x, std::span<const int> orders) {
    cplx factor = 1.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        if (orders[a] == 0) continue;
        const double w2 = g.width[a] * g.width[a];
        const cplx y(-(x[a] - g.center[a]) / w2, modulation_at(g, a));
        factor *= gaussian_derivative_factor(orders[a], y, -1.0 / w2);
    }
    return factor * gaussian_value(g, x);
}

struct ValueVisitor {
    std::span<const double> x;
    cplx operator()(const Gaussian& g) const { return gaussian_value(g, x); }
    cplx operator()(const ProductGaussianPhase& g) const {
        double q2 = 0.0, p2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            q2 += x[a] * x[a];
            p2 += x[g.d + a] * x[g.d + a];
        }
        return std::exp(-0.5 * q2 / (g.q_width * g.q_width) - 0.5 * p2 / (g.p_width * g.p_width));
    }
    cplx operator()(const BumpLambda& b) const {
        const double r = std::hypot(x[0], x[1]);
        return b.lambda * bump_profile(b.lambda * r);
    }
    cplx operator()(const CubeIndicator& c) const {
        const double h = 0.5 * c.side;
        for (std::size_t a = 0; a < x.size(); ++a)
            if (x[a] < c.center[a] - h || x[a] >= c.center[a] + h) return 0.0;
        return 1.0;
    }
};

struct PartialVisitor {
    std::span<const double> x;
    std::span<const int> orders;
    cplx operator()(const Gaussian& g) const { return gaussian_partial(g, x, orders); }
    cplx operator()(const ProductGaussianPhase& g) const { return gaussian_partial(g.as_gaussian(), x, orders); }
    cplx operator()(const BumpLambda& b) const {
        const int total = orders[0] + orders[1];
        if (total == 0) return ValueVisitor{x}(b);
        if (total > 1) throw UnsupportedError("BumpLambda: only first derivatives are available");
        const double r = std::hypot(x[0], x[1]);
        if (r == 0.0) return 0.0;
        const double dr = b.lambda * b.lambda * bump_profile_derivative(b.lambda * r);
        return dr * (orders[0] == 1 ? x[0] : x[1]) / r;
    }
    cplx operator()(const CubeIndicator& c) const {
        for (int o : orders)
            if (o != 0) throw UnsupportedError("CubeIndicator: derivatives are not available");
        return ValueVisitor{x}(c);
    }
};

double erf_mass_inside(double c, double w, const Interval& iv) {
    const double s = w * std::numbers::sqrt2;
    return 0.5 * (std::erf((iv.hi - c) / s) - std::erf((iv.lo - c) / s));
}

}  // namespace

double bump_profile(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    return smooth_step(2.0 - r);
}

double bump_profile_derivative(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    return -smooth_step_derivative(2.0 - r);
}

Gaussian ProductGaussianPhase::as_gaussian() const {
    Gaussian g;
    g.center.assign(2 * d, 0.0);
    g.width.assign(d, q_width);
    g.width.insert(g.width.end(), d, p_width);
    return g;
}

AnalyticField::AnalyticField(Family family) : family_(std::move(family)) {
    std::visit(
        [this](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                dim_ = static_cast<int>(f.center.size());
                if (f.width.size() != f.center.size() ||
                    (!f.modulation.empty() && f.modulation.size() != f.center.size()))
                    throw std::invalid_argument("Gaussian: center/width/modulation sizes differ");
                for (double w : f.width)
                    if (!(w > 0.0)) throw std::invalid_argument("Gaussian: width must be positive");
            } else if constexpr (std::is_same_v<T, BumpLambda>) {
                dim_ = 2;
                if (!(f.lambda >= 1.0)) throw std::invalid_argument("BumpLambda: lambda must be >= 1");
            } else if constexpr (std::is_same_v<T, CubeIndicator>) {
                dim_ = static_cast<int>(f.center.size());
                if (!(f.side > 0.0)) throw std::invalid_argument("CubeIndicator: side must be positive");
            } else {
                dim_ = 2 * f.d;
                if (f.d < 1 || f.d > 2) throw std::invalid_argument("ProductGaussianPhase: d must be 1 or 2");
                if (!(f.q_width > 0.0) || !(f.p_width > 0.0))
                    throw std::invalid_argument("ProductGaussianPhase: widths must be positive");
            }
        },
        family_);
    if (dim_ < 1) throw std::invalid_argument("AnalyticField: empty dimension");
}

AnalyticField AnalyticField::gaussian(std::vector<double> center, double width, std::vector<double> modulation) {
    Gaussian g;
    g.width.assign(center.size(), width);
    g.center = std::move(center);
    g.modulation = std::move(modulation);
    return AnalyticField(std::move(g));
}

AnalyticField AnalyticField::bump(double lambda) { return AnalyticField(BumpLambda{lambda}); }

AnalyticField AnalyticField::cube(std::vector<double> center, double side) {
    return AnalyticField(CubeIndicator{std::move(center), side});
}

AnalyticField AnalyticField::product_gaussian_phase(int d, double q_width, double p_width) {
    return AnalyticField(ProductGaussianPhase{d, q_width, p_width});
}

std::string AnalyticField::family_name() const {
    switch (family_.index()) {
        case 0: return "gaussian";
        case 1: return "bump-lambda";
        case 2: return "cube-indicator";
        default: return "product-gaussian-phase";
    }
}

cplx AnalyticField::value(std::span<const double> x) const {
    require_dim(x, dim_);
    return std::visit(ValueVisitor{x}, family_);
}

bool AnalyticField::has_derivatives() const { return !std::holds_alternative<CubeIndicator>(family_); }

std::vector<cplx> AnalyticField::gradient(std::span<const double> x) const {
    require_dim(x, dim_);
    std::vector<cplx> g(dim_);
    std::vector<int> orders(dim_, 0);
    for (int a = 0; a < dim_; ++a) {
        orders[a] = 1;
        g[a] = std::visit(PartialVisitor{x, orders}, family_);
        orders[a] = 0;
    }
    return g;
}

cplx AnalyticField::partial(std::span<const double> x, std::span<const int> orders) const {
    require_dim(x, dim_);
    if (static_cast<int>(orders.size()) != dim_) throw std::invalid_argument("AnalyticField::partial: order size");
    return std::visit(PartialVisitor{x, orders}, family_);
}

std::optional<cplx> AnalyticField::integral() const {
    return std::visit(
        [](const auto& f) -> std::optional<cplx> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Gaussian> || std::is_same_v<T, ProductGaussianPhase>) {
                Gaussian g;
                if constexpr (std::is_same_v<T, Gaussian>) g = f; else g = f.as_gaussian();
                cplx v = g.amplitude;
                for (std::size_t a = 0; a < g.center.size(); ++a) {
                    const double k = modulation_at(g, a);
                    v *= std::sqrt(2.0 * kPi) * g.width[a] * std::exp(-0.5 * k * k * g.width[a] * g.width[a]) *
                         cplx(std::cos(k * g.center[a]), std::sin(k * g.center[a]));
                }
                return v;
            } else if constexpr (std::is_same_v<T, BumpLambda>) {
                return cplx(bump_integral() / f.lambda);
            } else {
                return cplx(std::pow(f.side, static_cast<double>(f.center.size())));
            }
        },
        family_);
}

std::optional<double> AnalyticField::l1_norm() const {
    return std::visit(
        [this](const auto& f) -> std::optional<double> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                double v = std::abs(f.amplitude);
                for (double w : f.width) v *= std::sqrt(2.0 * kPi) * w;
                return v;
            } else {
                return std::abs(*integral());
            }
        },
        family_);
}

std::optional<double> AnalyticField::l2_norm_sq() const {
    return std::visit(
        [](const auto& f) -> std::optional<double> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Gaussian> || std::is_same_v<T, ProductGaussianPhase>) {
                Gaussian g;
                if constexpr (std::is_same_v<T, Gaussian>) g = f; else g = f.as_gaussian();
                double v = std::norm(g.amplitude);
                for (double w : g.width) v *= std::sqrt(kPi) * w;
                return v;
            } else if constexpr (std::is_same_v<T, BumpLambda>) {
                return bump_l2_sq();
            } else {
                return std::pow(f.side, static_cast<double>(f.center.size()));
            }
        },
        family_);
}

std::optional<double> AnalyticField::weighted_l2_sq(int axis) const {
    if (axis < 0 || axis >= dim_) throw std::invalid_argument("weighted_l2_sq: axis out of range");
    return std::visit(
        [this, axis](const auto& f) -> std::optional<double> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Gaussian> || std::is_same_v<T, ProductGaussianPhase>) {
                Gaussian g;
                if constexpr (std::is_same_v<T, Gaussian>) g = f; else g = f.as_gaussian();
                const double c = g.center[axis];
                const double w = g.width[axis];
                return *l2_norm_sq() * (c * c + 0.5 * w * w);
            } else if constexpr (std::is_same_v<T, BumpLambda>) {
                return std::nullopt;
            } else {
                const double s = f.side;
                const double c = f.center[axis];
                return std::pow(s, static_cast<double>(dim_ - 1)) * (s * c * c + s * s * s / 12.0);
            }
        },
        family_);
}

Box AnalyticField::support(double rel_tol) const {
    return std::visit(
        [rel_tol](const auto& f) -> Box {
            using T = std::decay_t<decltype(f)>;
            Box b;
            if constexpr (std::is_same_v<T, Gaussian> || std::is_same_v<T, ProductGaussianPhase>) {
                Gaussian g;
                if constexpr (std::is_same_v<T, Gaussian>) g = f; else g = f.as_gaussian();
                const double r = std::sqrt(2.0 * std::log(1.0 / rel_tol));
                for (std::size_t a = 0; a < g.center.size(); ++a)
                    b.push_back({g.center[a] - r * g.width[a], g.center[a] + r * g.width[a]});
            } else if constexpr (std::is_same_v<T, BumpLambda>) {
                const double r = 2.0 / f.lambda;
                b = {{-r, r}, {-r, r}};
            } else {
                for (double c : f.center) b.push_back({c - 0.5 * f.side, c + 0.5 * f.side});
            }
            return b;
        },
        family_);
}

double AnalyticField::mass_outside(const Box& box) const {
    if (static_cast<int>(box.size()) != dim_) throw std::invalid_argument("mass_outside: box dimension");
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Gaussian> || std::is_same_v<T, ProductGaussianPhase>) {
                Gaussian g;
                if constexpr (std::is_same_v<T, Gaussian>) g = f; else g = f.as_gaussian();
                double inside = 1.0;
                double outside_bound = 0.0;
                for (std::size_t a = 0; a < g.center.size(); ++a) {
                    const double in = erf_mass_inside(g.center[a], g.width[a], box[a]);
                    inside *= in;
                    outside_bound += 1.0 - in;
                }
                return std::max(0.0, std::min(outside_bound, 1.0 - inside));
            } else if constexpr (std::is_same_v<T, BumpLambda>) {
                const Box s = support();
                if (box[0].contains(s[0]) && box[1].contains(s[1])) return 0.0;
                // Midpoint quadrature of |f| over the support square, counting cells outside the box.
                constexpr int n = 512;
                const double h = s[0].length() / n;
                double total = 0.0, out = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const double x[2] = {s[0].lo + (i + 0.5) * h, s[1].lo + (j + 0.5) * h};
                        const double v = std::abs(ValueVisitor{x}(f));
                        total += v;
                        const bool in = x[0] >= box[0].lo && x[0] <= box[0].hi && x[1] >= box[1].lo && x[1] <= box[1].hi;
                        if (!in) out += v;
                    }
                return total > 0.0 ? out / total : 0.0;
            } else {
                double inside = 1.0;
                for (std::size_t a = 0; a < f.center.size(); ++a) {
                    const double lo = std::max(box[a].lo, f.center[a] - 0.5 * f.side);
                    const double hi = std::min(box[a].hi, f.center[a] + 0.5 * f.side);
                    inside *= std::max(0.0, hi - lo) / f.side;
                }
                return 1.0 - inside;
            }
        },
        family_);
}

AnalyticField AnalyticField::translated(std::span<const double> shift) const {
    require_dim(shift, dim_);
    return std::visit(
        [&](const auto& f) -> AnalyticField {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Gaussian> || std::is_same_v<T, ProductGaussianPhase>) {
                Gaussian g;
                if constexpr (std::is_same_v<T, Gaussian>) g = f; else g = f.as_gaussian();
                double phase = 0.0;
                for (std::size_t a = 0; a < g.center.size(); ++a) {
                    g.center[a] -= shift[a];
                    phase += modulation_at(g, a) * shift[a];
                }
                g.amplitude *= cplx(std::cos(phase), std::sin(phase));
                return AnalyticField(std::move(g));
            } else if constexpr (std::is_same_v<T, CubeIndicator>) {
                CubeIndicator c = f;
                for (std::size_t a = 0; a < c.center.size(); ++a) c.center[a] -= shift[a];
                return AnalyticField(std::move(c));
            } else {
                throw UnsupportedError("BumpLambda: translation is not supported");
            }
        },
        family_);
}

SampledField sample(const AnalyticField& datum, const GridSpec& grid, bool allow_overflow) {
    if (datum.dim() != grid.dim())
        throw std::invalid_argument("sample: datum dimension does not match grid dimension");
    if (!allow_overflow) {
        const double out = datum.mass_outside(grid.box());
        if (out >= 1e-10)
            throw SupportOverflowError("sample: " + std::to_string(out) + " of the " + datum.family_name() +
                                       " mass lies outside the grid");
    }
    std::vector<cplx> v(grid.size());
    bool real = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::array<double, 2> x{};
        if (grid.dim() == 1) {
            x[0] = grid.coord(0, i);
        } else {
            x[0] = grid.coord(0, i / grid.points(1));
            x[1] = grid.coord(1, i % grid.points(1));
        }
        v[i] = datum.value(std::span<const double>(x.data(), grid.dim()));
        if (v[i].imag() != 0.0) real = false;
    }
    return SampledField(grid, std::move(v), real ? FieldKind::Real : FieldKind::Complex);
}

}  // namespace decaylab
