#include "decaylab/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "decaylab/errors.hpp"
#include "decaylab/parallel.hpp"

namespace decaylab {

namespace {

Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

void push_nonempty(std::vector<Interval>& out, Interval iv) {
    if (iv.hi > iv.lo) out.push_back(iv);
}

bool inside(double x, Interval iv) { return x >= iv.lo && x <= iv.hi; }

// Preimage of [lo, hi] under the component maps used by the built-in dispersion maps.
std::vector<Interval> identity_preimage(Interval target, Interval within) {
    std::vector<Interval> out;
    push_nonempty(out, intersect(target, within));
    return out;
}

std::vector<Interval> square_preimage(Interval target, Interval within) {
    std::vector<Interval> out;
    if (target.hi <= 0.0) return out;
    const double b = std::sqrt(target.hi);
    if (target.lo <= 0.0) {
        push_nonempty(out, intersect({-b, b}, within));
    } else {
        const double a = std::sqrt(target.lo);
        push_nonempty(out, intersect({-b, -a}, within));
        push_nonempty(out, intersect({a, b}, within));
    }
    return out;
}

std::vector<Interval> relativistic_preimage(Interval target, Interval within) {
    std::vector<Interval> out;
    if (target.lo >= 1.0 || target.hi <= -1.0) return out;
    const double inf = std::numeric_limits<double>::infinity();
    auto inverse = [&](double w) {
        if (w <= -1.0) return -inf;
        if (w >= 1.0) return inf;
        return w / std::sqrt(1.0 - w * w);
    };
    push_nonempty(out, intersect({inverse(target.lo), inverse(target.hi)}, within));
    return out;
}

// Cartesian product of per-axis interval lists.
std::vector<Box> product_boxes(const std::vector<std::vector<Interval>>& lists) {
    std::vector<Box> boxes{Box{}};
    for (const auto& list : lists) {
        std::vector<Box> next;
        for (const auto& b : boxes)
            for (const auto& iv : list) {
                Box nb = b;
                nb.push_back(iv);
                next.push_back(std::move(nb));
            }
        boxes = std::move(next);
    }
    return boxes;
}

GridSpec grid_over(const Box& box, std::size_t n) {
    if (box.size() == 1) return GridSpec::line(box[0].lo, box[0].hi, n);
    return GridSpec::plane(box[0], n, box[1], n);
}

// Boxes in p outside of which nu(t, q, .) is negligible.
std::vector<Box> velocity_boxes(const TransportSolution& sol, double t, std::span<const double> q) {
    const int d = sol.d();
    const auto& qs = sol.q_support();
    const auto& ps = sol.p_support();
    std::vector<std::vector<Interval>> lists(d);
    for (int a = 0; a < d; ++a) {
        if (!sol.map().separable()) {
            lists[a] = {ps[a]};
            continue;
        }
        if (t == 0.0) {
            if (inside(q[a], qs[a])) lists[a] = {ps[a]};
            continue;
        }
        Interval target{(q[a] - qs[a].hi) / t, (q[a] - qs[a].lo) / t};
        if (target.lo > target.hi) std::swap(target.lo, target.hi);
        lists[a] = sol.map().preimage(a, target, ps[a]);
    }
    return product_boxes(lists);
}

double velocity_sum(const TransportSolution& sol, double t, std::span<const double> q, const GridSpec& pgrid) {
    const int d = sol.d();
    std::array<double, 2> p{};
    double sum = 0.0;
    if (d == 1) {
        for (std::size_t i = 0; i < pgrid.points(0); ++i) {
            p[0] = pgrid.coord(0, i);
            sum += evaluate_density(sol, t, q, std::span<const double>(p.data(), 1));
        }
    } else {
        for (std::size_t i = 0; i < pgrid.points(0); ++i)
            for (std::size_t j = 0; j < pgrid.points(1); ++j) {
                p = {pgrid.coord(0, i), pgrid.coord(1, j)};
                sum += evaluate_density(sol, t, q, std::span<const double>(p.data(), 2));
            }
    }
    return sum * pgrid.cell_volume();
}

void require_dims(const TransportSolution& sol, std::span<const double> q, std::span<const double> p) {
    if (static_cast<int>(q.size()) != sol.d() || static_cast<int>(p.size()) != sol.d())
        throw std::invalid_argument("transport: q and p must have dimension d");
}

// Sum over phase-grid nodes of g(x, p), x = q - t w(p), restricted to nodes where x lies in the
// datum's q-support. Nodes with p outside the datum's p-support are skipped.
template <class G>
double phase_sum(const TransportSolution& sol, double t, const PhaseGrid& grid, G&& g) {
    const int d = sol.d();
    if (grid.q.dim() != d || grid.p.dim() != d) throw std::invalid_argument("phase grid dimension must be d");
    const auto& qs = sol.q_support();
    const auto& ps = sol.p_support();
    const Box pbox = grid.p.box();
    for (int a = 0; a < d; ++a)
        if (!pbox[a].contains(ps[a])) throw SupportOverflowError("phase grid does not cover the datum p-support");

    std::array<double, 4> x{};  // (q - t w(p), p)
    std::array<double, 2> p{};
    const std::size_t np1 = d == 2 ? grid.p.points(1) : 1;
    double sum = 0.0;
    for (std::size_t ip = 0; ip < grid.p.size(); ++ip) {
        p[0] = grid.p.coord(0, ip / np1);
        if (d == 2) p[1] = grid.p.coord(1, ip % np1);
        bool active = true;
        for (int a = 0; a < d; ++a) active = active && inside(p[a], ps[a]);
        if (!active) continue;
        const auto w = sol.map()(std::span<const double>(p.data(), d));
        std::array<std::size_t, 2> lo{0, 0}, hi{0, 0};
        for (int a = 0; a < d; ++a) {
            const double h = grid.q.spacing(a);
            const double s = t * w[a];
            const double first = std::ceil((qs[a].lo + s - grid.q.origin(a)) / h);
            const double last = std::floor((qs[a].hi + s - grid.q.origin(a)) / h);
            if (first < 0.0 || last >= static_cast<double>(grid.q.points(a)))
                throw SupportOverflowError("phase grid does not cover the support of nu(t) in q");
            lo[a] = static_cast<std::size_t>(first);
            hi[a] = static_cast<std::size_t>(std::max(first - 1.0, last)) + 1;
            x[d + a] = p[a];
        }
        double row = 0.0;
        if (d == 1) {
            for (std::size_t i = lo[0]; i < hi[0]; ++i) {
                x[0] = grid.q.coord(0, i) - t * w[0];
                row += g(std::span<const double>(x.data(), 2), std::span<const double>(p.data(), 1));
            }
        } else {
            for (std::size_t i = lo[0]; i < hi[0]; ++i) {
                x[0] = grid.q.coord(0, i) - t * w[0];
                for (std::size_t j = lo[1]; j < hi[1]; ++j) {
                    x[1] = grid.q.coord(1, j) - t * w[1];
                    row += g(std::span<const double>(x.data(), 4), std::span<const double>(p.data(), 2));
                }
            }
        }
        sum += row;
    }
    return sum * grid.q.cell_volume() * grid.p.cell_volume();
}

}  // namespace

// DispersionMap

DispersionMap DispersionMap::identity(int d) {
    if (d != 1 && d != 2) throw std::invalid_argument("identity map: d must be 1 or 2");
    return {MapTag::Identity, d};
}

DispersionMap DispersionMap::relativistic(int d) {
    if (d != 1 && d != 2) throw std::invalid_argument("relativistic map: d must be 1 or 2");
    return {MapTag::Relativistic, d};
}

DispersionMap DispersionMap::square_d1() { return {MapTag::SquareD1, 1}; }
DispersionMap DispersionMap::mixed_d2() { return {MapTag::MixedD2, 2}; }

std::string DispersionMap::name() const {
    switch (tag_) {
        case MapTag::Identity: return "identity";
        case MapTag::Relativistic: return "relativistic";
        case MapTag::SquareD1: return "square-d1";
        case MapTag::MixedD2: return "mixed-d2";
    }
    return "unknown";
}

std::vector<double> DispersionMap::operator()(std::span<const double> p) const {
    std::vector<double> w(p.begin(), p.end());
    switch (tag_) {
        case MapTag::Identity: break;
        case MapTag::Relativistic: {
            double s = 1.0;
            for (double v : p) s += v * v;
            s = std::sqrt(s);
            for (auto& v : w) v /= s;
            break;
        }
        case MapTag::SquareD1: w[0] = p[0] * p[0]; break;
        case MapTag::MixedD2: w[1] = p[1] * p[1]; break;
    }
    return w;
}

std::vector<double> DispersionMap::jacobian(std::span<const double> p) const {
    std::vector<double> J(d_ * d_, 0.0);
    switch (tag_) {
        case MapTag::Identity:
            for (int i = 0; i < d_; ++i) J[i * d_ + i] = 1.0;
            break;
        case MapTag::Relativistic: {
            double s2 = 1.0;
            for (double v : p) s2 += v * v;
            const double s = std::sqrt(s2);
            for (int j = 0; j < d_; ++j)
                for (int i = 0; i < d_; ++i) J[j * d_ + i] = (i == j ? 1.0 / s : 0.0) - p[j] * p[i] / (s2 * s);
            break;
        }
        case MapTag::SquareD1: J[0] = 2.0 * p[0]; break;
        case MapTag::MixedD2:
            J[0] = 1.0;
            J[3] = 2.0 * p[1];
            break;
    }
    return J;
}

bool DispersionMap::separable() const { return !(tag_ == MapTag::Relativistic && d_ == 2); }

std::vector<Interval> DispersionMap::preimage(int axis, Interval target, Interval within) const {
    if (!separable()) throw UnsupportedError("preimage: map is not separable");
    switch (tag_) {
        case MapTag::Identity: return identity_preimage(target, within);
        case MapTag::Relativistic: return relativistic_preimage(target, within);
        case MapTag::SquareD1: return square_preimage(target, within);
        case MapTag::MixedD2: return axis == 0 ? identity_preimage(target, within) : square_preimage(target, within);
    }
    return {};
}

Interval DispersionMap::image_bound(int axis, const Box& pbox) const {
    const Interval iv = pbox[axis];
    auto square_range = [](Interval v) {
        const double hi = std::max(v.lo * v.lo, v.hi * v.hi);
        const double lo = (v.lo <= 0.0 && v.hi >= 0.0) ? 0.0 : std::min(v.lo * v.lo, v.hi * v.hi);
        return Interval{lo, hi};
    };
    switch (tag_) {
        case MapTag::Identity: return iv;
        case MapTag::Relativistic: {
            if (d_ == 1) return {iv.lo / std::sqrt(1.0 + iv.lo * iv.lo), iv.hi / std::sqrt(1.0 + iv.hi * iv.hi)};
            const double m = std::max(std::abs(iv.lo), std::abs(iv.hi));
            const double b = m / std::sqrt(1.0 + m * m);
            return {-b, b};
        }
        case MapTag::SquareD1: return square_range(iv);
        case MapTag::MixedD2: return axis == 0 ? iv : square_range(iv);
    }
    return iv;
}

// TransportSolution

TransportSolution::TransportSolution(AnalyticField datum, DispersionMap map)
    : datum_(std::move(datum)), map_(map) {
    if (datum_.dim() != 2 * map_.d())
        throw std::invalid_argument("TransportSolution: datum must live on R^d x R^d for the map's d");
    const Box s = datum_.support();
    q_support_.assign(s.begin(), s.begin() + map_.d());
    p_support_.assign(s.begin() + map_.d(), s.end());
}

double evaluate_density(const TransportSolution& sol, double t, std::span<const double> q,
                        std::span<const double> p) {
    require_dims(sol, q, p);
    const int d = sol.d();
    const auto w = sol.map()(p);
    std::array<double, 4> x{};
    for (int a = 0; a < d; ++a) {
        x[a] = q[a] - t * w[a];
        x[d + a] = p[a];
    }
    return sol.datum().value(std::span<const double>(x.data(), 2 * d)).real();
}

double velocity_average(const TransportSolution& sol, double t, std::span<const double> q, const GridSpec& pgrid) {
    if (pgrid.dim() != sol.d()) throw std::invalid_argument("velocity_average: pgrid must have dimension d");
    const Box pbox = pgrid.box();
    for (const auto& b : velocity_boxes(sol, t, q))
        for (int a = 0; a < sol.d(); ++a)
            if (!pbox[a].contains(b[a]))
                throw SupportOverflowError("velocity_average: p-grid does not cover the integrand support");
    return velocity_sum(sol, t, q, pgrid);
}

double velocity_average(const TransportSolution& sol, double t, std::span<const double> q,
                        const VelocityQuadrature& quad) {
    if (static_cast<int>(q.size()) != sol.d()) throw std::invalid_argument("velocity_average: q must have dimension d");
    double sum = 0.0;
    for (const auto& b : velocity_boxes(sol, t, q)) sum += velocity_sum(sol, t, q, grid_over(b, sol.d() == 1 ? quad.nodes_per_interval : quad.nodes_per_axis_2d));
    return sum;
}

double sup_velocity_average(const TransportSolution& sol, double t, const GridSpec& qgrid, const GridSpec& pgrid) {
    if (qgrid.dim() != sol.d()) throw std::invalid_argument("sup_velocity_average: qgrid must have dimension d");
    const Box need = velocity_average_region(sol, t);
    const Box have = qgrid.box();
    for (int a = 0; a < sol.d(); ++a)
        if (!have[a].contains(need[a]))
            throw SupportOverflowError("sup_velocity_average: q-grid does not cover the region where nu_bar lives");
    double best = 0.0;
    std::array<double, 2> q{};
    for (std::size_t i = 0; i < qgrid.size(); ++i) {
        const std::size_t n1 = sol.d() == 2 ? qgrid.points(1) : 1;
        q[0] = qgrid.coord(0, i / n1);
        if (sol.d() == 2) q[1] = qgrid.coord(1, i % n1);
        best = std::max(best, velocity_average(sol, t, std::span<const double>(q.data(), sol.d()), pgrid));
    }
    return best;
}

Box velocity_average_region(const TransportSolution& sol, double t) {
    Box region;
    for (int a = 0; a < sol.d(); ++a) {
        const Interval w = sol.map().image_bound(a, sol.p_support());
        const Interval qs = sol.q_support()[a];
        if (t >= 0.0)
            region.push_back({qs.lo + t * w.lo, qs.hi + t * w.hi});
        else
            region.push_back({qs.lo + t * w.hi, qs.hi + t * w.lo});
    }
    return region;
}

SupResult sup_velocity_average(const TransportSolution& sol, double t, const SupOptions& opts) {
    const int d = sol.d();
    const Box region = velocity_average_region(sol, t);
    std::vector<double> target(d);
    for (int a = 0; a < d; ++a) target[a] = opts.target_fraction * sol.q_support()[a].length();

    auto scan = [&](const GridSpec& g, SupResult& res) {
        const std::size_t n1 = d == 2 ? g.points(1) : 1;
        std::array<double, 2> q{};
        for (std::size_t i = 0; i < g.size(); ++i) {
            q[0] = g.coord(0, i / n1);
            if (d == 2) q[1] = g.coord(1, i % n1);
            const double v = velocity_average(sol, t, std::span<const double>(q.data(), d), opts.quad);
            if (v > res.value) {
                res.value = v;
                res.argmax.assign(q.begin(), q.begin() + d);
            }
        }
        res.spacing.resize(d);
        for (int a = 0; a < d; ++a) res.spacing[a] = g.spacing(a);
    };

    SupResult res;
    const std::size_t n0 = d == 1 ? opts.coarse_points : opts.coarse_points_2d;
    scan(grid_over(region, n0), res);
    if (res.argmax.empty()) return res;  // identically zero
    for (res.levels = 0; res.levels < opts.max_levels; ++res.levels) {
        bool fine = true;
        for (int a = 0; a < d; ++a) fine = fine && res.spacing[a] <= target[a];
        if (fine) break;
        Box window;
        for (int a = 0; a < d; ++a) window.push_back({res.argmax[a] - res.spacing[a], res.argmax[a] + res.spacing[a]});
        scan(grid_over(window, opts.refine_points), res);
    }
    return res;
}

PhaseGrid default_phase_grid(const TransportSolution& sol, double t, double q_spacing, double p_spacing) {
    const Box region = velocity_average_region(sol, t);
    auto make = [](const Box& b, double h) {
        auto n_for = [h](Interval iv) {
            return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(iv.length() / h)) + 2);
        };
        auto pad = [h](Interval iv) { return Interval{iv.lo - h, iv.hi + h}; };
        if (b.size() == 1) {
            const Interval iv = pad(b[0]);
            return GridSpec::line(iv.lo, iv.hi, n_for(iv));
        }
        const Interval x = pad(b[0]), y = pad(b[1]);
        return GridSpec::plane(x, n_for(x), y, n_for(y));
    };
    return PhaseGrid{make(region, q_spacing), make(sol.p_support(), p_spacing)};
}

double conserved_functional(const TransportSolution& sol, const PhaseFunctional& F, double t, const PhaseGrid& grid) {
    std::vector<double> p_mid;
    for (const auto& iv : sol.p_support()) p_mid.push_back(0.5 * (iv.lo + iv.hi));
    if (F(p_mid, 0.0) != 0.0) throw std::invalid_argument("conserved_functional: F(p, 0) must vanish");
    return phase_sum(sol, t, grid, [&](std::span<const double> x, std::span<const double> p) {
        return F(p, sol.datum().value(x).real());
    });
}

double apply_transport_boost(const TransportSolution& sol, double t, int axis, std::span<const double> q,
                             std::span<const double> p) {
    require_dims(sol, q, p);
    const int d = sol.d();
    if (axis < 0 || axis >= d) throw std::invalid_argument("apply_transport_boost: axis out of range");
    const auto w = sol.map()(p);
    const auto J = sol.map().jacobian(p);
    std::array<double, 4> x{};
    for (int a = 0; a < d; ++a) {
        x[a] = q[a] - t * w[a];
        x[d + a] = p[a];
    }
    const auto grad = sol.datum().gradient(std::span<const double>(x.data(), 2 * d));
    // d_{q_j} nu = (d_{q_j} nu0)(x);  d_{p_i} nu = (d_{p_i} nu0)(x) - t sum_j J(j,i) (d_{q_j} nu0)(x)
    double dp = grad[d + axis].real();
    for (int j = 0; j < d; ++j) dp -= t * J[j * d + axis] * grad[j].real();
    double boost = dp;
    for (int j = 0; j < d; ++j) boost += t * J[j * d + axis] * grad[j].real();
    return boost;
}

KsVlasovEntry ks_vlasov_check(const TransportSolution& sol, double t, const PhaseGrid& grid, const SupOptions& sup) {
    if (sol.map().tag() != MapTag::Identity) throw UnsupportedError("ks_vlasov_check: identity map only");
    const int d = sol.d();
    KsVlasovEntry e;
    e.t = t;
    e.lhs = std::pow(std::abs(t), d) * sup_velocity_average(sol, t, sup).value;
    std::array<int, 4> orders{};
    for (int a = 0; a < d; ++a) orders[d + a] = 1;
    e.rhs = phase_sum(sol, t, grid, [&](std::span<const double> x, std::span<const double>) {
        return std::abs(sol.datum().partial(x, std::span<const int>(orders.data(), 2 * d)));
    });
    return e;
}

KsVlasovEntry ks_vlasov_check(const TransportSolution& sol, double t) {
    // |d_p^d nu0| has kinks where the derivative changes sign, so the p-spacing is finer than the q-spacing
    const bool one_d = sol.d() == 1;
    double hq = 1e300, hp = 1e300;
    for (const auto& iv : sol.q_support()) hq = std::min(hq, iv.length() / (one_d ? 160.0 : 64.0));
    for (const auto& iv : sol.p_support()) hp = std::min(hp, iv.length() / (one_d ? 4096.0 : 64.0));
    return ks_vlasov_check(sol, t, default_phase_grid(sol, t, hq, hp));
}

double counterexample_lower_bound(double lambda, double t) {
    // lambda sqrt((sqrt(1 + x) - 1) / (2 t^2)) with x = 4 t^2 / lambda^2, rewritten without cancellation
    const double x = 4.0 * t * t / (lambda * lambda);
    return std::sqrt(2.0 / (1.0 + std::sqrt(1.0 + x)));
}

double bump_w11_norm(double lambda) {
    const AnalyticField f = AnalyticField::bump(lambda);
    const double r = 2.0 / lambda;
    const std::size_t n = 400;
    const GridSpec g = GridSpec::plane({-r, r}, n, {-r, r}, n);
    const std::array<int, 2> dq{1, 0}, dp{0, 1};
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::array<double, 2> x{g.coord(0, i), g.coord(1, j)};
            sum += std::abs(f.value(x)) + std::abs(f.partial(x, dq)) + std::abs(f.partial(x, dp));
        }
    return sum * g.cell_volume();
}

CounterexampleRow counterexample_profile(double lambda, double t) {
    if (!(lambda >= 1.0)) throw std::invalid_argument("counterexample_profile: lambda must be >= 1");
    const TransportSolution sol(AnalyticField::bump(lambda), DispersionMap::square_d1());
    CounterexampleRow row;
    row.lambda = lambda;
    row.t = t;
    const std::array<double, 1> q{0.0};
    row.nu_bar_at_origin = velocity_average(sol, t, q, VelocityQuadrature{4096});
    row.lower_bound = counterexample_lower_bound(lambda, t);
    row.w11_norm = bump_w11_norm(lambda);
    return row;
}

DecayFit transport_decay_experiment(const DispersionMap& map, const AnalyticField& datum,
                                    std::span<const double> times, const SupOptions& opts) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0)) throw std::invalid_argument("transport_decay_experiment: times must be positive");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("transport_decay_experiment: times must be increasing");
    }
    const TransportSolution sol(datum, map);
    auto values = parallel_map(times.size(), [&](std::size_t i) { return sup_velocity_average(sol, times[i], opts).value; });
    std::vector<SeriesSample> series;
    for (std::size_t i = 0; i < times.size(); ++i) series.push_back({times[i], values[i], false, ""});
    return fit_decay(series);
}

}  // namespace decaylab
