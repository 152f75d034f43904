#include "decaylab/catalog.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>

#include "decaylab/analytic.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/harness.hpp"
#include "decaylab/norms.hpp"
#include "decaylab/parallel.hpp"
#include "decaylab/spectral.hpp"
#include "decaylab/symmetry.hpp"
#include "decaylab/transport.hpp"

namespace decaylab {

namespace {

std::string num(double v) { return format_real(v); }
std::string num(long long v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::vector<double> sample_times(const ExperimentConfig& c) {
    if (c.has("time.list")) return c.get_reals("time.list");
    const double t0 = c.get_real("time.t_min"), t1 = c.get_real("time.t_max");
    auto times = geometric_times(t0, t1, c.get_real("time.ratio"));
    if (times.empty() || times.back() < t1 * (1.0 - 1e-9)) times.push_back(t1);
    return times;
}

Interval fit_window(const ExperimentConfig& c) {
    return {c.has("time.fit_min") ? c.get_real("time.fit_min") : 0.0,
            c.has("time.fit_max") ? c.get_real("time.fit_max") : std::numeric_limits<double>::infinity()};
}

GridSpec line_grid(const ExperimentConfig& c) {
    const double h = c.get_real("grid.half_width");
    return GridSpec::centered(1, h, static_cast<std::size_t>(c.get_int("grid.points")));
}

std::vector<double> center_or_zero(const ExperimentConfig& c, int dim) {
    if (c.has("datum.center")) {
        auto v = c.get_reals("datum.center");
        if (static_cast<int>(v.size()) != dim) throw ValidationError("datum.center", "needs one entry per axis");
        return v;
    }
    return std::vector<double>(dim, 0.0);
}

AnalyticField gaussian_datum(const ExperimentConfig& c, int dim) {
    const std::string fam = c.get_string("datum.family");
    if (fam != "gaussian") throw ValidationError("datum.family", "this experiment needs a gaussian datum");
    const double w = c.get_real("datum.width");
    const double k = c.has("datum.modulation") ? c.get_real("datum.modulation") : 0.0;
    return AnalyticField::gaussian(center_or_zero(c, dim), w, k == 0.0 ? std::vector<double>{} : std::vector<double>(dim, k));
}

AnalyticField phase_datum(const ExperimentConfig& c, int d) {
    const std::string fam = c.get_string("datum.family");
    if (fam == "product-gaussian-phase")
        return AnalyticField::product_gaussian_phase(d, c.get_real("datum.q_width"), c.get_real("datum.p_width"));
    if (fam == "bump") {
        if (d != 1) throw ValidationError("datum.family", "the bump datum lives on R x R");
        return AnalyticField::bump(c.get_real("datum.lambda"));
    }
    throw ValidationError("datum.family", "unsupported phase-space datum '" + fam + "'");
}

DispersionMap map_from(const ExperimentConfig& c) {
    const std::string m = c.get_string("params.map");
    const int d = static_cast<int>(c.get_int("params.d"));
    if (m == "identity") return DispersionMap::identity(d);
    if (m == "relativistic") return DispersionMap::relativistic(d);
    if (m == "square-d1") {
        if (d != 1) throw ValidationError("params.d", "square-d1 needs d = 1");
        return DispersionMap::square_d1();
    }
    if (m == "mixed-d2") {
        if (d != 2) throw ValidationError("params.d", "mixed-d2 needs d = 2");
        return DispersionMap::mixed_d2();
    }
    throw ValidationError("params.map", "unknown map '" + m + "'");
}

Table fit_table(const std::string& name, const DecayFit& fit) {
    Table t{name, {"t", "value", "excluded"}, {}};
    for (const auto& s : fit.samples) t.rows.push_back({num(s.t), num(s.value), s.excluded ? s.reason : "0"});
    return t;
}

Table inequality_table(const InequalityReport& r) {
    const bool pointwise = !r.samples.empty() && !std::isnan(r.samples.front().x);
    Table t{r.name, {}, {}};
    t.columns = pointwise ? std::vector<std::string>{"t", "x", "lhs", "rhs", "ratio", "excluded"}
                          : std::vector<std::string>{"t", "lhs", "rhs", "ratio", "excluded"};
    for (const auto& s : r.samples) {
        std::vector<std::string> row{num(s.t)};
        if (pointwise) row.push_back(num(s.x));
        row.insert(row.end(), {num(s.lhs), num(s.rhs), num(s.ratio()), s.excluded ? s.reason : "0"});
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void add_fit(Report& rep, const std::string& name, const DecayFit& fit) {
    rep.fits.emplace_back(name, fit);
    rep.tables.push_back(fit_table(name, fit));
}

void add_inequality(Report& rep, const InequalityReport& r) {
    rep.inequalities.push_back(r);
    rep.tables.push_back(inequality_table(r));
}

void check(Report& rep, std::string name, bool pass, std::string detail) {
    rep.checks.push_back({std::move(name), pass, std::move(detail)});
}

void check_slope(Report& rep, const std::string& name, const DecayFit& fit, double expected, double tol) {
    check(rep, name, std::abs(fit.slope - expected) <= tol,
          fmt("slope %.6f, expected %.6f +- %.3g", fit.slope, expected, tol));
}

void check_ratio_stability(Report& rep, const InequalityReport& r, double spread) {
    check(rep, r.name + " holds", r.pass, fmt("max ratio %.6g, min ratio %.6g", r.max_ratio, r.min_ratio));
    check(rep, r.name + " stable", r.ratio_spread() <= spread,
          fmt("ratio spread %.6g, allowed %.3g", r.ratio_spread(), spread));
}

// ---------------------------------------------------------------------------------------------
// experiments

void vlasov_decay(const ExperimentConfig& c, Report& rep) {
    const DispersionMap map = map_from(c);
    if (map.tag() != MapTag::Identity) throw ValidationError("params.map", "vlasov-decay uses the identity map");
    const int d = map.d();
    const AnalyticField datum = phase_datum(c, d);
    const auto times = sample_times(c);
    const TransportSolution sol(datum, map);
    const SupOptions opts;
    auto sups = parallel_map(times.size(), [&](std::size_t i) { return sup_velocity_average(sol, times[i], opts); });
    const double a = c.get_real("datum.q_width"), b = c.get_real("datum.p_width");
    Table tab{"sup_velocity_average", {"t", "sup", "oracle", "relative_error", "argmax_spacing"}, {}};
    std::vector<SeriesSample> series;
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const double axis = std::sqrt(2.0 * std::numbers::pi) * a * b / std::sqrt(t * t * b * b + a * a);
        const double oracle = std::pow(axis, d);
        const double err = std::abs(sups[i].value - oracle) / oracle;
        worst = std::max(worst, err);
        tab.rows.push_back({num(t), num(sups[i].value), num(oracle), num(err), num(sups[i].spacing[0])});
        series.push_back({t, sups[i].value, false, ""});
    }
    rep.tables.push_back(tab);
    const DecayFit fit = fit_decay(series, fit_window(c));
    add_fit(rep, "sup_fit", fit);
    check_slope(rep, "decay slope", fit, -d, c.get_real("tolerances.slope"));
    check(rep, "closed-form oracle", worst <= c.get_real("tolerances.identity"), fmt("max relative error %.3g", worst));
}

void transport_degenerate(const ExperimentConfig& c, Report& rep) {
    const DispersionMap map = map_from(c);
    const AnalyticField datum = phase_datum(c, map.d());
    const auto times = sample_times(c);
    const DecayFit fit = transport_decay_experiment(map, datum, times);
    add_fit(rep, "sup_fit", fit);
    const double tol = c.get_real("tolerances.slope");
    switch (map.tag()) {
        case MapTag::MixedD2:
            check(rep, "decay at least t^-1", fit.slope <= -1.0 + tol, fmt("slope %.6f, bound -1 (+%.3g)", fit.slope, tol));
            break;
        case MapTag::Relativistic:
        case MapTag::Identity: check_slope(rep, "decay slope", fit, -map.d(), tol); break;
        case MapTag::SquareD1:
            check(rep, "fit completed", std::isfinite(fit.slope), fmt("slope %.6f", fit.slope));
            break;
    }
}

void counterexample(const ExperimentConfig& c, Report& rep) {
    const auto lambdas = c.get_reals("params.lambdas");
    auto rows = parallel_map(lambdas.size(), [&](std::size_t i) { return counterexample_profile(lambdas[i], lambdas[i]); });
    Table tab{"counterexample", {"lambda", "t", "nu_bar_origin", "lower_bound", "w11_norm", "decay_ratio"}, {}};
    double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0, nmin = wmin;
    bool above_bound = true, monotone = true;
    double prev_ratio = -1.0;
    const double tol = c.get_real("tolerances.inequality");
    for (const auto& r : rows) {
        const double ratio = r.nu_bar_at_origin * std::pow(1.0 + r.t * r.t, 0.05);
        tab.rows.push_back({num(r.lambda), num(r.t), num(r.nu_bar_at_origin), num(r.lower_bound), num(r.w11_norm), num(ratio)});
        wmin = std::min(wmin, r.w11_norm);
        wmax = std::max(wmax, r.w11_norm);
        nmin = std::min(nmin, r.nu_bar_at_origin);
        above_bound = above_bound && r.nu_bar_at_origin >= r.lower_bound - tol;
        monotone = monotone && ratio > prev_ratio;
        prev_ratio = ratio;
    }
    rep.tables.push_back(tab);
    rep.profile["bump"] = "1 on r <= 1, 0 on r >= 2, logistic-exponential transition";
    check(rep, "no decay along t = lambda", nmin >= 0.78, fmt("min nu_bar(lambda, 0) = %.6f", nmin));
    check(rep, "closed-form lower bound", above_bound, "nu_bar >= lower bound at every lambda");
    check(rep, "W11 variation below 10%", wmax / wmin - 1.0 < 0.10,
          fmt("W11 norm from %.6f to %.6f, variation %.4f", wmin, wmax, wmax / wmin - 1.0));
    check(rep, "decay ratio increasing", monotone, "nu_bar(lambda, 0) <lambda>^0.1 increases with lambda");
}

void conservation(const ExperimentConfig& c, Report& rep) {
    const auto times = sample_times(c);
    const double a = c.get_real("datum.q_width"), b = c.get_real("datum.p_width");
    struct Case {
        std::string name;
        TransportSolution sol;
        double h;
    };
    const std::vector<Case> cases = {
        {"identity-d1-gaussian", {AnalyticField::product_gaussian_phase(1, a, b), DispersionMap::identity(1)}, 0.1},
        {"relativistic-d1-gaussian", {AnalyticField::product_gaussian_phase(1, a, b), DispersionMap::relativistic(1)}, 0.1},
        {"square-d1-bump", {AnalyticField::bump(1.0), DispersionMap::square_d1()}, 0.01},
        {"identity-d2-gaussian", {AnalyticField::product_gaussian_phase(2, a, b), DispersionMap::identity(2)}, 0.35},
        {"relativistic-d2-gaussian", {AnalyticField::product_gaussian_phase(2, a, b), DispersionMap::relativistic(2)}, 0.35},
        {"mixed-d2-gaussian", {AnalyticField::product_gaussian_phase(2, a, b), DispersionMap::mixed_d2()}, 0.35},
    };
    Table tab{"conservation", {"case", "functional", "t", "value", "relative_change"}, {}};
    double worst = 0.0;
    for (const auto& cs : cases) {
        for (const auto& row : check_transport_conservation(cs.sol, times, cs.h, cs.h)) {
            tab.rows.push_back({cs.name, row.functional, num(row.t), num(row.value), num(row.relative_change)});
            worst = std::max(worst, row.relative_change);
        }
    }
    rep.tables.push_back(tab);
    const double tol = c.get_real("tolerances.identity");
    check(rep, "functionals constant in time", worst <= tol, fmt("max relative change %.3g, tolerance %.3g", worst, tol));
}

void schrodinger_decay(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const AnalyticField datum = gaussian_datum(c, 1);
    const SampledField u0 = sample(datum, grid);
    const auto disp = DispersionPolynomial::schrodinger();
    const double w = c.get_real("datum.width");
    const std::size_t origin = static_cast<std::size_t>(std::llround(-grid.origin(0) / grid.spacing(0)));
    const auto oracle_times = c.get_reals("time.list");
    const std::vector<double> hs_orders = {0.25, 0.5, 1.0};
    std::vector<double> hs0;
    for (double s : hs_orders) hs0.push_back(hs_norm(u0, s).value);
    const double l20 = l2_norm(u0);

    Table tab{"oracle", {"t", "abs_u_origin", "oracle", "relative_error", "l2_change", "h_quarter_change",
                         "h_half_change", "h_one_change"}, {}};
    double worst_oracle = 0.0, worst_unitary = 0.0, worst_hs = 0.0;
    for (double t : oracle_times) {
        const SampledField u = propagate(u0, disp, t);
        const double value = std::abs(u[origin]);
        const double oracle = std::pow(1.0 + 4.0 * t * t / std::pow(w, 4), -0.25);
        const double err = std::abs(value - oracle) / oracle;
        const double l2c = std::abs(l2_norm(u) - l20) / l20;
        std::vector<std::string> row{num(t), num(value), num(oracle), num(err), num(l2c)};
        for (std::size_t j = 0; j < hs_orders.size(); ++j) {
            const double ch = std::abs(hs_norm(u, hs_orders[j]).value - hs0[j]) / hs0[j];
            worst_hs = std::max(worst_hs, ch);
            row.push_back(num(ch));
        }
        worst_oracle = std::max(worst_oracle, err);
        worst_unitary = std::max(worst_unitary, l2c);
        tab.rows.push_back(std::move(row));
    }
    rep.tables.push_back(tab);

    const auto fit_times = geometric_times(c.get_real("time.t_min"), c.get_real("time.t_max"), c.get_real("time.ratio"));
    auto sups = parallel_map(fit_times.size(), [&](std::size_t i) {
        const SampledField u = propagate(u0, disp, fit_times[i]);
        return SeriesSample{fit_times[i], max_abs(u), wrap_contaminated(u), wrap_contaminated(u) ? "wrap-around contamination" : ""};
    });
    const DecayFit fit = fit_decay(sups);
    add_fit(rep, "sup_fit", fit);
    check(rep, "Gaussian oracle at the origin", worst_oracle <= 1e-8, fmt("max relative error %.3g", worst_oracle));
    check(rep, "unitarity", worst_unitary <= 1e-12, fmt("max relative L2 change %.3g", worst_unitary));
    check(rep, "H^s conservation", worst_hs <= 1e-12, fmt("max relative H^s change %.3g", worst_hs));
    check_slope(rep, "sup-norm slope", fit, -0.5, c.get_real("tolerances.slope"));
}

void schrodinger_ks(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const AnalyticField datum = gaussian_datum(c, 1);
    const SampledField u0 = sample(datum, grid);
    const auto times = sample_times(c);
    const InequalityReport ks = ks_schrodinger_report(u0, times);
    add_inequality(rep, ks);
    check_ratio_stability(rep, ks, c.get_real("tolerances.spread"));

    const auto disp = DispersionPolynomial::schrodinger();
    const auto w = CommutingOperator::schrodinger_boost(0);
    std::vector<double> norm_times{0.0};
    norm_times.insert(norm_times.end(), times.begin(), times.end());
    Table tab{"operator_norms", {"alpha", "t", "norm", "relative_change"}, {}};
    double worst = 0.0;
    for (int alpha = 0; alpha <= 2; ++alpha) {
        std::vector<OperatorPower> ops;
        if (alpha > 0) ops.push_back({w, alpha});
        const auto series = conserved_operator_norm(u0, ops, disp, norm_times);
        for (std::size_t i = 0; i < series.size(); ++i) {
            const double ch = std::abs(series[i] - series[0]) / series[0];
            worst = std::max(worst, ch);
            tab.rows.push_back({num(static_cast<long long>(alpha)), num(norm_times[i]), num(series[i]), num(ch)});
        }
    }
    rep.tables.push_back(tab);
    const double tol = c.get_real("tolerances.identity");
    check(rep, "boost norms conserved", worst <= tol, fmt("max relative change %.3g, tolerance %.3g", worst, tol));

    // two-dimensional product datum against its one-dimensional factors
    const double t2 = 2.0;
    const double w0 = c.get_real("datum.width");
    const GridSpec g1 = GridSpec::centered(1, 32.0, 256);
    const GridSpec g2 = GridSpec::centered(2, 32.0, 256);
    const SampledField f1 = sample(AnalyticField::gaussian({0.0}, w0), g1);
    const SampledField f2 = sample(AnalyticField::gaussian({0.0, 0.0}, w0), g2);
    const InequalitySample s2 = check_ks_schrodinger(f2, t2);
    const SampledField v = propagate(f1, disp, t2);
    const double n0 = l2_norm(v);
    const double n1 = l2_norm(apply_operator(w, v, t2));
    const double n2 = l2_norm(apply_operator(w, apply_operator(w, v, t2), t2));
    const double sup1 = max_abs(v);
    const double lhs_f = t2 * t2 * std::pow(sup1, 4);
    const double rhs_f = 2.0 * n0 * n0 * (n2 * n0 + n1 * n1 + n0 * n2) + 4.0 * n0 * n0 * n1 * n1;
    const double rel = std::abs(s2.ratio() / (lhs_f / rhs_f) - 1.0);
    Table prod{"product_check", {"t", "lhs_2d", "rhs_2d", "lhs_factors", "rhs_factors", "relative_difference"}, {}};
    prod.rows.push_back({num(t2), num(s2.lhs), num(s2.rhs), num(lhs_f), num(rhs_f), num(rel)});
    rep.tables.push_back(prod);
    check(rep, "d = 2 product structure", rel <= 0.1, fmt("ratio differs from the factor prediction by %.3g", rel));
}

DyadicPartition partition_for(const ExperimentConfig& c, const GridSpec& grid) {
    const auto [lo, hi] = resolvable_window(grid);
    const int kmin = c.has("params.k_min") ? static_cast<int>(c.get_int("params.k_min")) : lo;
    const int kmax = c.has("params.k_max") ? static_cast<int>(c.get_int("params.k_max")) : hi;
    return build_dyadic_partition(grid, kmin, kmax);
}

void note_partition(Report& rep, const DyadicPartition& p) {
    rep.profile["dyadic_profile"] = kDyadicProfileId;
    rep.profile["dyadic_window"] = std::to_string(p.k_min()) + ".." + std::to_string(p.k_max());
}

void schrodinger_xnorm(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const AnalyticField datum = gaussian_datum(c, 1);
    const SampledField u0 = sample(datum, grid);
    const DyadicPartition part = partition_for(c, grid);
    note_partition(rep, part);
    const NormValue xn = x_norm(u0, 0.5, 1.0, part);
    check(rep, "datum inside the dyadic shell", !xn.truncated, fmt("outside fraction %.3g", xn.outside_fraction));
    const auto times = sample_times(c);
    const InequalityReport r = check_dispersive_schrodinger(u0, times, part);
    add_inequality(rep, r);
    check_ratio_stability(rep, r, c.get_real("tolerances.spread"));

    // oracle cross-check at t = 25: the peak of |u| stays at the datum center
    const double t = 25.0, w = c.get_real("datum.width");
    const double lhs_oracle = std::sqrt(t) * std::pow(1.0 + 4.0 * t * t / std::pow(w, 4), -0.25);
    const double lhs = std::sqrt(t) * max_abs(propagate(u0, DispersionPolynomial::schrodinger(), t));
    const double err = std::abs(lhs - lhs_oracle) / lhs_oracle;
    Table tab{"oracle", {"t", "lhs", "lhs_oracle", "x_norm", "relative_error"}, {}};
    tab.rows.push_back({num(t), num(lhs), num(lhs_oracle), num(xn.value), num(err)});
    rep.tables.push_back(tab);
    check(rep, "lhs matches the Gaussian oracle", err <= 1e-6, fmt("relative error %.3g at t = 25", err));
}

void lp_decay(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const SampledField u0 = sample(gaussian_datum(c, 1), grid);
    const DyadicPartition part = partition_for(c, grid);
    note_partition(rep, part);
    const auto times = sample_times(c);
    const double tol = c.get_real("tolerances.slope");
    Table norms{"data_norms", {"theta", "weighted_l2", "x_norm", "hs_norm"}, {}};
    for (double theta : c.get_reals("params.theta")) {
        const LpDecayResult res = check_lp_decay(u0, theta, times, part);
        norms.rows.push_back({num(theta), num(res.weighted_norm), num(res.x_norm), num(res.hs_norm)});
        InequalityReport a = res.untruncated, b = res.truncated;
        a.name += "-theta-" + num(theta);
        b.name += "-theta-" + num(theta);
        add_inequality(rep, a);
        add_inequality(rep, b);
        check(rep, a.name + " holds", a.pass && b.pass, fmt("max ratios %.6g and %.6g", a.max_ratio, b.max_ratio));
        if (theta == 0.0) {
            double dev = 0.0;
            for (const auto& s : a.samples) dev = std::max(dev, std::abs(s.ratio() - 1.0));
            check(rep, "theta = 0 ratio is one", dev <= 1e-12, fmt("max |ratio - 1| = %.3g", dev));
        } else if (res.fit) {
            add_fit(rep, "lp_fit-theta-" + num(theta), *res.fit);
            check_slope(rep, "L^p slope at theta = " + num(theta), *res.fit, -0.5 * theta, tol);
        } else {
            check(rep, "L^p slope at theta = " + num(theta), false, "fewer than five uncontaminated samples");
        }
    }
    rep.tables.push_back(norms);
}

void local_mass(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const SampledField u0 = sample(gaussian_datum(c, 1), grid);
    const DyadicPartition part = partition_for(c, grid);
    note_partition(rep, part);
    const auto times = sample_times(c);
    for (double sigma : c.get_reals("params.sigma")) {
        InequalityReport r = check_local_mass(u0, sigma, times, part);
        r.name += "-sigma-" + num(sigma);
        add_inequality(rep, r);
        check_ratio_stability(rep, r, c.get_real("tolerances.spread"));
        if (sigma == 0.0) {
            bool inside = true;
            for (const auto& s : r.samples)
                inside = inside && s.ratio() >= std::sqrt(0.5) - 1e-12 && s.ratio() <= std::sqrt(2.0) + 1e-12;
            check(rep, "sigma = 0 sandwich", inside, fmt("ratios in [%.6f, %.6f]", r.min_ratio, r.max_ratio));
        }
    }
}

void cube_translation(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const DyadicPartition part = partition_for(c, grid);
    note_partition(rep, part);
    const double theta = 0.5;  // d / 2
    Table tab{"cube_translation", {"center", "l1_norm", "x_norm", "translated_x_norm", "shift", "ratio", "truncated"}, {}};
    const auto centers = c.get_reals("params.centers");
    auto rows = parallel_map(centers.size(), [&](std::size_t i) {
        const AnalyticField cube = AnalyticField::cube({centers[i]}, 1.0);
        const NormValue plain = x_norm(sample(cube, grid, true), theta, 1.0, part);
        ShiftSearch search;
        search.window = {{centers[i] - 4.0, centers[i] + 4.0}};
        const NormValue best = translated_xnorm_inf(cube, theta, 1.0, part, search);
        return std::make_pair(plain, best);
    });
    double shared_c = 0.0, plain_far = 0.0, best_far = 1.0, far_center = -1.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto& [plain, best] = rows[i];
        const double l1 = 1.0;
        const double ratio = best.value / l1;
        shared_c = std::max(shared_c, ratio);
        tab.rows.push_back({num(centers[i]), num(l1), num(plain.value), num(best.value), num(best.shift[0]), num(ratio),
                            best.truncated ? num(best.outside_fraction) : "0"});
        if (std::abs(centers[i]) > far_center) {
            far_center = std::abs(centers[i]);
            plain_far = plain.value;
            best_far = best.value;
        }
    }
    rep.tables.push_back(tab);
    check(rep, "shared constant", std::isfinite(shared_c) && shared_c > 0.0, fmt("C = %.6f", shared_c));
    check(rep, "translation gains a factor 2 at the farthest center", plain_far >= 2.0 * best_far,
          fmt("untranslated %.6f vs translated %.6f", plain_far, best_far));
}

SampledField real_gaussian(const ExperimentConfig& c, const GridSpec& grid) {
    return SampledField::real_part_of(sample(gaussian_datum(c, 1), grid), 0.0);
}

void airy_pointwise(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const SampledField u0 = real_gaussian(c, grid);
    const auto times = c.get_reals("time.list");
    const InequalityReport r = check_airy_pointwise(u0, times, {c.get_real("params.probe_min"), c.get_real("params.probe_max")});
    add_inequality(rep, r);
    check(rep, "pointwise estimate holds", r.pass, fmt("max lhs / rhs = %.6f", r.max_ratio));
    const double rhs = airy_pointwise_rhs(u0);
    const double w = c.get_real("datum.width");
    // closed-form moments of exp(-x^2 / (2 w^2)): ||u||^2 = w sqrt(pi), ||u'|| ||x u|| = ||u||^2 / 2
    const double n2 = w * std::sqrt(std::numbers::pi);
    const double oracle = 2.0 * n2;
    check(rep, "rhs matches the Gaussian moments", std::abs(rhs - oracle) <= 1e-9 * oracle,
          fmt("rhs %.12f, closed form %.12f", rhs, oracle));
    const auto fit_times = geometric_times(c.get_real("time.t_min"), c.get_real("time.t_max"), c.get_real("time.ratio"));
    std::vector<double> ft = fit_times;
    if (ft.back() < c.get_real("time.t_max") * (1.0 - 1e-9)) ft.push_back(c.get_real("time.t_max"));
    const AiryDecayResult res = airy_decay_experiment(u0, ft);
    add_fit(rep, "right_gradient_fit", res.right_gradient);
    check_slope(rep, "right half-line gradient slope", res.right_gradient, -0.5, c.get_real("tolerances.slope"));
}

void airy_decay(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const SampledField u0 = real_gaussian(c, grid);
    const AiryDecayResult res = airy_decay_experiment(u0, sample_times(c));
    add_fit(rep, "sup_fit", res.sup_fit);
    check_slope(rep, "sup-norm slope", res.sup_fit, -1.0 / 3.0, c.get_real("tolerances.slope"));
}

void airy_local_energy(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const SampledField u0 = real_gaussian(c, grid);
    const double eps = c.get_real("params.epsilon");
    const auto sizing = size_box(gaussian_datum(c, 1), DispersionPolynomial::airy(), c.get_real("time.t_max"));
    rep.profile["box_rule_half_width"] = num(sizing.required_half_width);
    rep.profile["box_rule_spacing"] = num(sizing.required_spacing);
    check(rep, "box satisfies the sizing rule",
          grid.extent(0) / 2.0 >= sizing.required_half_width && grid.spacing(0) <= sizing.required_spacing,
          fmt("half-width %.1f (rule %.1f), spacing %.4f", grid.extent(0) / 2.0, sizing.required_half_width,
              grid.spacing(0)));
    const AiryLocalEnergyResult res = check_airy_local_energy(u0, eps, sample_times(c));
    add_inequality(rep, res.report);
    check(rep, "local energy bounded by the data constant", res.report.pass, fmt("max ratio %.6f", res.report.max_ratio));
    const DecayFit fit = fit_decay(res.energy, fit_window(c));
    add_fit(rep, "energy_fit", fit);
    const double tol = c.get_real("tolerances.slope");
    check(rep, "weighted energy slope", fit.slope <= -1.0 + tol, fmt("slope %.6f, bound -1 + %.3g", fit.slope, tol));
}

void monomial_2k(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const SampledField u0 = sample(gaussian_datum(c, 1), grid);
    const auto times = sample_times(c);
    for (long long k : c.get_ints("params.k")) {
        const InequalityReport r = check_monomial_estimate(static_cast<int>(k), u0, times);
        add_inequality(rep, r);
        check(rep, r.name + " finite ratio", r.pass, fmt("max ratio %.6g, min ratio %.6g", r.max_ratio, r.min_ratio));
    }
}

void commutation_suite(const ExperimentConfig& c, Report& rep) {
    const GridSpec grid = line_grid(c);
    const auto data = band_limited_suite(grid, static_cast<std::size_t>(c.get_int("params.samples")),
                                         static_cast<std::uint64_t>(c.get_int("experiment.seed")));
    std::vector<int> degrees;
    for (long long m : c.get_ints("params.degrees")) degrees.push_back(static_cast<int>(m));
    const auto res = run_commutation_suite(degrees, data, c.get_reals("time.list"));
    Table ops{"derived_operators", {"degree", "a_real", "a_imag", "b_real", "b_imag", "form"}, {}};
    for (const auto& op : res.operators)
        ops.rows.push_back({num(static_cast<long long>(op.m)), num(op.a.real()), num(op.a.imag()), num(op.b.real()),
                            num(op.b.imag()), op.describe()});
    rep.tables.push_back(ops);
    Table tab{"residuals", {"degree", "datum", "t", "residual", "residual_a_perturbed", "residual_b_perturbed"}, {}};
    for (const auto& r : res.rows)
        tab.rows.push_back({num(static_cast<long long>(r.degree)), num(r.datum), num(r.t), num(r.residual),
                            num(r.residual_a_perturbed), num(r.residual_b_perturbed)});
    rep.tables.push_back(tab);
    check(rep, "derived operators commute", res.max_residual <= c.get_real("tolerances.identity"),
          fmt("max residual %.3g", res.max_residual));
    check(rep, "perturbed operators detected", res.min_perturbed > 1e-3,
          fmt("smallest perturbed residual %.3g", res.min_perturbed));
    for (const auto& op : res.operators) {
        if (op.m == 2)
            check(rep, "m = 2 gives 2t d + ix", op.a == 2.0 && op.b == cplx(0.0, 1.0), op.describe());
        if (op.m == 3) check(rep, "m = 3 gives 3t d^2 + x", op.a == 3.0 && op.b == 1.0, op.describe());
    }
    // the two Schrodinger boosts commute on two-dimensional data
    const GridSpec g2 = GridSpec::centered(2, 16.0, 128);
    const SampledField u = sample(AnalyticField::gaussian({1.0, -0.5}, 1.5, {0.3, 0.3}), g2);
    const double comm = boost_commutator_norm(propagate(u, DispersionPolynomial::schrodinger(), 1.0), 1.0);
    check(rep, "boosts commute pairwise", comm <= 1e-12 * l2_norm(u), fmt("||[W_0, W_1] u|| / ||u|| = %.3g", comm / l2_norm(u)));
}

using Runner = std::function<void(const ExperimentConfig&, Report&)>;

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table = {
        {"vlasov-decay", vlasov_decay},
        {"transport-degenerate", transport_degenerate},
        {"counterexample", counterexample},
        {"conservation", conservation},
        {"schrodinger-decay", schrodinger_decay},
        {"schrodinger-ks", schrodinger_ks},
        {"schrodinger-xnorm", schrodinger_xnorm},
        {"lp-decay", lp_decay},
        {"local-mass", local_mass},
        {"cube-translation", cube_translation},
        {"airy-pointwise", airy_pointwise},
        {"airy-local-energy", airy_local_energy},
        {"airy-decay", airy_decay},
        {"monomial-2k", monomial_2k},
        {"commutation-suite", commutation_suite},
    };
    return table;
}

nlohmann::json fit_json(const DecayFit& f) {
    nlohmann::json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["max_abs_residual"] = f.max_abs_residual;
    j["window"] = {f.window.lo, f.window.hi};
    j["used"] = f.used;
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& s : f.excluded_samples) ex.push_back({{"t", s.t}, {"reason", s.reason}});
    j["excluded_samples"] = ex;
    return j;
}

nlohmann::json bound_json(double v) {
    if (std::isinf(v)) return "empirical";
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

std::string Table::to_tsv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "\t" : "") + columns[i];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "\t" : "") + row[i];
        out += "\n";
    }
    return out;
}

bool Report::pass() const {
    if (status != RunStatus::Completed || checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

int Report::exit_code() const {
    if (status == RunStatus::Contaminated) return 3;
    return pass() ? 0 : 1;
}

std::string Report::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["experiment"] = config.id();
    j["anchor"] = anchor;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : config.values()) cfg[k] = v;
    j["config"] = cfg;
    j["profile"] = profile;
    j["status"] = status == RunStatus::Completed ? "completed" : "contaminated";
    if (!error.empty()) j["error"] = error;
    j["pass"] = pass();
    nlohmann::ordered_json checks_json = nlohmann::ordered_json::array();
    for (const auto& c : checks) checks_json.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks_json;
    nlohmann::ordered_json fits_json = nlohmann::ordered_json::object();
    for (const auto& [name, f] : fits) fits_json[name] = fit_json(f);
    j["fits"] = fits_json;
    nlohmann::ordered_json ineq = nlohmann::ordered_json::array();
    for (const auto& r : inequalities) {
        std::size_t excluded = 0;
        for (const auto& s : r.samples) excluded += s.excluded ? 1 : 0;
        ineq.push_back({{"name", r.name},
                        {"anchor", r.anchor},
                        {"samples", r.samples.size()},
                        {"excluded", excluded},
                        {"max_ratio", r.max_ratio},
                        {"min_ratio", r.min_ratio},
                        {"declared_bound", bound_json(r.declared_bound)},
                        {"tolerance", r.tolerance},
                        {"pass", r.pass}});
    }
    j["inequalities"] = ineq;
    nlohmann::ordered_json tables_json = nlohmann::ordered_json::array();
    for (const auto& t : tables) tables_json.push_back({{"name", t.name}, {"file", t.name + ".tsv"}, {"columns", t.columns}, {"rows", t.rows.size()}});
    j["tables"] = tables_json;
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j.dump(2) + "\n";
}

Report run(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Report rep;
    rep.config = config.resolved();
    const CatalogEntry* entry = find_catalog_entry(rep.config.id());
    rep.anchor = entry->anchor;
    try {
        runners().at(rep.config.id())(rep.config, rep);
    } catch (const InsufficientWindowError& e) {
        rep.status = RunStatus::Contaminated;
        rep.error = e.what();
    }
    rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

void write_report(const Report& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(base / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (base / name).string());
        out << text;
    };
    write("report.json", report.to_json());
    write("config.ini", report.config.emit());
    for (const auto& t : report.tables) write(t.name + ".tsv", t.to_tsv());
}

// ---------------------------------------------------------------------------------------------
// catalog

const std::vector<CatalogEntry>& list_catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"vlasov-decay", "sup_q nu_bar(t, q) <~ <t>^{-d} for free transport",
         "Sup of the velocity average for a phase-space Gaussian, fitted against t",
         R"([experiment]
id = vlasov-decay
[datum]
family = product-gaussian-phase
q_width = 0.70710678118654757
p_width = 0.70710678118654757
[time]
t_min = 10
t_max = 10000
ratio = 1.4142135623730951
[params]
map = identity
d = 1
[tolerances]
slope = 0.02
identity = 1e-08
)"},
        {"transport-degenerate", "decay of velocity averages for dispersion maps of lower rank",
         "Fitted decay rate of sup nu_bar for the mixed map (p1, p2^2) or the relativistic map",
         R"([experiment]
id = transport-degenerate
[datum]
family = product-gaussian-phase
q_width = 0.70710678118654757
p_width = 0.70710678118654757
[time]
t_min = 10
t_max = 1000
ratio = 1.4142135623730951
[params]
map = mixed-d2
d = 2
[tolerances]
slope = 0
)"},
        {"counterexample", "no uniform decay for w = p^2 with bounded W^{1,1} data",
         "nu_bar(lambda, 0) for the scaled bump, its closed-form lower bound and the W^{1,1} norm",
         R"([experiment]
id = counterexample
[params]
lambdas = 4, 16, 64
[tolerances]
inequality = 1e-06
)"},
        {"conservation", "integrals of F(p, nu) are constant in time",
         "Mass, L^2 and kinetic energy of transported data for every built-in map",
         R"([experiment]
id = conservation
[datum]
family = product-gaussian-phase
q_width = 0.70710678118654757
p_width = 0.70710678118654757
[time]
list = 0, 1, 2, 5, 10
[tolerances]
identity = 1e-08
)"},
        {"schrodinger-decay", "|u(t)| of a Gaussian under d_t u + i u_xx = 0, unitarity, H^s conservation",
         "Closed-form Gaussian check of the propagator and the t^{-1/2} sup-norm decay",
         R"([experiment]
id = schrodinger-decay
[grid]
half_width = 1024
points = 8192
[datum]
family = gaussian
width = 1
[time]
t_min = 5
t_max = 50
ratio = 1.4142135623730951
list = 1, 5, 25
[tolerances]
slope = 0.03
)"},
        {"schrodinger-ks", "|t|^d ||u(t)||_inf^2 <~ sum ||W^a u|| ||W^b u||, W = t d + (i/2) x",
         "Klainerman-Sobolev check for Schrodinger and conservation of boost norms",
         R"([experiment]
id = schrodinger-ks
[grid]
half_width = 2048
points = 16384
[datum]
family = gaussian
width = 1
[time]
t_min = 1
t_max = 100
ratio = 1.4142135623730951
[tolerances]
identity = 1e-09
spread = 2
)"},
        {"schrodinger-xnorm", "|t|^{d/2} ||u(t)||_inf <~ ||u0||_{X^{d/2,1}}",
         "Dispersive estimate with the dyadic X-norm of shell-supported data",
         R"([experiment]
id = schrodinger-xnorm
[grid]
half_width = 4096
points = 65536
[datum]
family = gaussian
center = 3
width = 0.34999999999999998
[time]
t_min = 1
t_max = 100
ratio = 1.4142135623730951
[params]
k_min = -1
k_max = 11
[tolerances]
spread = 2
)"},
        {"lp-decay", "|t|^{theta d/2} ||u(t)||_{L^{2/(1-theta)}} <~ ||u0||_{X^{theta d/2,2}}",
         "L^p decay by interpolation, untruncated and with the <t> weight",
         R"([experiment]
id = lp-decay
[grid]
half_width = 4096
points = 65536
[datum]
family = gaussian
center = 3
width = 0.34999999999999998
[time]
t_min = 5
t_max = 50
ratio = 1.4142135623730951
[params]
theta = 0, 0.5
k_min = -1
k_max = 11
[tolerances]
slope = 0.05
)"},
        {"local-mass", "|t|^sigma ||U(t) f||_{X^{-sigma,2}} <~ ||f||_{X^{sigma,2}}",
         "Local mass decay measured in dyadic weighted norms",
         R"([experiment]
id = local-mass
[grid]
half_width = 4096
points = 65536
[datum]
family = gaussian
center = 3
width = 0.34999999999999998
[time]
t_min = 1
t_max = 100
ratio = 1.4142135623730951
[params]
sigma = 0, 0.25
k_min = -1
k_max = 11
[tolerances]
spread = 2
)"},
        {"cube-translation", "inf_y ||tau_y chi||_{X^{d/2,1}} <~ ||chi||_{L^1} for cube indicators",
         "Translation-optimized X-norm of unit cubes at several centers",
         R"([experiment]
id = cube-translation
[grid]
half_width = 32
points = 8192
[params]
centers = 0, 3, 10
k_min = -5
k_max = 4
)"},
        {"airy-pointwise", "3t (d_x u)^2 + x u^2 <= 2 ||d_x u0|| ||x u0|| + ||u0||^2",
         "Weighted pointwise Airy estimate on a probe window and gradient decay on x >= 0",
         R"([experiment]
id = airy-pointwise
[grid]
half_width = 1500
points = 32768
[datum]
family = gaussian
width = 0.70710678118654757
[time]
list = 0, 0.25, 0.5, 1, 1.5, 2, 3, 4, 6, 8, 10, 12, 14, 16, 18, 20
t_min = 2
t_max = 20
ratio = 1.4142135623730951
[params]
probe_min = -50
probe_max = 50
[tolerances]
slope = 0.1
)"},
        {"airy-local-energy", "|t| ||<x>^{-1/2-eps} d_x u(t)||^2 <~ data constant",
         "Local energy decay for Airy on a box sized by the group-speed rule",
         R"([experiment]
id = airy-local-energy
[grid]
half_width = 8192
points = 131072
[datum]
family = gaussian
width = 0.70710678118654757
[time]
t_min = 1
t_max = 50
ratio = 1.4142135623730951
fit_min = 2
fit_max = 50
[params]
epsilon = 0.5
[tolerances]
slope = 0.1
)"},
        {"airy-decay", "|t|^{1/3} |u(t, x)| <~ ||u0||_{L^1}",
         "Sup-norm decay rate for Airy on uncontaminated samples",
         R"([experiment]
id = airy-decay
[grid]
half_width = 1500
points = 32768
[datum]
family = gaussian
width = 0.70710678118654757
[time]
t_min = 2
t_max = 20
ratio = 1.4142135623730951
[tolerances]
slope = 0.1
)"},
        {"monomial-2k", "t |d^{2k-2} u|^2 <~ ||d^{2k-2} u|| ||x u|| for i d_t u + d^{2k} u = 0",
         "Pointwise estimate for the second- and fourth-order equations",
         R"([experiment]
id = monomial-2k
[grid]
half_width = 4096
points = 16384
[datum]
family = gaussian
width = 2
[time]
t_min = 1
t_max = 20
ratio = 1.4142135623730951
[params]
k = 1, 2
)"},
        {"commutation-suite", "a t d^{m-1} + b x commutes with the evolution for the derived (a, b)",
         "Symbol-level derivation of the commuting operators and their residuals on random data",
         R"([experiment]
id = commutation-suite
seed = 20240601
[grid]
half_width = 4096
points = 32768
[time]
list = 0.1, 1, 10
[params]
degrees = 2, 3, 4
samples = 20
[tolerances]
identity = 1e-09
)"},
    };
    return entries;
}

const CatalogEntry* find_catalog_entry(const std::string& id) {
    for (const auto& e : list_catalog())
        if (e.id == id) return &e;
    return nullptr;
}

}  // namespace decaylab
