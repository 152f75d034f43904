#include "decaylab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "decaylab/errors.hpp"
#include "decaylab/fft.hpp"
#include "decaylab/parallel.hpp"

namespace decaylab {

namespace {

const DispersionPolynomial kSchrodinger = DispersionPolynomial::schrodinger();

constexpr const char* kWrapReason = "wrap-around contamination";

std::vector<double> real_values(const SampledField& f) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i].real();
    return v;
}

SampledField times_coordinate(const SampledField& u) {
    std::vector<cplx> v(u.values().begin(), u.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= u.point(i)[0];
    return SampledField(u.grid(), std::move(v), FieldKind::Complex);
}

void require_1d(const SampledField& u, const char* what) {
    if (u.grid().dim() != 1) throw UnsupportedError(std::string(what) + ": one-dimensional data only");
}

InequalityReport make_report(std::string name, std::string anchor, std::vector<InequalitySample> samples,
                             double bound = std::numeric_limits<double>::infinity()) {
    InequalityReport r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.samples = std::move(samples);
    r.declared_bound = bound;
    r.finalize();
    return r;
}

}  // namespace

InequalityReport check_dispersive_schrodinger(const SampledField& u0, const std::vector<double>& times,
                                              const DyadicPartition& partition) {
    const double d = u0.grid().dim();
    const double rhs = x_norm(u0, 0.5 * d, 1.0, partition).value;
    auto samples = parallel_map(times.size(), [&](std::size_t i) {
        const double t = times[i];
        const SampledField u = propagate(u0, kSchrodinger, t);
        InequalitySample s;
        s.t = t;
        s.lhs = std::pow(std::abs(t), 0.5 * d) * max_abs(u);
        s.rhs = rhs;
        if (wrap_contaminated(u)) {
            s.excluded = true;
            s.reason = kWrapReason;
        }
        return s;
    });
    return make_report("schrodinger-dispersive", "|t|^{d/2} ||u(t)||_inf <= C ||u0||_{X^{d/2,1}}", std::move(samples));
}

InequalitySample check_ks_schrodinger(const SampledField& u0, double t) {
    const int d = u0.grid().dim();
    const SampledField u = propagate(u0, kSchrodinger, t);
    InequalitySample s;
    s.t = t;
    const double sup = max_abs(u);
    s.lhs = std::pow(std::abs(t), d) * sup * sup;
    const auto w0 = CommutingOperator::schrodinger_boost(0);
    const double n = l2_norm(u);
    if (d == 1) {
        s.rhs = 2.0 * n * l2_norm(apply_operator(w0, u, t));
    } else {
        const auto w1 = CommutingOperator::schrodinger_boost(1);
        const SampledField a = apply_operator(w0, u, t);
        const SampledField b = apply_operator(w1, u, t);
        const double n00 = l2_norm(apply_operator(w0, a, t));
        const double n01 = l2_norm(apply_operator(w1, a, t));
        const double n11 = l2_norm(apply_operator(w1, b, t));
        const double n0 = l2_norm(a), n1 = l2_norm(b);
        s.rhs = 2.0 * n * (n00 + n01 + n11) + (n0 + n1) * (n0 + n1);
    }
    if (wrap_contaminated(u)) {
        s.excluded = true;
        s.reason = kWrapReason;
    }
    return s;
}

InequalityReport ks_schrodinger_report(const SampledField& u0, const std::vector<double>& times) {
    auto samples = parallel_map(times.size(), [&](std::size_t i) { return check_ks_schrodinger(u0, times[i]); });
    return make_report("schrodinger-ks", "|t|^d ||u(t)||_inf^2 <= C sum ||W^a u|| ||W^b u||", std::move(samples));
}

LpDecayResult check_lp_decay(const SampledField& u0, double theta, const std::vector<double>& times,
                             const DyadicPartition& partition) {
    require_1d(u0, "check_lp_decay");
    if (!(theta >= 0.0 && theta < 1.0)) throw RangeError("check_lp_decay: theta must lie in [0, 1)");
    const double d = 1.0;
    const double p = 2.0 / (1.0 - theta);
    const double s = 0.5 * theta * d;
    LpDecayResult res;
    res.x_norm = x_norm(u0, s, 2.0, partition).value;
    res.hs_norm = hs_norm(u0, s).value;
    res.weighted_norm = weighted_l2(u0, Weight::Power, s).value;
    struct Row {
        InequalitySample plain, bracket;
        SeriesSample series;
    };
    auto rows = parallel_map(times.size(), [&](std::size_t i) {
        const double t = times[i];
        const SampledField u = propagate(u0, kSchrodinger, t);
        const double lp = lp_norm(u, p).value;
        Row r;
        r.plain.t = r.bracket.t = t;
        r.plain.lhs = (s == 0.0 ? 1.0 : std::pow(std::abs(t), s)) * lp;
        r.plain.rhs = res.weighted_norm;
        r.bracket.lhs = std::pow(1.0 + t * t, 0.5 * s) * lp;
        r.bracket.rhs = res.x_norm + res.hs_norm;
        r.series = {t, lp, false, ""};
        if (wrap_contaminated(u)) {
            r.plain.excluded = r.bracket.excluded = r.series.excluded = true;
            r.plain.reason = r.bracket.reason = r.series.reason = kWrapReason;
        }
        return r;
    });
    std::vector<InequalitySample> plain, bracket;
    std::vector<SeriesSample> series;
    for (const auto& r : rows) {
        plain.push_back(r.plain);
        bracket.push_back(r.bracket);
        series.push_back(r.series);
    }
    res.untruncated = make_report("lp-decay-untruncated", "|t|^{theta d/2} ||u(t)||_{L^p} <= C ||u0||_{X^{theta d/2,2}}",
                                  std::move(plain));
    res.truncated = make_report("lp-decay-truncated",
                                "<t>^{theta d/2} ||u(t)||_{L^p} <= C (||u0||_{X^{theta d/2,2}} + ||u0||_{H^{theta d/2}})",
                                std::move(bracket));
    if (theta > 0.0) {
        std::size_t usable = 0;
        for (const auto& x : series) usable += x.excluded ? 0 : 1;
        if (usable >= 5) res.fit = fit_decay(series);
    }
    return res;
}

InequalityReport check_local_mass(const SampledField& u0, double sigma, const std::vector<double>& times,
                                  const DyadicPartition& partition) {
    require_1d(u0, "check_local_mass");
    if (!(sigma >= 0.0 && sigma < 0.5)) throw RangeError("check_local_mass: sigma must lie in [0, d/2)");
    const double rhs = x_norm(u0, sigma, 2.0, partition).value;
    auto samples = parallel_map(times.size(), [&](std::size_t i) {
        const double t = times[i];
        const SampledField u = propagate(u0, kSchrodinger, t);
        InequalitySample s;
        s.t = t;
        s.lhs = (sigma == 0.0 ? 1.0 : std::pow(std::abs(t), sigma)) * x_norm(u, -sigma, 2.0, partition).value;
        s.rhs = rhs;
        if (wrap_contaminated(u)) {
            s.excluded = true;
            s.reason = kWrapReason;
        }
        return s;
    });
    return make_report("local-mass", "|t|^sigma ||U(t) f||_{X^{-sigma,2}} <= C ||f||_{X^{sigma,2}}", std::move(samples));
}

double airy_pointwise_rhs(const SampledField& u0) {
    const double n = l2_norm(u0);
    return 2.0 * l2_norm(spectral_derivative(u0, 1)) * l2_norm(times_coordinate(u0)) + n * n;
}

InequalityReport check_airy_pointwise(const SampledField& u0, const std::vector<double>& times, Interval probes) {
    require_1d(u0, "check_airy_pointwise");
    const auto airy = DispersionPolynomial::airy();
    const double rhs = airy_pointwise_rhs(u0);
    auto blocks = parallel_map(times.size(), [&](std::size_t i) {
        const double t = times[i];
        if (t < 0.0) throw RangeError("check_airy_pointwise: t must be nonnegative");
        const SampledField u = propagate(u0, airy, t);
        const auto v = real_values(u);
        const auto dv = real_values(spectral_derivative(u, 1));
        const bool wrapped = wrap_contaminated(u);
        std::vector<InequalitySample> out;
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double x = u.grid().coord(0, j);
            if (x < probes.lo || x > probes.hi) continue;
            InequalitySample s;
            s.t = t;
            s.x = x;
            s.lhs = 3.0 * t * dv[j] * dv[j] + x * v[j] * v[j];
            s.rhs = rhs;
            if (wrapped) {
                s.excluded = true;
                s.reason = kWrapReason;
            }
            out.push_back(s);
        }
        return out;
    });
    std::vector<InequalitySample> samples;
    for (auto& b : blocks) samples.insert(samples.end(), b.begin(), b.end());
    return make_report("airy-pointwise", "3t (d_x u)^2 + x u^2 <= 2 ||d_x u0|| ||x u0|| + ||u0||^2", std::move(samples),
                       1.0);
}

AiryLocalEnergyResult check_airy_local_energy(const SampledField& u0, double eps, const std::vector<double>& times) {
    require_1d(u0, "check_airy_local_energy");
    if (!(eps > 0.0)) throw RangeError("check_airy_local_energy: eps must be positive");
    const auto airy = DispersionPolynomial::airy();
    const double n = l2_norm(u0);
    const double weight_integral = std::sqrt(std::numbers::pi) * std::tgamma(eps) / std::tgamma(0.5 + eps);
    const double rhs = (airy_pointwise_rhs(u0) * weight_integral + n * n) / 3.0;
    struct Row {
        InequalitySample s;
        SeriesSample e;
    };
    auto rows = parallel_map(times.size(), [&](std::size_t i) {
        const double t = times[i];
        const SampledField u = propagate(u0, airy, t);
        const SampledField du = spectral_derivative(u, 1);
        const double w = weighted_l2(du, Weight::Japanese, -0.5 - eps).value;
        Row r;
        r.s.t = r.e.t = t;
        r.s.lhs = std::abs(t) * w * w;
        r.s.rhs = rhs;
        r.e.value = w * w;
        if (wrap_contaminated(u)) {
            r.s.excluded = r.e.excluded = true;
            r.s.reason = r.e.reason = kWrapReason;
        }
        return r;
    });
    AiryLocalEnergyResult res;
    std::vector<InequalitySample> samples;
    for (const auto& r : rows) {
        samples.push_back(r.s);
        res.energy.push_back(r.e);
    }
    res.report = make_report("airy-local-energy", "|t| ||<x>^{-1/2-eps} d_x u(t)||^2 <= (C I_eps + ||u0||^2) / 3",
                             std::move(samples), 1.0);
    return res;
}

InequalityReport check_monomial_estimate(int k, const SampledField& u0, const std::vector<double>& times) {
    require_1d(u0, "check_monomial_estimate");
    if (k < 1 || k > 2) throw RangeError("check_monomial_estimate: k must be 1 or 2");
    const auto disp = DispersionPolynomial::even_order(k);
    const int order = 2 * k - 2;
    const double rhs = l2_norm(spectral_derivative(u0, order)) * l2_norm(times_coordinate(u0));
    auto samples = parallel_map(times.size(), [&](std::size_t i) {
        const double t = times[i];
        const SampledField u = propagate(u0, disp, t);
        const double sup = max_abs(spectral_derivative(u, order));
        InequalitySample s;
        s.t = t;
        s.lhs = std::abs(t) * sup * sup;
        s.rhs = rhs;
        if (wrap_contaminated(u)) {
            s.excluded = true;
            s.reason = kWrapReason;
        }
        return s;
    });
    return make_report("monomial-" + std::to_string(2 * k), "t |d^{2k-2} u|^2 <= C ||d^{2k-2} u|| ||x u||",
                       std::move(samples));
}

AiryDecayResult airy_decay_experiment(const SampledField& u0, const std::vector<double>& times) {
    require_1d(u0, "airy_decay_experiment");
    const auto airy = DispersionPolynomial::airy();
    struct Row {
        SeriesSample sup, grad;
    };
    auto rows = parallel_map(times.size(), [&](std::size_t i) {
        const double t = times[i];
        const SampledField u = propagate(u0, airy, t);
        const SampledField du = spectral_derivative(u, 1);
        double right = 0.0;
        for (std::size_t j = 0; j < du.size(); ++j)
            if (du.grid().coord(0, j) >= 0.0) right = std::max(right, std::abs(du[j]));
        Row r{{t, max_abs(u), false, ""}, {t, right, false, ""}};
        if (wrap_contaminated(u)) {
            r.sup.excluded = r.grad.excluded = true;
            r.sup.reason = r.grad.reason = kWrapReason;
        }
        return r;
    });
    std::vector<SeriesSample> sup, grad;
    for (const auto& r : rows) {
        sup.push_back(r.sup);
        grad.push_back(r.grad);
    }
    return {fit_decay(sup), fit_decay(grad)};
}

std::vector<SampledField> band_limited_suite(const GridSpec& grid, std::size_t count, std::uint64_t seed) {
    if (grid.dim() != 1) throw UnsupportedError("band_limited_suite: one-dimensional grids only");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> terms(1, 3);
    std::uniform_real_distribution<double> center(-8.0, 8.0), width(2.5, 4.0), mod(-0.5, 0.5), amp(0.5, 1.0),
        phase(0.0, 2.0 * std::numbers::pi);
    std::vector<SampledField> out;
    for (std::size_t n = 0; n < count; ++n) {
        const int m = terms(rng);
        SampledField f = SampledField::zeros(grid, FieldKind::Complex);
        for (int j = 0; j < m; ++j) {
            Gaussian g;
            g.center = {center(rng)};
            g.width = {width(rng)};
            g.modulation = {mod(rng)};
            const double a = amp(rng);
            g.amplitude = std::polar(a, phase(rng));
            f = f + sample(AnalyticField(g), grid);
        }
        out.push_back(SampledField(grid, std::vector<cplx>(f.values().begin(), f.values().end()), FieldKind::Complex));
    }
    return out;
}

DispersionPolynomial dispersion_for_degree(int m) {
    if (m == 2) return DispersionPolynomial::schrodinger();
    if (m == 3) return DispersionPolynomial::airy();
    if (m >= 4 && m % 2 == 0) return DispersionPolynomial::even_order(m / 2);
    throw UnsupportedError("no built-in dispersive equation of degree " + std::to_string(m));
}

CommutationSuiteResult run_commutation_suite(const std::vector<int>& degrees, const std::vector<SampledField>& data,
                                             const std::vector<double>& times) {
    CommutationSuiteResult res;
    struct Job {
        std::size_t deg, datum, time;
    };
    std::vector<Job> jobs;
    for (std::size_t a = 0; a < degrees.size(); ++a) {
        res.operators.push_back(derive_commuting_operator(dispersion_for_degree(degrees[a])));
        for (std::size_t b = 0; b < data.size(); ++b)
            for (std::size_t c = 0; c < times.size(); ++c) jobs.push_back({a, b, c});
    }
    res.rows = parallel_map(jobs.size(), [&](std::size_t i) {
        const Job& j = jobs[i];
        const auto disp = dispersion_for_degree(degrees[j.deg]);
        const auto& op = res.operators[j.deg];
        const double t = times[j.time];
        CommutationRow row;
        row.degree = degrees[j.deg];
        row.datum = j.datum;
        row.t = t;
        row.residual = commutation_residual(op, disp, data[j.datum], t).value;
        row.residual_a_perturbed =
            commutation_residual(CommutingOperator::monomial(op.m, 1.1 * op.a, op.b), disp, data[j.datum], t).value;
        row.residual_b_perturbed =
            commutation_residual(CommutingOperator::monomial(op.m, op.a, 1.1 * op.b), disp, data[j.datum], t).value;
        return row;
    });
    res.min_perturbed = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < degrees.size(); ++a)
        for (std::size_t b = 0; b < data.size(); ++b) {
            double pa = 0.0, pb = 0.0;
            for (const auto& r : res.rows)
                if (r.degree == degrees[a] && r.datum == b) {
                    pa = std::max(pa, r.residual_a_perturbed);
                    pb = std::max(pb, r.residual_b_perturbed);
                }
            res.min_perturbed = std::min({res.min_perturbed, pa, pb});
        }
    for (const auto& r : res.rows) res.max_residual = std::max(res.max_residual, r.residual);
    if (res.rows.empty()) res.min_perturbed = 0.0;
    return res;
}

std::vector<ConservationRow> check_transport_conservation(const TransportSolution& sol, const std::vector<double>& times,
                                                          double q_spacing, double p_spacing) {
    if (times.empty()) return {};
    double t_far = 0.0;
    for (double t : times) t_far = std::abs(t) > std::abs(t_far) ? t : t_far;
    // one grid for all times: cover the q-region swept between -|t_far| and |t_far|
    const PhaseGrid far = default_phase_grid(sol, std::abs(t_far), q_spacing, p_spacing);
    const PhaseGrid back = default_phase_grid(sol, -std::abs(t_far), q_spacing, p_spacing);
    PhaseGrid grid = far;
    {
        const Box a = far.q.box(), b = back.q.box();
        const int d = sol.d();
        auto line = [&](int axis) {
            const double lo = std::min(a[axis].lo, b[axis].lo), hi = std::max(a[axis].hi, b[axis].hi);
            return Interval{lo, hi};
        };
        auto n_for = [&](Interval iv) { return static_cast<std::size_t>(std::ceil(iv.length() / q_spacing)); };
        if (d == 1) {
            const Interval x = line(0);
            grid.q = GridSpec::line(x.lo, x.hi, n_for(x));
        } else {
            const Interval x = line(0), y = line(1);
            grid.q = GridSpec::plane(x, n_for(x), y, n_for(y));
        }
    }
    struct Named {
        const char* name;
        PhaseFunctional f;
    };
    const std::vector<Named> functionals = {
        {"mass", [](std::span<const double>, double v) { return v; }},
        {"l2", [](std::span<const double>, double v) { return v * v; }},
        {"kinetic", [](std::span<const double> p, double v) {
             double s = 0.0;
             for (double x : p) s += x * x;
             return s * v;
         }},
    };
    std::vector<double> all_times = times;
    auto values = parallel_map(functionals.size() * all_times.size(), [&](std::size_t i) {
        return conserved_functional(sol, functionals[i / all_times.size()].f, all_times[i % all_times.size()], grid);
    });
    const double ref_time = 0.0;
    std::vector<ConservationRow> rows;
    for (std::size_t f = 0; f < functionals.size(); ++f) {
        const double base = conserved_functional(sol, functionals[f].f, ref_time, grid);
        for (std::size_t j = 0; j < all_times.size(); ++j) {
            const double v = values[f * all_times.size() + j];
            rows.push_back({functionals[f].name, all_times[j], v, base != 0.0 ? std::abs(v - base) / std::abs(base) : std::abs(v)});
        }
    }
    return rows;
}

}  // namespace decaylab
