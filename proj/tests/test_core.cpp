#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "decaylab/analytic.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/fft.hpp"
#include "decaylab/fit.hpp"
#include "decaylab/grid.hpp"
#include "decaylab/parallel.hpp"

using namespace decaylab;
using std::numbers::pi;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

SeriesSample point(double t, double v) { return {t, v, false, {}}; }

// Centered differences of the value oracle, compared with the gradient oracle.
double worst_gradient_error(const AnalyticField& f, const std::vector<std::vector<double>>& probes, double step) {
    double worst = 0.0;
    for (auto x : probes) {
        const auto g = f.gradient(x);
        double gnorm = 0.0;
        for (auto gi : g) gnorm = std::max(gnorm, std::abs(gi));
        for (int a = 0; a < f.dim(); ++a) {
            auto xp = x, xm = x;
            xp[a] += step;
            xm[a] -= step;
            const cplx fd = (f.value(xp) - f.value(xm)) / (2.0 * step);
            worst = std::max(worst, std::abs(fd - g[a]) / std::max(gnorm, 1e-300));
        }
    }
    return worst;
}

std::vector<std::vector<double>> random_probes(int dim, double radius, int count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-radius, radius);
    std::vector<std::vector<double>> out(count, std::vector<double>(dim));
    for (auto& p : out)
        for (auto& c : p) c = u(rng);
    return out;
}

}  // namespace

TEST_SUITE("grid") {
    TEST_CASE("spacing and point-count invariants") {
        const auto g = GridSpec::line(-20.0, 20.0, 256);
        CHECK(g.spacing(0) == doctest::Approx(40.0 / 256));
        CHECK(g.size() == 256);
        CHECK(g.coord(0, 0) == -20.0);
        CHECK_THROWS(GridSpec::line(0.0, 1.0, 7));
        CHECK_THROWS(GridSpec::line(1.0, 1.0, 16));
        const auto p = GridSpec::centered(2, 2.0, 128);
        CHECK(p.size() == 128u * 128u);
        CHECK(p.cell_volume() == doctest::Approx(std::pow(4.0 / 128, 2)));
    }

    TEST_CASE("sampled field shape and reality") {
        const auto g = GridSpec::line(0.0, 1.0, 16);
        CHECK_THROWS(SampledField(g, std::vector<cplx>(15)));
        CHECK_THROWS(SampledField(g, std::vector<cplx>(16, cplx(0.0, 1.0)), FieldKind::Real));
        std::vector<cplx> v(16, cplx(1.0, 1e-14));
        const auto r = SampledField::real_part_of(SampledField(g, v), 1e-10);
        CHECK(r.kind() == FieldKind::Real);
        CHECK(r[3].imag() == 0.0);
        std::vector<cplx> w(16, cplx(1.0, 0.5));
        CHECK_THROWS(SampledField::real_part_of(SampledField(g, w), 1e-10));
    }
}

TEST_SUITE("sample") {
    TEST_CASE("gaussian nodes equal exp(-x^2/2)") {
        const auto g = GridSpec::line(-20.0, 20.0, 256);
        const auto f = sample(AnalyticField::gaussian({0.0}, 1.0), g);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.coord(0, i);
            worst = std::max(worst, std::abs(f[i] - std::exp(-x * x / 2)));
        }
        CHECK(worst == 0.0);
    }

    TEST_CASE("cube outside the grid is a support overflow") {
        const auto g = GridSpec::line(2.0, 10.0, 64);
        CHECK_THROWS_AS(sample(AnalyticField::cube({0.0}, 1.0), g), SupportOverflowError);
        CHECK_NOTHROW(sample(AnalyticField::cube({0.0}, 1.0), g, true));
    }

    TEST_CASE("bump of scale 4 peaks at 4 on the plateau") {
        const auto g = GridSpec::centered(2, 2.0, 128);
        const auto f = sample(AnalyticField::bump(4.0), g);
        CHECK(max_abs(f) == 4.0);
        const double origin[2] = {0.0, 0.0};
        CHECK(AnalyticField::bump(4.0).value(origin) == cplx(4.0));
    }

    TEST_CASE("bump scale below one is rejected") { CHECK_THROWS(AnalyticField::bump(0.5)); }
}

TEST_SUITE("integrate") {
    TEST_CASE("zero, constant and gaussian integrals") {
        const auto g = GridSpec::line(-20.0, 20.0, 1024);
        CHECK(integrate(SampledField::zeros(g)) == cplx(0.0));

        std::vector<double> ones(g.size(), 1.0);
        CHECK(integrate(SampledField::from_real(g, ones)).real() == doctest::Approx(40.0).epsilon(1e-15));

        const auto f = sample(AnalyticField::gaussian({0.0}, 1.0), g);
        CHECK(std::abs(integrate(f).real() - std::sqrt(2 * pi)) <= 1e-10);
    }

    TEST_CASE("sample then integrate reproduces the moment oracles") {
        const auto g = GridSpec::line(-30.0, 30.0, 2048);
        for (auto datum : {AnalyticField::gaussian({1.5}, 0.7), AnalyticField::gaussian({-2.0}, 2.0, {0.8})}) {
            const auto f = sample(datum, g);
            CHECK(rel_err(std::abs(integrate(f)), std::abs(*datum.integral())) <= 1e-9);
            CHECK(rel_err(l2_norm(f) * l2_norm(f), *datum.l2_norm_sq()) <= 1e-9);
        }
        const auto g2 = GridSpec::centered(2, 12.0, 256);
        const auto datum = AnalyticField::gaussian({0.5, -1.0}, 1.1);
        CHECK(rel_err(integrate(sample(datum, g2)).real(), datum.integral()->real()) <= 1e-9);
    }
}

TEST_SUITE("analytic oracles") {
    TEST_CASE("gradient agrees with centered differences") {
        const double w = 0.8;
        const auto gauss = AnalyticField::gaussian({0.3}, w, {1.7});
        CHECK(worst_gradient_error(gauss, random_probes(1, 2.0, 40, 1), 1e-5 * w) <= 1e-6);

        const auto gauss2 = AnalyticField::gaussian({0.3, -0.2}, w);
        CHECK(worst_gradient_error(gauss2, random_probes(2, 2.0, 40, 2), 1e-5 * w) <= 1e-6);

        const auto phase = AnalyticField::product_gaussian_phase(2, 1.0, 0.6);
        CHECK(worst_gradient_error(phase, random_probes(4, 1.5, 40, 3), 1e-5 * 0.6) <= 1e-6);

        // probes in the transition annulus 1/lambda < r < 2/lambda, where the gradient lives
        const double lambda = 4.0;
        const auto bump = AnalyticField::bump(lambda);
        std::vector<std::vector<double>> ring;
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> r(1.1 / lambda, 1.9 / lambda), th(0.0, 2 * pi);
        for (int i = 0; i < 40; ++i) {
            const double rr = r(rng), tt = th(rng);
            ring.push_back({rr * std::cos(tt), rr * std::sin(tt)});
        }
        CHECK(worst_gradient_error(bump, ring, 1e-5 / lambda) <= 1e-6);
        CHECK_FALSE(AnalyticField::cube({0.0}, 1.0).has_derivatives());
    }

    TEST_CASE("bump profile is one inside the unit disc and zero past radius two") {
        CHECK(bump_profile(0.0) == 1.0);
        CHECK(bump_profile(1.0) == 1.0);
        CHECK(bump_profile(2.0) == 0.0);
        CHECK(bump_profile(3.0) == 0.0);
        CHECK(bump_profile(1.5) > 0.0);
        CHECK(bump_profile(1.5) < 1.0);
    }

    TEST_CASE("closed-form moments of the unit gaussian") {
        const auto g = AnalyticField::gaussian({0.0}, 1.0);
        CHECK(*g.l2_norm_sq() == doctest::Approx(std::sqrt(pi)));
        CHECK(*g.l1_norm() == doctest::Approx(std::sqrt(2 * pi)));
        // int x^2 exp(-x^2) dx = sqrt(pi) / 2
        CHECK(*g.weighted_l2_sq(0) == doctest::Approx(std::sqrt(pi) / 2));
        CHECK(*AnalyticField::cube({3.0}, 1.0).l1_norm() == doctest::Approx(1.0));
    }

    TEST_CASE("translation shifts the argument") {
        const auto f = AnalyticField::cube({3.0}, 1.0);
        const double shift[1] = {3.0};
        const auto moved = f.translated(shift);
        const double at0[1] = {0.0};
        const double at3[1] = {-3.0};
        CHECK(moved.value(at0) == cplx(1.0));
        CHECK(moved.value(at3) == cplx(0.0));
    }
}

TEST_SUITE("spectral derivative") {
    TEST_CASE("plane wave eigenfunction") {
        const auto g = GridSpec::line(0.0, 2 * pi, 64);
        const double k0 = 5.0;
        std::vector<cplx> v(g.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(cplx(0.0, k0 * g.coord(0, i)));
        const SampledField f(g, v);
        const auto df = spectral_derivative(f, 1);
        double worst = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(df[i] - cplx(0.0, k0) * v[i]));
        CHECK(worst <= 1e-12 * k0);
    }

    TEST_CASE("order zero is the identity") {
        const auto g = GridSpec::line(-10.0, 10.0, 128);
        const auto f = sample(AnalyticField::gaussian({0.0}, 1.0), g);
        const auto same = spectral_derivative(f, 0);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(same[i] - f[i]) <= 1e-15);
    }

    TEST_CASE("second derivative of the gaussian") {
        const auto g = GridSpec::line(-10.0, 10.0, 512);
        const auto f = sample(AnalyticField::gaussian({0.0}, 1.0), g);
        const auto d2 = spectral_derivative(f, 2);
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double x = g.coord(0, i);
            const double exact = (x * x - 1.0) * std::exp(-x * x / 2);
            worst = std::max(worst, std::abs(d2[i] - exact));
            scale = std::max(scale, std::abs(exact));
        }
        CHECK(worst / scale <= 1e-8);
    }

    TEST_CASE("derivative of a derivative is the second derivative on band-limited data") {
        const auto g = GridSpec::line(0.0, 2 * pi, 64);
        std::vector<cplx> v(g.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = g.coord(0, i);
            v[i] = std::cos(3 * x) + cplx(0.0, 0.5) * std::sin(7 * x) + 0.25 * std::cos(20 * x);
        }
        const SampledField f(g, v);
        const auto twice = spectral_derivative(spectral_derivative(f, 1), 1);
        const auto direct = spectral_derivative(f, 2);
        CHECK(l2_norm(twice - direct) <= 1e-12 * l2_norm(direct));
    }

    TEST_CASE("orders above six are rejected") {
        const auto g = GridSpec::line(0.0, 1.0, 16);
        CHECK_THROWS(spectral_derivative(SampledField::zeros(g), 7));
    }

    TEST_CASE("Parseval on random fields") {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> n;
        for (auto g : {GridSpec::line(-3.0, 5.0, 96), GridSpec::centered(2, 4.0, 32)}) {
            std::vector<cplx> v(g.size());
            for (auto& c : v) c = cplx(n(rng), n(rng));
            const SampledField f(g, v);
            CHECK(rel_err(l2_norm_spectral(f), l2_norm(f)) <= 1e-12);
        }
    }
}

TEST_SUITE("fit_decay") {
    TEST_CASE("exact power laws are recovered") {
        for (double a : {1.0 / 3.0, 0.5, 1.0, 2.0}) {
            std::vector<SeriesSample> s;
            for (double t : geometric_times(1.0, 100.0, std::sqrt(2.0))) s.push_back(point(t, 3.0 * std::pow(t, -a)));
            const auto fit = fit_decay(s);
            CHECK(std::abs(fit.slope + a) <= 1e-12);
            CHECK(fit.max_abs_residual <= 1e-12);
        }
    }

    TEST_CASE("window and exclusions") {
        std::vector<SeriesSample> s;
        for (double t : geometric_times(1.0, 1000.0, 2.0)) s.push_back(point(t, 1.0 / t));
        s[2].excluded = true;
        s[2].reason = "wrap-around";
        s[2].value = 1e9;
        const auto fit = fit_decay(s, {3.0, 600.0});
        CHECK(std::abs(fit.slope + 1.0) <= 1e-12);
        CHECK(fit.used == 7);
        REQUIRE(fit.excluded_samples.size() == 1);
        CHECK(fit.excluded_samples[0].reason == "wrap-around");
    }

    TEST_CASE("errors") {
        std::vector<SeriesSample> s;
        for (double t : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) s.push_back(point(t, 1.0));
        s[3].value = 0.0;
        CHECK_THROWS_AS(fit_decay(s), NonPositiveValueError);
        s[3].value = 1.0;
        CHECK_THROWS_AS(fit_decay(s, {1.0, 4.0}), InsufficientWindowError);
        s[4].t = 3.5;
        CHECK_THROWS_AS(fit_decay(s), std::invalid_argument);
    }

    TEST_CASE("geometric times") {
        const auto ts = geometric_times(1.0, 1024.0, 2.0);
        CHECK(ts.size() == 11);
        CHECK(ts.back() == doctest::Approx(1024.0).epsilon(1e-12));
        const auto ts2 = geometric_times(10.0, 10000.0, std::sqrt(2.0));
        CHECK(ts2.front() == 10.0);
        CHECK(ts2.size() == 20);
        CHECK(ts2.back() <= 10000.0);
    }
}

TEST_SUITE("parallel_map") {
    TEST_CASE("results land in index order at any thread count") {
        std::vector<double> ref;
        for (int threads : {1, 2, 4}) {
            set_thread_count(threads);
            auto out = parallel_map(100, [](std::size_t i) { return std::sqrt(static_cast<double>(i)); });
            if (ref.empty()) ref = out;
            CHECK(out == ref);
        }
        set_thread_count(1);
    }

    TEST_CASE("lowest failing index wins") {
        set_thread_count(4);
        try {
            parallel_map(50, [](std::size_t i) -> int {
                if (i == 7 || i == 31) throw std::runtime_error("fail " + std::to_string(i));
                return 0;
            });
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "fail 7");
        }
        set_thread_count(1);
    }
}
