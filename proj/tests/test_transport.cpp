#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "decaylab/errors.hpp"
#include "decaylab/transport.hpp"

using namespace decaylab;
using std::numbers::pi;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// exp(-q^2 - p^2) on the (q, p) plane
AnalyticField unit_phase_gaussian() { return AnalyticField::gaussian({0.0, 0.0}, 1.0 / std::sqrt(2.0)); }

AnalyticField zero_phase_datum(int d) {
    return AnalyticField(Gaussian{std::vector<double>(2 * d, 0.0), std::vector<double>(2 * d, 1.0), {}, 0.0});
}

// Closed form of the velocity average of exp(-q^2 - p^2) under free streaming.
double free_gaussian_average(double t, double q) { return std::sqrt(pi / (1 + t * t)) * std::exp(-q * q / (1 + t * t)); }

// Composite Simpson rule, independent of the library's quadrature.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_SUITE("dispersion map") {
    TEST_CASE("identity and square maps") {
        const auto id = DispersionMap::identity(2);
        const double p[2] = {0.3, -1.2};
        CHECK(id(p) == std::vector<double>{0.3, -1.2});
        CHECK(id.jacobian(p) == std::vector<double>{1.0, 0.0, 0.0, 1.0});

        const double p1[1] = {1.5};
        CHECK(DispersionMap::square_d1()(p1)[0] == 2.25);
        const auto mixed = DispersionMap::mixed_d2()(p);
        CHECK(mixed[0] == 0.3);
        CHECK(mixed[1] == doctest::Approx(1.44));
    }

    TEST_CASE("jacobians agree with finite differences") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (const auto& map : {DispersionMap::relativistic(1), DispersionMap::relativistic(2), DispersionMap::mixed_d2(),
                                DispersionMap::square_d1()}) {
            const int d = map.d();
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> p(d);
                for (auto& c : p) c = u(rng);
                const auto J = map.jacobian(p);
                for (int i = 0; i < d; ++i) {
                    const double h = 1e-6;
                    auto pp = p, pm = p;
                    pp[i] += h;
                    pm[i] -= h;
                    const auto wp = map(pp), wm = map(pm);
                    for (int j = 0; j < d; ++j) CHECK(std::abs((wp[j] - wm[j]) / (2 * h) - J[j * d + i]) <= 1e-6);
                }
            }
        }
    }

    TEST_CASE("relativistic speed stays below one") {
        const double p[1] = {1e6};
        const double w = DispersionMap::relativistic(1)(p)[0];
        CHECK(w < 1.0);
        CHECK(w > 0.999999);
    }
}

TEST_SUITE("evaluate_density") {
    TEST_CASE("time zero reproduces the datum") {
        const TransportSolution sol(AnalyticField::product_gaussian_phase(2, 0.7, 1.3), DispersionMap::relativistic(2));
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int i = 0; i < 20; ++i) {
            std::vector<double> x{u(rng), u(rng), u(rng), u(rng)};
            CHECK(evaluate_density(sol, 0.0, std::span(x).first(2), std::span(x).last(2)) == sol.datum().value(x).real());
        }
    }

    TEST_CASE("characteristics formula by direct substitution") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const double q[1] = {0.0}, p[1] = {1.0};
        CHECK(evaluate_density(sol, 1.0, q, p) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

        const TransportSolution mixed(AnalyticField::product_gaussian_phase(2, 1.0, 1.0), DispersionMap::mixed_d2());
        const double q2[2] = {0.4, -0.1}, p2[2] = {0.7, 0.6};
        const double t = 1.7;
        const double x[4] = {0.4 - t * 0.7, -0.1 - t * 0.36, 0.7, 0.6};
        CHECK(evaluate_density(mixed, t, q2, p2) == mixed.datum().value(x).real());
    }

    TEST_CASE("square map carries the bump plateau") {
        const double lambda = 4.0, t = 2.0, pv = 0.1;
        const TransportSolution sol(AnalyticField::bump(lambda), DispersionMap::square_d1());
        const double q[1] = {t * pv * pv + 0.05}, p[1] = {pv};
        CHECK(evaluate_density(sol, t, q, p) == lambda);
    }
}

TEST_SUITE("velocity_average") {
    TEST_CASE("zero datum") {
        const TransportSolution sol(zero_phase_datum(1), DispersionMap::identity(1));
        const double q[1] = {0.3};
        CHECK(velocity_average(sol, 2.0, q) == 0.0);
        CHECK(velocity_average(sol, 2.0, q, GridSpec::line(-10.0, 10.0, 64)) == 0.0);
    }

    TEST_CASE("free gaussian closed form") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const auto pgrid = GridSpec::line(-12.0, 12.0, 512);
        for (auto [t, qv] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {3.0, 1.0}, {10.0, -4.0}, {0.5, 2.0}}) {
            const double q[1] = {qv};
            CHECK(rel_err(velocity_average(sol, t, q, pgrid), free_gaussian_average(t, qv)) <= 1e-10);
            CHECK(rel_err(velocity_average(sol, t, q), free_gaussian_average(t, qv)) <= 1e-10);
        }
        const double q0[1] = {0.0};
        CHECK(velocity_average(sol, 0.0, q0) == doctest::Approx(1.7724538509055159).epsilon(1e-10));
        const double q1[1] = {0.0};
        CHECK(velocity_average(sol, 1.0, q1) == doctest::Approx(1.2533141373155003).epsilon(1e-10));
    }

    TEST_CASE("p grid must cover the datum") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const double q[1] = {0.0};
        CHECK_THROWS_AS(velocity_average(sol, 1.0, q, GridSpec::line(-1.0, 1.0, 64)), SupportOverflowError);
    }

    TEST_CASE("two-dimensional product gaussian") {
        // exp(-|q|^2 - |p|^2) factorizes into two one-dimensional averages
        const TransportSolution sol(AnalyticField::product_gaussian_phase(2, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)),
                                    DispersionMap::identity(2));
        const double q[2] = {0.5, -1.0};
        const double t = 2.0;
        const double want = free_gaussian_average(t, 0.5) * free_gaussian_average(t, -1.0);
        CHECK(rel_err(velocity_average(sol, t, q), want) <= 1e-9);
    }
}

TEST_SUITE("sup_velocity_average") {
    TEST_CASE("free gaussian") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        CHECK(rel_err(sup_velocity_average(sol, 3.0).value, std::sqrt(pi / 10)) <= 1e-8);
        CHECK(rel_err(sup_velocity_average(sol, 0.0).value, std::sqrt(pi)) <= 1e-8);
        // the node grid contains q = 0, where the maximum sits
        const auto qgrid = GridSpec::line(-60.0, 60.0, 1200);
        const auto pgrid = GridSpec::line(-12.0, 12.0, 512);
        CHECK(rel_err(sup_velocity_average(sol, 3.0, qgrid, pgrid), std::sqrt(pi / 10)) <= 1e-8);
    }

    TEST_CASE("zero datum") {
        const TransportSolution sol(zero_phase_datum(1), DispersionMap::identity(1));
        CHECK(sup_velocity_average(sol, 5.0).value == 0.0);
    }

    TEST_CASE("the search region grows with t") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const auto r0 = velocity_average_region(sol, 0.0);
        const auto r1 = velocity_average_region(sol, 100.0);
        CHECK(r1[0].length() > 50.0 * r0[0].length());
    }
}

TEST_SUITE("conserved functionals") {
    TEST_CASE("mass, L2 and kinetic energy are constant in time") {
        const std::vector<TransportSolution> sols{
            TransportSolution(unit_phase_gaussian(), DispersionMap::identity(1)),
            TransportSolution(unit_phase_gaussian(), DispersionMap::relativistic(1)),
            TransportSolution(AnalyticField::bump(2.0), DispersionMap::square_d1()),
        };
        const PhaseFunctional mass = [](std::span<const double>, double v) { return v; };
        const PhaseFunctional l2 = [](std::span<const double>, double v) { return v * v; };
        const PhaseFunctional kinetic = [](std::span<const double> p, double v) { return p[0] * p[0] * v; };
        for (const auto& sol : sols) {
            const auto grid = default_phase_grid(sol, 10.0, 0.01, 0.01);
            for (const auto& F : {mass, l2, kinetic}) {
                const double ref = conserved_functional(sol, F, 0.0, grid);
                CHECK(ref > 0.0);
                for (double t : {1.0, 2.0, 5.0, 10.0}) CHECK(rel_err(conserved_functional(sol, F, t, grid), ref) <= 1e-8);
            }
        }
    }

    TEST_CASE("mass of the free gaussian equals pi") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const auto grid = default_phase_grid(sol, 5.0, 0.05, 0.05);
        const PhaseFunctional mass = [](std::span<const double>, double v) { return v; };
        CHECK(rel_err(conserved_functional(sol, mass, 5.0, grid), pi) <= 1e-10);
    }

    TEST_CASE("functionals must vanish on the zero density") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const auto grid = default_phase_grid(sol, 1.0, 0.1, 0.1);
        const PhaseFunctional shifted = [](std::span<const double>, double v) { return v + 1.0; };
        CHECK_THROWS_AS(conserved_functional(sol, shifted, 1.0, grid), std::invalid_argument);
    }
}

TEST_SUITE("transport boost") {
    TEST_CASE("reduces to the p derivative at t = 0") {
        const TransportSolution sol(AnalyticField::gaussian({0.2, -0.4}, 0.9), DispersionMap::relativistic(1));
        const double q[1] = {0.5}, p[1] = {-0.3};
        const double x[2] = {0.5, -0.3};
        CHECK(apply_transport_boost(sol, 0.0, 0, q, p) == doctest::Approx(sol.datum().gradient(x)[1].real()).epsilon(1e-15));
    }

    TEST_CASE("odd symmetry zero") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const double q[1] = {0.0}, p[1] = {0.0};
        CHECK(apply_transport_boost(sol, 2.0, 0, q, p) == 0.0);
    }

    TEST_CASE("identity boost equals the transported p derivative") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const double t = 1.3, qv = 0.4, pv = 0.7;
        const double q[1] = {qv}, p[1] = {pv};
        const double x = qv - t * pv;
        // d_p exp(-x^2 - p^2) at (x, p)
        const double want = -2.0 * pv * std::exp(-x * x - pv * pv);
        CHECK(apply_transport_boost(sol, t, 0, q, p) == doctest::Approx(want).epsilon(1e-14));
    }

    TEST_CASE("finite-difference cross-check on every map") {
        const std::vector<TransportSolution> sols{
            TransportSolution(AnalyticField::gaussian({0.1, 0.2}, 0.8), DispersionMap::identity(1)),
            TransportSolution(AnalyticField::gaussian({0.1, 0.2}, 0.8), DispersionMap::relativistic(1)),
            TransportSolution(AnalyticField::gaussian({0.1, 0.2}, 0.8), DispersionMap::square_d1()),
            TransportSolution(AnalyticField::product_gaussian_phase(2, 1.0, 0.7), DispersionMap::mixed_d2()),
            TransportSolution(AnalyticField::product_gaussian_phase(2, 1.0, 0.7), DispersionMap::relativistic(2)),
        };
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(-0.8, 0.8);
        const double h = 1e-5;
        double worst = 0.0;
        for (const auto& sol : sols) {
            const int d = sol.d();
            for (int trial = 0; trial < 10; ++trial) {
                const double t = 0.5 + std::abs(u(rng));
                std::vector<double> q(d), p(d);
                for (auto& c : q) c = u(rng);
                for (auto& c : p) c = u(rng);
                const auto J = sol.map().jacobian(p);
                for (int i = 0; i < d; ++i) {
                    auto pp = p, pm = p;
                    pp[i] += h;
                    pm[i] -= h;
                    double fd = (evaluate_density(sol, t, q, pp) - evaluate_density(sol, t, q, pm)) / (2 * h);
                    for (int j = 0; j < d; ++j) {
                        auto qp = q, qm = q;
                        qp[j] += h;
                        qm[j] -= h;
                        fd += t * J[j * d + i] *
                              (evaluate_density(sol, t, qp, p) - evaluate_density(sol, t, qm, p)) / (2 * h);
                    }
                    const double exact = apply_transport_boost(sol, t, i, q, p);
                    worst = std::max(worst, std::abs(fd - exact) / std::max(std::abs(exact), 1e-3));
                }
            }
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_SUITE("klainerman-sobolev for transport") {
    TEST_CASE("gaussian datum in one dimension") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        for (double t : {0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) {
            const auto e = ks_vlasov_check(sol, t);
            CHECK(rel_err(e.rhs, 2 * std::sqrt(pi)) <= 1e-5);
            CHECK(e.lhs <= e.rhs);
            CHECK(e.lhs / e.rhs <= 0.5 + 1e-5);
            CHECK(rel_err(e.lhs, t * free_gaussian_average(t, 0.0)) <= 1e-8);
        }
        const auto late = ks_vlasov_check(sol, 1e4);
        CHECK(rel_err(late.lhs, std::sqrt(pi)) <= 1e-6);
    }

    TEST_CASE("t = 0 and the zero datum") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::identity(1));
        const auto e0 = ks_vlasov_check(sol, 0.0);
        CHECK(e0.lhs == 0.0);
        CHECK(e0.rhs > 0.0);
        const auto z = ks_vlasov_check(TransportSolution(zero_phase_datum(1), DispersionMap::identity(1)), 2.0);
        CHECK(z.lhs == 0.0);
        CHECK(z.rhs == 0.0);
    }

    TEST_CASE("product gaussian in two dimensions") {
        const double w = 1.0 / std::sqrt(2.0);
        const TransportSolution sol(AnalyticField::product_gaussian_phase(2, w, w), DispersionMap::identity(2));
        for (double t : {0.5, 10.0}) {
            const auto e = ks_vlasov_check(sol, t);
            // the mixed p-derivative factorizes: (2 sqrt(pi))^2, up to the kink error of the coarse p grid
            CHECK(rel_err(e.rhs, 4 * pi) <= 2e-2);
            CHECK(e.lhs <= e.rhs);
        }
    }

    TEST_CASE("other maps are unsupported") {
        const TransportSolution sol(unit_phase_gaussian(), DispersionMap::relativistic(1));
        CHECK_THROWS_AS(ks_vlasov_check(sol, 1.0), UnsupportedError);
    }
}

TEST_SUITE("counterexample") {
    TEST_CASE("closed-form lower bound") {
        const double golden = std::sqrt((std::sqrt(5.0) - 1.0) / 2.0);
        CHECK(golden == doctest::Approx(0.78615).epsilon(1e-5));
        for (double lambda : {4.0, 16.0, 64.0, 1e3}) CHECK(rel_err(counterexample_lower_bound(lambda, lambda), golden) <= 1e-12);
        CHECK(counterexample_lower_bound(4.0, 4.0) == doctest::Approx(4 * std::sqrt((std::sqrt(5.0) - 1) / 32)));
        const double lambda = 4.0, t = 2.0;
        const double naive = lambda * std::sqrt((std::sqrt(4 * t * t / (lambda * lambda) + 1) - 1) / (2 * t * t));
        CHECK(rel_err(counterexample_lower_bound(lambda, t), naive) <= 1e-12);
    }

    TEST_CASE("velocity average at the origin against direct quadrature of the bump section") {
        // at q = 0 and t = lambda the substitution s = lambda p gives int phi(sqrt(s^4 + s^2)) ds
        const auto section = [](double s) { return bump_profile(std::sqrt(s * s * s * s + s * s)); };
        const double diagonal = simpson(section, -2.0, 2.0, 20000);
        const double at_zero = simpson([](double s) { return bump_profile(std::abs(s)); }, -2.0, 2.0, 20000);
        CHECK(at_zero >= 2.0);
        for (double lambda : {4.0, 16.0}) {
            const auto row0 = counterexample_profile(lambda, 0.0);
            CHECK(rel_err(row0.nu_bar_at_origin, at_zero) <= 1e-6);
            const auto row = counterexample_profile(lambda, lambda);
            CHECK(rel_err(row.nu_bar_at_origin, diagonal) <= 1e-6);
            CHECK(row.nu_bar_at_origin >= row.lower_bound);
        }
    }

    TEST_CASE("no decay along the diagonal") {
        for (double lambda : {4.0, 16.0, 64.0}) {
            const auto row = counterexample_profile(lambda, lambda);
            CHECK(row.nu_bar_at_origin >= 0.78);
            CHECK(row.w11_norm > 0.0);
        }
    }

    TEST_CASE("W11 norm of the scaled bump splits into mass and gradient parts") {
        // ||phi_lambda||_1 = ||phi||_1 / lambda and ||grad phi_lambda||_1 = ||grad phi||_1
        const double mass = simpson([](double r) { return 2 * pi * r * bump_profile(r); }, 0.0, 2.0, 4000);
        const double grad = simpson([](double r) { return 2 * pi * r * std::abs(bump_profile_derivative(r)); }, 0.0, 2.0, 4000);
        for (double lambda : {1.0, 4.0}) {
            // the norm sums |d_q| and |d_p| separately, which lies between |grad| and sqrt(2) |grad|
            const double w11 = bump_w11_norm(lambda);
            CHECK(w11 >= mass / lambda + grad - 1e-6);
            CHECK(w11 <= mass / lambda + std::sqrt(2.0) * grad + 1e-6);
        }
    }
}

TEST_SUITE("decay experiments") {
    TEST_CASE("free streaming decays like 1/t in one dimension") {
        const auto times = geometric_times(10.0, 1e4, std::sqrt(2.0));
        const auto fit = transport_decay_experiment(DispersionMap::identity(1), unit_phase_gaussian(), times);
        CHECK(std::abs(fit.slope + 1.0) <= 0.02);
        for (const auto& s : fit.samples) CHECK(rel_err(s.value, free_gaussian_average(s.t, 0.0)) <= 1e-8);
    }

    TEST_CASE("relativistic map") {
        const auto times = geometric_times(10.0, 1e3, std::sqrt(2.0));
        const auto fit = transport_decay_experiment(DispersionMap::relativistic(1), unit_phase_gaussian(), times);
        CHECK(std::abs(fit.slope + 1.0) <= 0.05);
    }

    TEST_CASE("times must be positive and increasing") {
        const std::vector<double> bad{1.0, 0.5, 2.0, 3.0, 4.0};
        CHECK_THROWS(transport_decay_experiment(DispersionMap::identity(1), unit_phase_gaussian(), bad));
        const std::vector<double> neg{-1.0, 1.0, 2.0, 3.0, 4.0};
        CHECK_THROWS(transport_decay_experiment(DispersionMap::identity(1), unit_phase_gaussian(), neg));
    }
}
