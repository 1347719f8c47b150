#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dunkl/error.hpp"
#include "dunkl/measure.hpp"

using namespace dunkl;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int n : {1, 2, 5, 16, 33}) {
        const auto& g = gauss_legendre(n);
        for (int k = 0; k < 2 * n; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
            double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
            CHECK(std::abs(s - exact) < 1e-14);
        }
    }
}

TEST_CASE("adaptive integration") {
    auto e = integrate_adaptive([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
    CHECK(e.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    auto k = integrate_adaptive([](double x) { return std::sqrt(std::abs(x)); }, -1.0, 1.0, {0.0});
    CHECK(k.value == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / x; }, -1.0, 1.0, {}, {}), EvaluationError);
    try {
        integrate_adaptive([](double x) { return x > 0.3 ? NAN : 1.0; }, 0.0, 1.0);
    } catch (const EvaluationError& err) {
        CHECK(err.node().at(0) > 0.3);
    }
}

TEST_CASE("refinement never increases the error estimate on the smoke integrand") {
    WeightedDensity W(parse_preset("z2^2:kappa=1/2,1"));
    QuadratureGrid g;
    g.options.rel_tol = 1e-6;
    g.options.abs_tol = 1e-8;
    Vec lo{-1.0, -0.5}, hi{1.5, 2.0};
    FnD f = [](std::span<const double> x) { return std::cos(x[0] + 2 * x[1]); };
    double prev = INFINITY;
    for (int k = 0; k < 4; ++k) {
        auto e = integrate_box(f, lo, hi, W, g);
        CHECK(e.error <= prev);
        prev = e.error;
        g = g.refined(0.1);
    }
}

TEST_CASE("integrate examples") {
    QuadratureGrid g;
    WeightedDensity W0(parse_preset("trivial:d=2"));
    Vec c0{0.0, 0.0};
    CHECK(integrate_ball(nullptr, c0, 1.0, W0, g).value == doctest::Approx(std::numbers::pi).epsilon(1e-8));
    FnD one = [](std::span<const double>) { return 1.0; };
    CHECK(integrate_ball(&one, c0, 1.0, W0, g).value == doctest::Approx(std::numbers::pi).epsilon(1e-8));

    for (double kappa : {0.0, 0.5, 1.0, 2.5}) {
        WeightedDensity W(parse_preset("z2^1", std::to_string(kappa)));
        Vec c{0.0};
        for (double r : {0.3, 1.0, 4.0}) {
            double exact = std::pow(2.0, kappa + 1) * std::pow(r, 2 * kappa + 1) / (2 * kappa + 1);
            CHECK(integrate_ball(nullptr, c, r, W, g).value == doctest::Approx(exact).epsilon(1e-12));
            CHECK(integrate_ball(&one, c, r, W, g).value == doctest::Approx(exact).epsilon(1e-10));
        }
    }

    WeightedDensity W1(parse_preset("trivial:d=1"));
    Vec c1{0.0};
    auto gauss = integrate_gaussian([](std::span<const double> x) { return std::exp(-x[0] * x[0]); }, c1, std::sqrt(0.5), W1, g);
    CHECK(gauss.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));

    WeightedDensity Wk(parse_preset("z2^1:kappa=1"));
    auto far = ball_volume(Vec{100.0}, 1.0, Wk, g);
    CHECK(far.value == doctest::Approx(2.0 / 3.0 * (101.0 * 101.0 * 101.0 - 99.0 * 99.0 * 99.0)).epsilon(1e-12));
}

TEST_CASE("closed-form inner integral matches generic nested quadrature in 2-D and 3-D") {
    QuadratureGrid g;
    FnD one = [](std::span<const double>) { return 1.0; };
    for (const char* s : {"z2^2:kappa=1/2,1", "z2^3:kappa=1,1/2,0"}) {
        WeightedDensity W(parse_preset(s));
        Vec c(static_cast<std::size_t>(W.dim()), 0.3);
        c[0] = -0.7;
        auto a = integrate_ball(nullptr, c, 1.1, W, g);
        auto b = integrate_ball(&one, c, 1.1, W, g);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
    }
}

TEST_CASE("Monte Carlo fallback brackets the tensor result") {
    WeightedDensity W(parse_preset("z2^2:kappa=1"));
    QuadratureGrid mc;
    mc.scheme = Scheme::monte_carlo;
    mc.mc_samples = 200000;
    Vec c{0.2, -0.4};
    auto a = integrate_ball(nullptr, c, 1.0, W, {});
    auto b = integrate_ball(nullptr, c, 1.0, W, mc);
    CHECK(std::abs(a.value - b.value) <= b.error);
}

TEST_CASE("mu_kappa is G-invariant") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (const char* s : {"z2^2:kappa=1/2,3/2", "b:2:kappa=1/2,1", "a:2:kappa=1/2"}) {
        DunklSystem S(parse_preset(s));
        QuadratureGrid g;
        g.options.rel_tol = 1e-9;
        for (int k = 0; k < 2; ++k) {
            Vec x(static_cast<std::size_t>(S.dim()));
            for (auto& v : x) v = u(rng);
            double r = 0.3 + std::abs(u(rng));
            auto base = ball_volume(x, r, S.density, g);
            for (std::size_t e = 1; e < S.group.order(); e += 2) {
                auto img = ball_volume(S.group.apply(e, x), r, S.density, g);
                CHECK(std::abs(img.value - base.value) <= 2.0 * (img.error + base.error));
            }
        }
    }
}

TEST_CASE("doubling probe examples") {
    WeightedDensity W0(parse_preset("trivial:d=2"));
    Vec c{0.3, 0.1};
    auto p0 = doubling_probe(c, 0.5, 2.0, W0);
    CHECK(p0.ratio == doctest::Approx(16.0).epsilon(1e-8));
    CHECK(p0.secant_slope == doctest::Approx(2.0).epsilon(1e-8));

    WeightedDensity W1(parse_preset("z2^1:kappa=1"));
    auto p1 = doubling_probe(Vec{0.0}, 0.25, 4.0, W1);
    CHECK(p1.ratio == doctest::Approx(std::pow(16.0, 3.0)).epsilon(1e-12));
    CHECK(p1.local_slope == doctest::Approx(3.0).epsilon(1e-6));
    auto p2 = doubling_probe(Vec{100.0}, 0.1, 1.0, W1);
    CHECK(p2.ratio == doctest::Approx(10.0).epsilon(1e-3));
    // local slope (x^2 + r^2) / (x^2 + r^2/3) for the Z2, kappa=1 weight
    auto p3 = doubling_probe(Vec{2.0}, 0.5, 1.0, W1);
    CHECK(p3.local_slope == doctest::Approx(5.0 / (4.0 + 1.0 / 3.0)).epsilon(1e-6));
}

TEST_CASE("integration by parts") {
    SmoothFunction u{[](std::span<const double> x) { return x[0] * std::exp(-x[0] * x[0]); },
                     [](std::span<const double> x) { return Vec{(1 - 2 * x[0] * x[0]) * std::exp(-x[0] * x[0])}; }};
    SmoothFunction v{[](std::span<const double> x) {
                         double s = 1 - x[0] * x[0];
                         return std::abs(x[0]) < 1 ? s * s * s : 0.0;
                     },
                     [](std::span<const double> x) {
                         double s = 1 - x[0] * x[0];
                         return Vec{std::abs(x[0]) < 1 ? -6 * x[0] * s * s : 0.0};
                     }};
    Vec xi{1.0}, lo{-1.0}, hi{1.0};
    auto r = integration_by_parts_residual(u, v, xi, WeightedDensity(parse_preset("z2^1:kappa=0.7")), lo, hi);
    CHECK(r.residual < 1e-6 * r.scale);
    CHECK(std::abs(r.lhs) > 0.1);
    auto r0 = integration_by_parts_residual(u, v, xi, WeightedDensity(parse_preset("trivial:d=1")), lo, hi);
    CHECK(r0.residual < 1e-10);
    // v supported away from the box
    Vec lo2{2.0}, hi2{3.0};
    auto rz = integration_by_parts_residual(u, v, xi, WeightedDensity(parse_preset("z2^1:kappa=0.7")), lo2, hi2);
    CHECK(rz.lhs == 0.0);
    CHECK(rz.rhs == 0.0);
}

TEST_CASE("integration by parts in two dimensions") {
    auto gauss = [](std::span<const double> x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); };
    SmoothFunction u{[=](std::span<const double> x) { return (x[0] + x[0] * x[1] + 1.0) * gauss(x); },
                     [=](std::span<const double> x) {
                         double p = x[0] + x[0] * x[1] + 1.0;
                         return Vec{((1 + x[1]) - 2 * x[0] * p) * gauss(x), (x[0] - 2 * x[1] * p) * gauss(x)};
                     }};
    auto bump = [](double s) { return s < 1 ? (1 - s) * (1 - s) * (1 - s) : 0.0; };
    SmoothFunction v{[=](std::span<const double> x) { return bump(x[0] * x[0] + (x[1] - 0.2) * (x[1] - 0.2)); },
                     [=](std::span<const double> x) {
                         double s = x[0] * x[0] + (x[1] - 0.2) * (x[1] - 0.2);
                         double d = s < 1 ? -3 * (1 - s) * (1 - s) : 0.0;
                         return Vec{2 * x[0] * d, 2 * (x[1] - 0.2) * d};
                     }};
    // the box must hold the G-orbit of supp v, since D v reaches v o r_a
    Vec xi{0.6, 0.8}, lo{-1.0, -1.2}, hi{1.0, 1.2};
    QuadratureGrid g;
    g.options.rel_tol = 1e-9;
    auto r = integration_by_parts_residual(u, v, xi, WeightedDensity(parse_preset("z2^2:kappa=1/2,1")), lo, hi, g);
    CHECK(r.residual < 1e-6 * r.scale);
}
