#include <cmath>
#include <random>

#include "doctest.h"
#include "dunkl/error.hpp"
#include "dunkl/squarefns.hpp"

using namespace dunkl;

namespace {

KernelSpec z2(double kappa) { return KernelSpec(parse_preset("z2", std::to_string(kappa))); }

// Independent heat flow by adaptive quadrature of the kernel.
double flow(const KernelSpec& K, const TestFunction& f, double t, double x) {
    double xs[1] = {x};
    QuadratureGrid g;
    g.options = {1e-15, 1e-12, 4000};
    return semigroup_apply(K, f, t, xs, g, f.breaks()).value;
}

}  // namespace

TEST_CASE("test function atoms") {
    auto K = z2(1.0);
    auto f = parse_test_function("spike(1, 0.25)", K.density());
    Estimate m = integrate_box(f, f.support_lo(), f.support_hi(), K.density(), {}, f.breaks());
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-10));
    auto g = parse_test_function("2*bump(0.5, 0.3) + poly_window(x1^2 - 1, 2)", K.density());
    double y[1] = {0.5};
    CHECK(g(y) == doctest::Approx(2.0 + (0.25 - 1.0) * std::exp(1.0 - 1.0 / (1.0 - 1.0 / 16.0))));
    CHECK(parse_test_function("zero", K.density()).is_zero());
    CHECK_THROWS_AS(parse_test_function("wave(1,2)", K.density()), InvalidArgument);
    CHECK_THROWS_AS(parse_test_function("spike(1)", K.density()), InvalidArgument);
    KernelSpec K2(parse_preset("z2^2", "1"));
    auto s2 = parse_test_function("spike([0.5,-0.5], 0.4)", K2.density());
    CHECK(s2.dim() == 2);
    CHECK(s2.support_lo()[1] == doctest::Approx(-0.9));
}

TEST_CASE("heat flow agrees with adaptive semigroup quadrature") {
    for (double kappa : {0.0, 1.0}) {
        auto K = z2(kappa);
        auto f = parse_test_function("spike(0.8, 0.5) + 0.5*bump(-0.3, 0.4)", K.density());
        for (double t : {1e-3, 0.05, 2.0}) {
            for (double x : {-0.9, 0.35, 1.6}) {
                double xs[1] = {x};
                auto H = heat_flow(f, t, xs, K);
                double ref = flow(K, f, t, x);
                CAPTURE(kappa);
                CAPTURE(t);
                CAPTURE(x);
                CHECK(std::abs(H.value - ref) <= 1e-8 * std::abs(ref) + 1e-13);
                double e = std::min(1e-3, 0.05 * std::sqrt(t));
                double fd = (-flow(K, f, t, x + 2 * e) + 8 * flow(K, f, t, x + e) - 8 * flow(K, f, t, x - e) +
                             flow(K, f, t, x - 2 * e)) /
                            (12 * e);
                CHECK(std::abs(H.grad[0] - fd) <= 1e-6 * std::abs(fd) + 1e-9);
                if (kappa > 0.0) {
                    double q = (ref - flow(K, f, t, -x)) / x;
                    CHECK(std::abs(H.quot[0] - q) <= 1e-8 * std::abs(q) + 1e-12);
                }
                double et = 1e-3 * t;
                double ft = (flow(K, f, t + et, x) - flow(K, f, t - et, x)) / (2 * et);
                CHECK(std::abs(H.dt - ft) <= 1e-5 * std::abs(ft) + 1e-8);
            }
        }
    }
}

TEST_CASE("zero data gives zero square functions") {
    auto K = z2(1.0);
    double x[1] = {0.4};
    auto v = square_functions(TestFunction::zero(1), x, K);
    for (int m = 0; m < 4; ++m) CHECK(v.value[m] == 0.0);
}

TEST_CASE("gamma square function against a dense-grid brute force") {
    auto K = z2(1.0);
    auto f = parse_test_function("poly_window(x1^2 - x1 + 1/2, 1.5)", K.density());
    double x = 0.5;
    // Gamma(H_t f)(x) from adaptive flows and finite differences, trapezoid in log t
    auto integrand = [&](double t) {
        double e = std::min(1e-3, 0.05 * std::sqrt(t));
        double g = (-flow(K, f, t, x + 2 * e) + 8 * flow(K, f, t, x + e) - 8 * flow(K, f, t, x - e) +
                    flow(K, f, t, x - 2 * e)) /
                   (12 * e);
        double q = (flow(K, f, t, x) - flow(K, f, t, -x)) / x;
        return g * g + 0.5 * q * q;
    };
    double a = std::log(1e-7), b = std::log(1e6);
    int n = 1300;
    double h = (b - a) / n, s = 0.0;
    for (int i = 0; i <= n; ++i) {
        double t = std::exp(a + i * h);
        s += (i == 0 || i == n ? 0.5 : 1.0) * integrand(t) * t;
    }
    double ref = std::sqrt(s * h);
    double xs[1] = {x};
    auto v = vertical_square_function(f, xs, SquareMode::gamma, K);
    CHECK(v.value == doctest::Approx(ref).epsilon(1e-3));
    CHECK(v.error < 1e-3 * v.value);
}

TEST_CASE("pointwise domination and positivity") {
    KernelSpec K(parse_preset("z2", "3/2"));
    double chi = K.chi();
    auto f = parse_test_function("spike(0.6, 0.3) + -0.7*bump(-0.4, 0.2)", K.density());
    for (double x : {-1.5, -0.2, 0.3, 0.61, 2.4}) {
        double xs[1] = {x};
        auto v = square_functions(f, xs, K);
        for (int m = 0; m < 4; ++m) CHECK(v.value[m] >= 0.0);
        double g = v.value[0], eg = v.error[0];
        CHECK(v.value[1] * v.value[1] <= (1 + 2 * chi) * (g + 2 * eg) * (g + 2 * eg));
        CHECK(v.value[2] <= g + 2 * eg);
    }
}

TEST_CASE("sublinearity on random pairs") {
    auto K = z2(0.5);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> c(-1.5, 1.5), w(0.1, 0.8);
    for (int trial = 0; trial < 4; ++trial) {
        double c1 = c(rng), c2 = c(rng);
        TestFunction f = TestFunction::spike(std::vector<double>{c1}, w(rng), K.density());
        TestFunction g = -1.0 * TestFunction::bump(std::vector<double>{c2}, w(rng));
        TestFunction fg = f + g;
        double xs[1] = {c(rng)};
        auto a = square_functions(f, xs, K), b = square_functions(g, xs, K), s = square_functions(fg, xs, K);
        for (int m = 0; m < 4; ++m)
            CHECK(s.value[m] <= a.value[m] + b.value[m] + 3 * (a.error[m] + b.error[m] + s.error[m]));
    }
}

TEST_CASE("time window monotonicity and node doubling") {
    auto K = z2(0.5);
    auto f = parse_test_function("bump(0.4, 0.5)", K.density());
    double xs[1] = {0.9};
    TimeQuadrature narrow;
    narrow.extend_tail = false;
    narrow.t_min = 1e-3;
    narrow.t_max = 1e1;
    TimeQuadrature wide = narrow;
    wide.t_min = 1e-5;
    wide.t_max = 1e3;
    auto a = square_functions(f, xs, K, narrow), b = square_functions(f, xs, K, wide);
    for (int m = 0; m < 4; ++m) CHECK(b.value[m] >= a.value[m]);
    TimeQuadrature base, dbl;
    dbl.nodes_per_decade = 32;
    auto h1 = horizontal_square_function(f, xs, K, base);
    auto h2 = horizontal_square_function(f, xs, K, dbl);
    CHECK(h1.value > 0.0);
    CHECK(std::isfinite(h1.error));
    CHECK(h1.value == doctest::Approx(h2.value).epsilon(1e-2));
}

TEST_CASE("hyperplane handling") {
    auto K = z2(1.0);
    auto f = parse_test_function("bump(0.4, 0.5)", K.density());
    double x0[1] = {0.0};
    CHECK_THROWS_AS(vertical_square_function(f, x0, SquareMode::gamma, K), DomainError);
    CHECK_NOTHROW(vertical_square_function(f, x0, SquareMode::grad, K));
    SpatialOptions lim;
    lim.limit_mode = true;
    auto v = vertical_square_function(f, x0, SquareMode::gamma, K, {}, lim);
    double xn[1] = {1e-5};
    CHECK(v.value == doctest::Approx(vertical_square_function(f, xn, SquareMode::gamma, K).value).epsilon(1e-4));
}

TEST_CASE("superlevel measure") {
    KernelSpec K0(parse_preset("z2", "0"));
    SampledField c;
    c.axes = {{-1.0, 0.0, 1.0}};
    c.values = {2.0, 2.0, 2.0};
    CHECK(superlevel_measure(c, 3.0, K0.density()).value == 0.0);

    SampledField ind;
    std::vector<double> xs;
    for (int i = 0; i <= 400; ++i) xs.push_back(-1.0 + 3.0 * i / 400.0);
    ind.axes = {xs};
    for (double x : xs) ind.values.push_back(x >= 0.0 && x <= 1.0 ? 1.0 : 0.0);
    auto m = superlevel_measure(ind, 0.5, K0.density());
    CHECK(m.inner <= 1.0 + 1e-12);
    CHECK(m.outer >= 1.0 - 1e-12);
    CHECK(m.value == doctest::Approx(1.0).epsilon(0.01));
    CHECK(m.resolved);

    // kappa = 1: the set {|x| < 1/2} has measure 2 * 2 * (1/2)^3 / 3
    KernelSpec K1(parse_preset("z2", "1"));
    SampledField tent;
    tent.axes = {xs};
    for (double x : xs) tent.values.push_back(1.0 - std::abs(x));
    auto t = superlevel_measure(tent, 0.5, K1.density());
    CHECK(t.value == doctest::Approx(4.0 / 24.0).epsilon(1e-6));
    CHECK(t.resolved);

    SampledField edge;
    edge.axes = {{0.0, 1.0}};
    edge.values = {1.0, 1.0};
    CHECK_FALSE(superlevel_measure(edge, 0.5, K0.density()).resolved);
}

TEST_CASE("parallel_for covers every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
}
