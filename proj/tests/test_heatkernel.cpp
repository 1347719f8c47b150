#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dunkl/dunklcalc.hpp"
#include "dunkl/error.hpp"
#include "dunkl/heatkernel.hpp"
#include "dunkl/multipoly.hpp"

using namespace dunkl;

namespace {

KernelSpec z2(double kappa) { return KernelSpec(parse_preset("z2", std::to_string(kappa))); }

double h1(const KernelSpec& K, double t, double x, double y) {
    double xs[1] = {x}, ys[1] = {y};
    return eval_kernel(K, t, xs, ys);
}

double weight1(double kappa, double y) { return std::pow(2.0, kappa) * std::pow(std::abs(y), 2.0 * kappa); }

}  // namespace

TEST_CASE("normalization matches the closed form") {
    for (double kappa : {0.0, 0.5, 1.0, 2.5, 0.3}) {
        auto F = kernel_factor(kappa);
        double closed = 1.0 / (std::pow(2.0, 3.0 * kappa + 1.0) * std::tgamma(kappa + 0.5));
        CAPTURE(kappa);
        CHECK(F->c_norm() == doctest::Approx(closed).epsilon(1e-11));
        CHECK(F->validation_error() < 1e-6);
    }
}

TEST_CASE("kappa = 0 is the Gaussian kernel") {
    auto K = z2(0.0);
    CHECK(K.variant() == KernelVariant::gaussian);
    CHECK(h1(K, 1.0, 0.0, 0.0) == doctest::Approx(1.0 / std::sqrt(4.0 * std::numbers::pi)).epsilon(1e-13));
    for (double t : {0.01, 0.7, 5.0})
        for (double x : {-2.0, 0.3, 4.0})
            for (double y : {-1.0, 0.0, 3.5}) {
                double g = std::exp(-(x - y) * (x - y) / (4 * t)) / std::sqrt(4 * std::numbers::pi * t);
                CHECK(std::abs(h1(K, t, x, y) - g) <= 1e-12 * g);
            }
    KernelSpec K3(parse_preset("a:2", "0"));
    CHECK(K3.variant() == KernelVariant::gaussian);
    std::vector<double> x{0.2, -0.4, 1.0}, y{1.0, 0.5, -0.3};
    double r2 = 0.0;
    for (int i = 0; i < 3; ++i) r2 += (x[i] - y[i]) * (x[i] - y[i]);
    CHECK(eval_kernel(K3, 0.8, x, y) ==
          doctest::Approx(std::exp(-r2 / 3.2) / std::pow(4 * std::numbers::pi * 0.8, 1.5)).epsilon(1e-12));
}

TEST_CASE("symmetry and positivity") {
    for (double kappa : {0.5, 1.0, 2.5}) {
        auto K = z2(kappa);
        for (double t : {0.05, 1.0, 20.0})
            for (double x : {-3.0, -0.2, 0.0, 1.1, 7.0})
                for (double y : {-5.0, -0.7, 0.4, 2.0}) {
                    double a = h1(K, t, x, y);
                    CHECK(a > 0.0);
                    CHECK(std::abs(a - h1(K, t, y, x)) <= 1e-12 * a);
                    CHECK(std::abs(a - h1(K, t, -x, -y)) <= 1e-12 * a);
                }
    }
}

TEST_CASE("large arguments stay finite") {
    auto K = z2(1.0);
    CHECK(std::isfinite(h1(K, 1e-4, 10.0, 10.0)));
    CHECK(h1(K, 1e-4, 10.0, 10.0) > 0.0);
    CHECK(h1(K, 1e-3, 5.0, -5.0) >= 0.0);
    double xs[1] = {1.0}, ys[1] = {1.0};
    CHECK_THROWS_AS(eval_kernel(K, 0.0, xs, ys), InvalidArgument);
    CHECK_THROWS_AS(eval_kernel(K, -1.0, xs, ys), InvalidArgument);
}

TEST_CASE("semigroup property by direct quadrature") {
    double kappa = 1.0;
    auto K = z2(kappa);
    double s = 0.3, t = 0.5, x = 0.7, y = -1.2;
    auto f = [&](double z) { return h1(K, s, x, z) * h1(K, t, z, y) * weight1(kappa, z); };
    AdaptiveOptions opt{1e-16, 1e-13, 5000};
    double lhs = integrate_adaptive(f, -15.0, 15.0, {0.0, x, -x, y, -y}, opt).value;
    double rhs = h1(K, s + t, x, y);
    CHECK(std::abs(lhs - rhs) <= 1e-7 * rhs);
}

TEST_CASE("semigroup_apply reproduces the polynomial heat flow") {
    for (double kappa : {0.0, 0.5, 1.0}) {
        auto K = z2(kappa);
        double x[1] = {0.6};
        for (double t : {0.1, 1.0}) {
            Estimate one = semigroup_apply(K, [](std::span<const double>) { return 1.0; }, t, x);
            CHECK(one.value == doctest::Approx(1.0).epsilon(1e-9));
            Estimate sq = semigroup_apply(K, [](std::span<const double> y) { return y[0] * y[0]; }, t, x);
            CHECK(sq.value == doctest::Approx(0.36 + 2.0 * (1.0 + 2.0 * kappa) * t).epsilon(1e-9));
        }
    }
    // two-dimensional product kernel against the exact heat_poly
    RootSystem R = parse_preset("z2^2", "1/2,3/2");
    KernelSpec K(R);
    CHECK(K.variant() == KernelVariant::z2_product);
    DunklCalculus<Rational> calc(R);
    RationalPoly p = parse_poly("x1^3*x2 - 2*x2^2 + x1 + 1/3", 2);
    Rational t(1, 4);
    RationalPoly hp = calc.heat_poly(p, t);
    FloatPoly pf = p.to_float();
    std::vector<double> x{0.3, -0.8};
    Estimate e = semigroup_apply(K, [&](std::span<const double> y) { return pf.evaluate<double>(y); }, 0.25, x);
    double ref = hp.to_float().evaluate<double>(x);
    CHECK(e.value == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("approximate identity at small time") {
    auto K = z2(1.0);
    double x[1] = {0.5};
    AxisBreaks br{{0.0, 1.0}};
    Estimate e = semigroup_apply(K, [](std::span<const double> y) { return y[0] >= 0 && y[0] <= 1 ? 1.0 : 0.0; },
                                 1e-4, x, {}, br);
    CHECK(std::abs(e.value - 1.0) < 0.01);
}

TEST_CASE("time derivatives") {
    auto K0 = z2(0.0);
    double one[1] = {1.3};
    auto D = eval_kernel_derivatives(K0, 2.0, one, one, 1);
    CHECK(D.dt[1] == doctest::Approx(-0.5 / std::sqrt(4 * std::numbers::pi) * std::pow(2.0, -1.5)).epsilon(1e-12));
    auto K = z2(0.5);
    double x[1] = {1.0}, y[1] = {2.0};
    auto D0 = eval_kernel_derivatives(K, 1.0, x, y, 0);
    CHECK(D0.value == doctest::Approx(eval_kernel(K, 1.0, x, y)).epsilon(1e-14));
    auto D1 = eval_kernel_derivatives(K, 1.0, x, y, 1);
    REQUIRE(D1.dt_xroute.size() == 2);
    CHECK(std::abs(D1.dt_fd[1] - D1.dt_xroute[1]) <= 1e-5 * std::abs(D1.dt_xroute[1]));
    CHECK(std::abs(D1.dt[1] - D1.dt_xroute[1]) <= 1e-10 * std::abs(D1.dt_xroute[1]));
}

TEST_CASE("derivative routes agree across a probe sweep") {
    for (double kappa : {0.0, 0.5, 1.0, 2.5}) {
        auto K = z2(kappa);
        for (double t : {0.02, 0.3, 1.0, 7.0})
            for (double x : {-2.0, 0.4, 1.5})
                for (double y : {-1.0, 0.1, 3.0})
                    for (int m = 1; m <= 3; ++m) {
                        double xs[1] = {x}, ys[1] = {y};
                        CAPTURE(kappa);
                        CAPTURE(t);
                        CAPTURE(x);
                        CAPTURE(y);
                        CAPTURE(m);
                        CHECK_NOTHROW(eval_kernel_derivatives(K, t, xs, ys, m));
                    }
    }
    KernelSpec K2(parse_preset("z2^2", "1,1/2"));
    std::vector<double> x{0.7, -1.1}, y{-0.4, -0.9};
    for (int m = 1; m <= 3; ++m) CHECK_NOTHROW(eval_kernel_derivatives(K2, 0.6, x, y, m));
}

TEST_CASE("spatial gradient and quotients against finite differences") {
    KernelSpec K(parse_preset("z2^2", "1,1/2"));
    std::vector<double> x{0.7, -1.1}, y{-0.4, -0.9};
    double t = 0.6;
    auto D = eval_kernel_derivatives(K, t, x, y, 0);
    double h = 1e-3;
    for (int j = 0; j < 2; ++j) {
        auto at = [&](double d) {
            auto z = x;
            z[j] += d;
            return eval_kernel(K, t, z, y);
        };
        double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
        CHECK(D.grad[j] == doctest::Approx(fd).epsilon(1e-9));
        auto rx = x;
        rx[j] = -rx[j];
        double q = (D.value - eval_kernel(K, t, rx, y)) / (std::sqrt(2.0) * x[j]);
        CHECK(std::abs(D.root_quotients[j]) == doctest::Approx(std::abs(q)).epsilon(1e-12));
        double kj = K.kappas()[j];
        CHECK(D.dunkl_grad[j] == doctest::Approx(fd + kj * (D.value - eval_kernel(K, t, rx, y)) / x[j]).epsilon(1e-9));
    }
}

TEST_CASE("Gamma of the kernel") {
    auto K0 = z2(0.0);
    double x[1] = {0.8}, y[1] = {-0.5};
    double hv = eval_kernel(K0, 0.4, x, y);
    CHECK(gamma_of_kernel(K0, 0, 0.4, x, y) ==
          doctest::Approx(hv * hv * 1.3 * 1.3 / (4 * 0.16)).epsilon(1e-12));

    auto K = z2(1.0);
    double t = 0.5, xv = 1.0, yv = -1.0, e = 1e-3;
    auto f = [&](double u) { return h1(K, t, u, yv); };
    double fx = (-f(xv + 2 * e) + 8 * f(xv + e) - 8 * f(xv - e) + f(xv - 2 * e)) / (12 * e);
    double q = (f(xv) - f(-xv)) / xv;
    double fd = fx * fx + 0.5 * q * q;
    double xs[1] = {xv}, ys[1] = {yv};
    CHECK(gamma_of_kernel(K, 0, t, xs, ys) == doctest::Approx(fd).epsilon(1e-4));

    // m = 1 against the x-route: Gamma(Delta h) from finite differences of Delta h in x
    auto lap = [&](double u) {
        double us[1] = {u};
        return laplacian_powers_x(K, t, us, ys, 1)[1];
    };
    double lx = (-lap(xv + 2 * e) + 8 * lap(xv + e) - 8 * lap(xv - e) + lap(xv - 2 * e)) / (12 * e);
    double lq = (lap(xv) - lap(-xv)) / xv;
    CHECK(gamma_of_kernel(K, 1, t, xs, ys) == doctest::Approx(lx * lx + 0.5 * lq * lq).epsilon(1e-6));
}

TEST_CASE("Gamma on the hyperplane") {
    auto K = z2(1.0);
    double x0[1] = {0.0}, y[1] = {0.9};
    CHECK_THROWS_AS(gamma_of_kernel(K, 0, 0.5, x0, y), DomainError);
    double lim = gamma_of_kernel(K, 1, 0.5, x0, y, true);
    double near[1] = {1e-7};
    CHECK(lim == doctest::Approx(gamma_of_kernel(K, 1, 0.5, near, y)).epsilon(1e-6));
    CHECK(lim >= 0.0);
    CHECK(std::exp(log_gamma_of_kernel(K, 1, 0.5, near, y)) == doctest::Approx(gamma_of_kernel(K, 1, 0.5, near, y)));
}

TEST_CASE("pointwise inequality for the kernel") {
    KernelSpec K(parse_preset("z2^2", "1,1/2"));
    double bound = 1.0 + 2.0 * K.chi();
    for (double t : {0.1, 1.0})
        for (double a : {-1.3, 0.4})
            for (double b : {-0.6, 2.0}) {
                std::vector<double> x{a, b}, y{0.5, -0.7};
                for (int m = 0; m <= 2; ++m) {
                    double g = gamma_of_kernel(K, m, t, x, y);
                    CHECK(g >= 0.0);
                    CHECK(dunkl_grad_sq_of_kernel(K, m, t, x, y) <= bound * g * (1 + 1e-12));
                }
            }
}

TEST_CASE("unsupported systems are refused") {
    CHECK_THROWS_AS(KernelSpec(parse_preset("a:2", "1")), UnsupportedVariant);
    CHECK_THROWS_AS(KernelSpec(parse_preset("b:2", "1")), UnsupportedVariant);
}
