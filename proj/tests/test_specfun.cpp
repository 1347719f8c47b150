#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "doctest.h"
#include "dunkl/specfun.hpp"

using namespace dunkl;

namespace {

// Independent oracle through Boost's modified Bessel functions, in long double.
long double bessel_scaled_E(double kappa, double z) {
    long double u = std::abs(static_cast<long double>(z));
    long double pre = boost::math::tgamma(static_cast<long double>(kappa) + 0.5L) *
                      std::pow(u / 2.0L, 0.5L - kappa) * std::exp(-u);
    long double a = boost::math::cyl_bessel_i(static_cast<long double>(kappa) - 0.5L, u);
    long double b = boost::math::cyl_bessel_i(static_cast<long double>(kappa) + 0.5L, u);
    return pre * (z > 0 ? a + b : a - b);
}

long double bessel_scaled_S(double kappa, double z) {
    long double u = std::abs(static_cast<long double>(z));
    long double pre = boost::math::tgamma(static_cast<long double>(kappa) + 0.5L) *
                      std::pow(u / 2.0L, 0.5L - kappa) * std::exp(-u);
    return pre * boost::math::cyl_bessel_i(static_cast<long double>(kappa) + 0.5L, u) / u;
}

}  // namespace

TEST_CASE("series coefficients") {
    DunklKernelFunctions F0(0.0);
    double f = 1.0;
    for (int m = 0; m < 20; ++m) {
        CHECK(F0.coefficient(m) == doctest::Approx(1.0 / f).epsilon(1e-15));
        f *= m + 1;
    }
    DunklKernelFunctions F(1.5);
    CHECK(F.coefficient(1) == doctest::Approx(1.0 / 4.0));
    CHECK(F.coefficient(2) == doctest::Approx(1.0 / 8.0));
    CHECK(F.scaled_S(0.0) == doctest::Approx(1.0 / 4.0));
}

TEST_CASE("scaled E and S against Bessel functions") {
    for (double kappa : {0.0, 0.3, 0.5, 1.0, 2.5}) {
        DunklKernelFunctions F(kappa);
        for (double z : {0.05, 0.7, 1.0, 3.0, 9.9, 10.1, 24.9, 25.1, 40.0, 120.0, 600.0}) {
            for (double sg : {1.0, -1.0}) {
                double zz = sg * z;
                // for kappa = 0 the Bessel difference cancels completely; E = exp(z) there
                long double ref = kappa == 0.0 ? std::exp(static_cast<long double>(zz - z)) : bessel_scaled_E(kappa, zz);
                CAPTURE(kappa);
                CAPTURE(zz);
                CHECK(std::abs(F.scaled_E(zz) - ref) <= 1e-12 * std::abs(ref) + 1e-300);
                long double rs = bessel_scaled_S(kappa, zz);
                CHECK(std::abs(F.scaled_S(zz) - rs) <= 1e-12 * std::abs(rs));
            }
        }
    }
}

TEST_CASE("Taylor coefficients are consistent across the branch switch") {
    for (double kappa : {0.5, 1.0, 2.5}) {
        DunklKernelFunctions F(kappa);
        for (double z0 : {-30.0, -5.0, -0.4, 0.0, 0.4, 5.0, 24.0, 26.0, 60.0}) {
            int s = z0 > 0 ? 1 : (z0 < 0 ? -1 : 0);
            if (std::abs(z0) < 1.0) s = 0;
            double E[9], S[9];
            F.scaled_taylor(z0, s, 8, E, S);
            // finite differences of the scaled functions reproduce the first coefficients
            double h = 1e-3;
            auto Es = [&](double z) {
                double e[1], q[1];
                F.scaled_taylor(z, s, 0, e, q);
                return std::pair<double, double>{e[0], q[0]};
            };
            auto [ep, sp] = Es(z0 + h);
            auto [em, sm] = Es(z0 - h);
            CAPTURE(z0);
            CHECK((ep - em) / (2 * h) == doctest::Approx(E[1]).epsilon(1e-6));
            CHECK((sp - sm) / (2 * h) == doctest::Approx(S[1]).epsilon(1e-5));
            // Taylor polynomial at a nearby point
            double d = 0.05, te = 0.0, ts = 0.0;
            for (int k = 8; k >= 0; --k) {
                te = te * d + E[k];
                ts = ts * d + S[k];
            }
            auto [e1, s1] = Es(z0 + d);
            CHECK(te == doctest::Approx(e1).epsilon(1e-12));
            CHECK(ts == doctest::Approx(s1).epsilon(1e-12));
        }
    }
}
