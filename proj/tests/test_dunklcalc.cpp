#include <random>

#include "doctest.h"
#include "dunkl/dunklcalc.hpp"
#include "dunkl/error.hpp"

using namespace dunkl;

namespace {

RationalPoly P(const char* s, int d) { return parse_poly(s, d); }

bool on_hyperplane(const DunklCalculus<Rational>& C, const std::vector<Rational>& x) {
    for (const auto& f : C.root_forms()) {
        Rational ax = 0;
        for (std::size_t j = 0; j < x.size(); ++j) ax += f.a[j] * x[j];
        if (ax == 0) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("polynomial literals round-trip") {
    auto p = P("3/2*x1^2*x2 - x3", 3);
    CHECK(p.size() == 2);
    CHECK(format_poly(p) == "3/2*x1^2*x2 - x3");
    CHECK(P("-x1 + 2*x1", 1) == P("x1", 1));
    CHECK(P("0.5*x1*x1", 1) == P("1/2*x1^2", 1));
    CHECK(P("x2^0", 2) == RationalPoly::constant(2, 1));
    CHECK_THROWS_AS(P("x4", 3), InvalidArgument);
    CHECK_THROWS_AS(P("x1 +", 1), InvalidArgument);
    CHECK_THROWS_AS(P("2**x1", 1), InvalidArgument);
}

TEST_CASE("exact linear division") {
    auto p = P("x1^2 - x2^2", 2);
    std::vector<Rational> a{1, -1};
    RationalPoly rem(2);
    auto q = p.divide_linear(a, &rem);
    CHECK(rem.is_zero());
    CHECK(q == P("x1 + x2", 2));
    auto r = P("x1^2 + 1", 2).divide_linear(std::span<const Rational>(a), &rem);
    CHECK_FALSE(rem.is_zero());
    CHECK(r * RationalPoly::linear(std::span<const Rational>(a)) + rem == P("x1^2 + 1", 2));
}

TEST_CASE("divided difference examples") {
    DunklCalculus<Rational> Z(parse_preset("z2^1:kappa=1/3"));
    CHECK(Z.divided_difference(P("x1^2", 1), 0).is_zero());
    // direction e1: (x - (-x)) / x = 2
    CHECK(Z.divided_difference(P("x1", 1), 0) == RationalPoly::constant(1, 2));
    DunklCalculus<double> Zf(parse_preset("z2^1:kappa=1/3"));
    auto qf = Zf.divided_difference(P("x1", 1).to_float(), 0);
    CHECK(qf.coeff(Monomial{}) == doctest::Approx(std::sqrt(2.0)));

    DunklCalculus<Rational> A(parse_preset("a:1"));
    CHECK(A.divided_difference(P("x1 - x2", 2), 0) == RationalPoly::constant(2, 2));
    CHECK(A.divided_difference(P("x1*x2", 2), 0).is_zero());
}

TEST_CASE("Dunkl derivative examples") {
    for (const char* k : {"0", "1/2", "1", "7/3"}) {
        Rational kappa = parse_rational(k);
        DunklCalculus<Rational> Z(parse_preset(std::string("z2^1:kappa=") + k));
        CHECK(Z.dunkl_partial(P("x1", 1), 0) == RationalPoly::constant(1, 1 + 2 * kappa));
        CHECK(Z.dunkl_partial(P("x1^2", 1), 0) == P("2*x1", 1));
        // Delta(x^2) = 2(1 + 2 kappa)
        CHECK(Z.dunkl_laplacian(P("x1^2", 1)) == RationalPoly::constant(1, 2 * (1 + 2 * kappa)));
        // Gamma(x) = 1 + 2 kappa
        auto G = Z.gamma(P("x1", 1), P("x1", 1));
        CHECK(G.total == RationalPoly::constant(1, 1 + 2 * kappa));
        CHECK(G.total == Z.gamma_defining(P("x1", 1), P("x1", 1)));
        // heat flow of x^2
        Rational t(3, 7);
        CHECK(Z.heat_poly(P("x1^2", 1), t) == P("x1^2", 1) + RationalPoly::constant(1, 2 * (1 + 2 * kappa) * t));
    }
    DunklCalculus<Rational> T0(parse_preset("trivial:d=2"));
    auto p = P("x1^3*x2 - 5*x2^2 + x1", 2);
    CHECK(T0.dunkl_partial(p, 0) == p.derivative(0));
    CHECK(T0.dunkl_laplacian(P("x1^2 + x2^2", 2)) == RationalPoly::constant(2, 4));
    CHECK(T0.gamma(p, p).total == T0.gamma(p, p).gradient);
    CHECK(T0.heat_poly(P("x1", 2), Rational(5)) == P("x1", 2));
    CHECK(T0.heat_poly(p, Rational(0)) == p);
}

TEST_CASE("Laplacian annihilates constants") {
    for (const char* s : {"z2^3:kappa=1,2,1/2", "a:2", "b:2:kappa=1/2,3"}) {
        auto R = parse_preset(s);
        DunklCalculus<Rational> C(R);
        CHECK(C.dunkl_laplacian(RationalPoly::constant(R.dim(), 5)).is_zero());
    }
}

TEST_CASE("exact property suite on random polynomials") {
    std::mt19937_64 rng(2024);
    for (const char* s : {"z2^3:kappa=1,2,1/2", "a:2:kappa=3/4", "b:2:kappa=1/2,2"}) {
        auto R = parse_preset(s);
        DunklCalculus<Rational> C(R);
        int d = R.dim();
        Rational bound = 1 + 2 * C.chi();
        for (int k = 0; k < 15; ++k) {
            auto p = random_poly(d, 5, rng);
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j)
                    CHECK(C.dunkl_partial(C.dunkl_partial(p, j), i) == C.dunkl_partial(C.dunkl_partial(p, i), j));
            CHECK(C.laplacian_composed(p) == C.laplacian_expanded(p));
            auto q = random_poly(d, 4, rng);
            CHECK(C.gamma(p, q).total == C.gamma_defining(p, q));
            // Leibniz with an invariant factor
            auto inv = C.reynolds(random_poly(d, 2, rng, 4));
            for (int j = 0; j < d; ++j)
                CHECK(C.dunkl_partial(p * inv, j) == inv * C.dunkl_partial(p, j) + p * C.dunkl_partial(inv, j));
            Rational s1(1, 3), s2(2, 5);
            CHECK(C.heat_poly(C.heat_poly(p, s1), s2) == C.heat_poly(p, s1 + s2));
            for (int n = 0; n < 10; ++n) {
                auto x = random_rational_point(d, rng);
                if (on_hyperplane(C, x)) continue;
                Rational g = C.gamma_at(p, x);
                CHECK(g >= 0);
                CHECK(C.dunkl_grad_sq_at(p, x) <= bound * g);
                CHECK(g == C.gamma(p, p).total.evaluate(std::span<const Rational>(x)));
            }
        }
    }
}

TEST_CASE("non-invariant factor breaks Leibniz") {
    DunklCalculus<Rational> C(parse_preset("z2^1:kappa=1"));
    auto p = P("x1", 1);
    CHECK_FALSE(C.dunkl_partial(p * p, 0) == p * C.dunkl_partial(p, 0) + p * C.dunkl_partial(p, 0));
}

TEST_CASE("float path mirrors exact path") {
    std::mt19937_64 rng(9);
    auto R = parse_preset("b:2:kappa=1/2,2");
    DunklCalculus<Rational> E(R);
    DunklCalculus<double> F(R);
    for (int k = 0; k < 10; ++k) {
        auto p = random_poly(2, 5, rng);
        auto le = E.dunkl_laplacian(p).to_float();
        auto lf = F.dunkl_laplacian(p.to_float());
        CHECK(F.equal(le, lf));
    }
    // dihedral group: float only
    auto I5 = parse_preset("i2:5:kappa=2/3");
    CHECK_THROWS_AS(DunklCalculus<Rational>{I5}, UnsupportedVariant);
    DunklCalculus<double> D(I5);
    for (int k = 0; k < 10; ++k) {
        auto p = random_poly(2, 5, rng).to_float();
        CHECK(D.equal(D.dunkl_partial(D.dunkl_partial(p, 0), 1), D.dunkl_partial(D.dunkl_partial(p, 1), 0)));
        CHECK(D.equal(D.gamma(p, p).total, D.gamma_defining(p, p)));
    }
}

TEST_CASE("degree cap") {
    DunklCalculus<Rational> C(parse_preset("z2^1"));
    CHECK_THROWS_AS(C.dunkl_partial(P("x1^13", 1), 0), InvalidArgument);
}
