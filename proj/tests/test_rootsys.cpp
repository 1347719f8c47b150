#include <cmath>
#include <random>

#include "doctest.h"
#include "dunkl/error.hpp"
#include "dunkl/rootsys.hpp"

using namespace dunkl;

namespace {

// Independent closure oracle: repeatedly multiply until no new matrix appears,
// comparing entries rounded to 1e-6.
std::size_t brute_force_order(const RootSystem& R) {
    std::vector<Matrix> gens;
    for (const auto& r : R.positive_roots()) gens.push_back(reflection_matrix(r.vec));
    std::vector<Matrix> all{Matrix::identity(R.dim())};
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Matrix> next = all;
        for (const auto& a : all)
            for (const auto& g : gens) {
                Matrix p = a * g;
                bool found = false;
                for (const auto& b : next)
                    if (max_entry_distance(b, p) < 1e-6) found = true;
                if (!found) {
                    next.push_back(p);
                    grew = true;
                }
            }
        all = std::move(next);
    }
    return all.size();
}

}  // namespace

TEST_CASE("reflect examples") {
    Vec a{std::sqrt(2.0), 0.0};
    Vec r = reflect(a, Vec{1.0, 2.0});
    CHECK(r[0] == doctest::Approx(-1.0));
    CHECK(r[1] == doctest::Approx(2.0));

    Vec s = reflect(Vec{1.0, -1.0}, Vec{3.0, 7.0});
    CHECK(s[0] == doctest::Approx(7.0));
    CHECK(s[1] == doctest::Approx(3.0));

    Vec fixed = reflect(Vec{1.0, -1.0}, Vec{2.0, 2.0});
    CHECK(fixed[0] == doctest::Approx(2.0));

    CHECK_THROWS_AS(reflect(Vec{0.0, 0.0}, Vec{1.0, 1.0}), InvalidArgument);
}

TEST_CASE("reflect is an orthogonal involution") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        Vec a{n(rng), n(rng), n(rng)}, x{n(rng), n(rng), n(rng)};
        Vec y = reflect(a, x);
        CHECK(std::abs(norm(y) - norm(x)) < 1e-12);
        Vec z = reflect(a, y);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(z[i] - x[i]) < 1e-12);
    }
}

TEST_CASE("group orders") {
    for (int d = 1; d <= 4; ++d) {
        auto R = parse_preset("z2^" + std::to_string(d));
        auto G = ReflectionGroup::generate(R);
        CHECK(G.order() == (1u << d));
        CHECK(G.order() == brute_force_order(R));
    }
    CHECK(ReflectionGroup::generate(parse_preset("a:2")).order() == 6);
    CHECK(ReflectionGroup::generate(parse_preset("a:3")).order() == 24);
    auto B2 = parse_preset("b:2");
    CHECK(ReflectionGroup::generate(B2).order() == 8);
    CHECK(brute_force_order(B2) == 8);
    CHECK(ReflectionGroup::generate(parse_preset("b:4")).order() == 384);
    CHECK(ReflectionGroup::generate(parse_preset("i2:5")).order() == 10);
}

TEST_CASE("group elements are orthogonal, exactly for rational systems") {
    auto G = ReflectionGroup::generate(parse_preset("b:3"));
    REQUIRE(G.exact());
    for (const auto& e : G.exact_elements()) {
        auto p = e.transpose() * e;
        CHECK(p.a == RationalMatrix::identity(3).a);
    }
    for (std::size_t i = 0; i < G.order(); ++i) {
        // words reproduce elements
        Matrix m = Matrix::identity(3);
        for (auto it = G.words()[i].rbegin(); it != G.words()[i].rend(); ++it)
            m = reflection_matrix(parse_preset("b:3").positive_roots()[static_cast<std::size_t>(*it)].vec) * m;
        CHECK(max_entry_distance(m, G.elements()[i]) < 1e-12);
    }
}

TEST_CASE("group cap") {
    CHECK_THROWS_AS(ReflectionGroup::generate(parse_preset("b:4"), 100), GroupNotFinite);
    // non-crystallographic but finite
    CHECK(ReflectionGroup::generate(parse_preset("i2:7")).order() == 14);
}

TEST_CASE("rho examples") {
    auto G1 = ReflectionGroup::generate(parse_preset("z2^1"));
    CHECK(rho(G1, Vec{1.0}, Vec{-1.0}) == doctest::Approx(0.0));
    auto G0 = ReflectionGroup::generate(parse_preset("trivial:d=2"));
    CHECK(rho(G0, Vec{1.0, 0.0}, Vec{0.0, 1.0}) == doctest::Approx(std::sqrt(2.0)));
    auto GB = ReflectionGroup::generate(parse_preset("b:2"));
    CHECK(rho(GB, Vec{1.0, 0.0}, Vec{0.0, -1.0}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rho is 1-Lipschitz and symmetric") {
    auto G = ReflectionGroup::generate(parse_preset("b:2"));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 10000; ++k) {
        Vec x{u(rng), u(rng)}, y{u(rng), u(rng)}, z{u(rng), u(rng)};
        CHECK(std::abs(rho(G, x, y) - rho(G, x, z)) <= distance(y, z) + 1e-12);
        if (k % 100 == 0) CHECK(std::abs(rho(G, x, y) - rho(G, y, x)) < 1e-12);
    }
}

TEST_CASE("rho-balls are unions of translated Euclidean balls") {
    auto G = ReflectionGroup::generate(parse_preset("a:2"));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 2000; ++k) {
        Vec x{u(rng), u(rng), u(rng)}, y{u(rng), u(rng), u(rng)};
        double r = std::abs(u(rng));
        bool in_union = false;
        for (std::size_t g = 0; g < G.order(); ++g)
            if (distance(x, G.apply(g, y)) < r) in_union = true;
        CHECK((rho(G, x, y) < r) == in_union);
    }
    // radius zero: the ball is the orbit
    Vec x{0.3, -0.1, 1.2};
    CHECK(G.orbit(x).size() == 6);
    for (const auto& p : G.orbit(x)) CHECK(rho(G, x, p) < 1e-12);
}

TEST_CASE("weight examples") {
    WeightedDensity w1(parse_preset("z2^1:kappa=1"));
    CHECK(w1(Vec{1.0}) == doctest::Approx(2.0));
    WeightedDensity w0(parse_preset("trivial:d=3"));
    CHECK(w0(Vec{1.0, -4.0, 9.0}) == 1.0);
    WeightedDensity w2(parse_preset("z2^2:kappa=1/2,1/2"));
    // |sqrt2 * 1| * |sqrt2 * 2| = 4
    CHECK(w2(Vec{1.0, 2.0}) == doctest::Approx(4.0));
    CHECK(w2(Vec{0.0, 2.0}) == 0.0);
    CHECK(w2.chi() == doctest::Approx(1.0));
    CHECK(w2.homogeneous_dim() == doctest::Approx(4.0));
}

TEST_CASE("weight is G-invariant") {
    DunklSystem S(parse_preset("b:3:kappa=1/2,3/2"));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        Vec x{u(rng), u(rng), u(rng)};
        double w = S.density(x);
        for (std::size_t g = 0; g < S.group.order(); ++g)
            CHECK(S.density(S.group.apply(g, x)) == doctest::Approx(w).epsilon(1e-12));
    }
}

TEST_CASE("presets and multiplicities") {
    auto z = parse_preset("z2^3:kappa=1,2,1/2");
    REQUIRE(z.positive_roots().size() == 3);
    CHECK(*z.positive_roots()[2].kappa_exact == Rational(1, 2));
    CHECK(z.chi() == doctest::Approx(3.5));
    auto z2 = parse_preset("z2^d:d=2,kappa=3/4");
    CHECK(z2.dim() == 2);
    CHECK(z2.positive_roots()[1].kappa == doctest::Approx(0.75));
    auto b = parse_preset("b:2:kappa=1,2");
    for (const auto& r : b.positive_roots()) {
        bool is_short = std::abs(std::abs(r.vec[0]) - std::sqrt(2.0)) < 1e-9 || std::abs(std::abs(r.vec[1]) - std::sqrt(2.0)) < 1e-9;
        CHECK(r.kappa == (is_short ? 1.0 : 2.0));
    }
    auto a = parse_preset("a:2", std::string("5/2"));
    CHECK(a.chi() == doctest::Approx(7.5));
    CHECK(parse_preset("a:2").exact());
    CHECK_FALSE(parse_preset("i2:5").exact());
    CHECK_THROWS_AS(parse_preset("a:2:kappa=1,2"), InvalidArgument);
    CHECK_THROWS_AS(parse_preset("nope:3"), InvalidArgument);
}

TEST_CASE("custom root-system text") {
    auto R = parse_root_system_text("dim 2\nroot 1 0 kappa 1/2\nroot 0 1 kappa 1/2  # second axis\n");
    CHECK(R.exact());
    CHECK(ReflectionGroup::generate(R).order() == 4);
    CHECK_THROWS_AS(parse_root_system_text("dim 2\nroot 1 0 kappa 1\nroot 1 1 kappa 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_root_system_text("dim 2\nroot 1 0 kappa 1\nroot 0 1 kappa 1\nroot 1 1 kappa 1\nroot 1 -1 kappa 2\n"),
                    InvalidArgument);
}

TEST_CASE("closed-form axis measure") {
    WeightedDensity w(parse_preset("z2^1:kappa=1"));
    CHECK(w.axis_measure(0, -1.0, 1.0) == doctest::Approx(4.0 / 3.0));
    CHECK(w.axis_measure(0, 99.0, 101.0) == doctest::Approx(2.0 / 3.0 * (101.0 * 101.0 * 101.0 - 99.0 * 99.0 * 99.0)));
    WeightedDensity wb(parse_preset("b:2"));
    CHECK_THROWS_AS(wb.axis_measure(0, 0.0, 1.0), UnsupportedVariant);
}
