#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "dunkl/error.hpp"
#include "dunkl/verifier.hpp"
#include "../src/verify_fit.hpp"

using namespace dunkl;

namespace {

KernelSpec z2(const char* k) { return KernelSpec(parse_preset("z2", std::string(k))); }

const FitReport& fit(const SuiteReport& r, const std::string& id) {
    for (const auto& f : r.fits)
        if (f.id == id) return f;
    FAIL("no fit " << id);
    return r.fits.front();
}

const Check& check(const SuiteReport& r, const std::string& id) {
    for (const auto& c : r.checks)
        if (c.id == id) return c;
    FAIL("no check " << id);
    return r.checks.front();
}

}  // namespace

TEST_CASE("fit_slope recovers a line and ignores shifts") {
    std::vector<double> x{0, 1, 2, 5}, y;
    for (double v : x) y.push_back(-1.5 * v + 4.0);
    CHECK(fit_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-14));
    for (auto& v : y) v += 100.0;
    CHECK(fit_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK_THROWS_AS(fit_slope({1.0}, {2.0}), InvalidArgument);
}

TEST_CASE("exterior_integral against closed forms") {
    auto gauss = [](std::span<const double> x) {
        double s = 0;
        for (double v : x) s += v * v;
        return std::exp(-s);
    };
    const double sp = std::sqrt(std::numbers::pi);
    SUBCASE("kappa 0, y = 0") {
        auto S = z2("0");
        Vec y{0.0};
        CHECK(exterior_integral(gauss, S, y, 0.5, 10.0).value == doctest::Approx(sp * std::erfc(0.5)).epsilon(1e-10));
        CHECK(exterior_integral(gauss, S, y, 0.0, 10.0).value == doctest::Approx(sp).epsilon(1e-10));
    }
    SUBCASE("kappa 0, y = 1 removes both orbit balls") {
        auto S = z2("0");
        Vec y{1.0};
        double expect = sp - sp * (std::erf(1.5) - std::erf(0.5));
        CHECK(exterior_integral(gauss, S, y, 0.5, 10.0).value == doctest::Approx(expect).epsilon(1e-10));
    }
    SUBCASE("kappa 1 weight 2 x^2") {
        auto S = z2("1");
        Vec y{0.0};
        double r = 0.7;
        double expect = 2.0 * r * std::exp(-r * r) + sp * std::erfc(r);
        CHECK(exterior_integral(gauss, S, y, r, 10.0).value == doctest::Approx(expect).epsilon(1e-10));
    }
    SUBCASE("two dimensions, disc removed") {
        KernelSpec S(parse_preset("z2^2", std::string("0")));
        Vec y{0.0, 0.0};
        CHECK(exterior_integral(gauss, S, y, 1.0, 8.0, 1e-10).value ==
              doctest::Approx(std::numbers::pi * std::exp(-1.0)).epsilon(1e-7));
    }
}

TEST_CASE("m = 0 time-derivative quantity equals the upper-bound quantity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (const char* k : {"0", "1/2", "2"}) {
        auto S = z2(k);
        for (int i = 0; i < 20; ++i) {
            double t = std::pow(10.0, U(rng) / 1.5);
            Vec x{U(rng)}, y{U(rng)};
            double a = log_kernel_bound_quantity(S, KernelBound::upper, 0, 0, 0.1, t, x, y);
            double b = log_kernel_bound_quantity(S, KernelBound::time_derivative, 0, 0, 0.1, t, x, y);
            CHECK(a == doctest::Approx(b).epsilon(1e-10));
        }
    }
}

TEST_CASE("kappa 0 upper bound constant is 1/sqrt(pi)") {
    // sup_{x,y} (4 pi t)^{-1/2} e^{-|x-y|^2/4t} e^{c|x-y|^2/t} 2 sqrt t is at x = y
    KernelSweep sw;
    sw.t = {0.1, 1.0};
    sw.points = {{0.0}, {0.5}, {-2.0}};
    auto rep = verify_kernel_bounds(z2("0"), sw);
    CHECK(fit(rep, "2.4").constant == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK(check(rep, "2.4-gaussian-constant").pass);
    CHECK(rep.pass());
}

TEST_CASE("unstable fits halve the exponent and record it") {
    // the dense grid sees a value exp(10 e) larger, so stability needs |expm1(10 e)| < 1/4
    auto eval = [](double e, bool dense) {
        SweepMax m;
        m.add(dense ? 10.0 * e : 0.0, [] { return std::string("here"); });
        return m;
    };
    FitReport f = fit_with_halving("synthetic", 0.125, 3, 0.25, eval);
    CHECK(f.halvings == 3);
    CHECK(f.exponent == 0.125 / 8);
    CHECK(f.requested_exponent == 0.125);
    CHECK(f.ok());
    FitReport g = fit_with_halving("synthetic", 0.125, 1, 0.25, eval);
    CHECK(g.halvings == 1);
    CHECK_FALSE(g.stable);

    auto inf = [](double, bool) {
        SweepMax m;
        m.add(INFINITY, [] { return std::string("x=0"); });
        return m;
    };
    FitReport h = fit_with_halving("blowup", 0.5, 2, 0.25, inf);
    CHECK_FALSE(h.finite);
    CHECK(h.halvings == 2);
    CHECK(h.location == "non-finite at x=0");
}

TEST_CASE("lemma suite oracles for kappa 0") {
    LemmaSweep sw;
    sw.s = {0.1, 1.0};
    sw.t_over_s = {0.0, 2.0};
    sw.y = {{0.0}};
    sw.m = {0};
    auto rep = verify_integral_lemmas(z2("0"), sw);
    CHECK(rep.pass());
    // int |d_x h_s|^2 dx = sqrt(2 pi) / (16 pi) s^{-3/2}; times s mu(B(y, sqrt s)) = 2 s^{3/2}
    CHECK(fit(rep, "2.7:m=0").constant ==
          doctest::Approx(std::sqrt(2.0 * std::numbers::pi) / (8.0 * std::numbers::pi)).epsilon(1e-7));
    // t = 0: int e^{-2 delta x^2/s} dx / (2 sqrt s), and t/s = 2 gives erfc(sqrt(4 delta)) e^{2 delta}
    double d = sw.delta;
    double at0 = std::sqrt(std::numbers::pi / (2.0 * d)) / 2.0;
    double at2 = at0 * std::erfc(std::sqrt(4.0 * d)) * std::exp(2.0 * d);
    CHECK(fit(rep, "lemma-2.2").constant == doctest::Approx(std::max(at0, at2)).epsilon(1e-8));
    CHECK(check(rep, "2.7-gaussian-exponent:m=0").value < 1e-8);
    CHECK(check(rep, "2.8-decay-slope:m=0").pass);
}

TEST_CASE("lemma suite for kappa 1 is finite and stable") {
    LemmaSweep sw;
    sw.s = {0.1, 1.0};
    sw.t_over_s = {0.0, 1.0, 4.0};
    sw.y = {{0.0}, {1e-3}, {0.3}, {0.6}, {1.0}, {1.5}, {2.0}};
    auto rep = verify_integral_lemmas(z2("1"), sw);
    for (const auto& f : rep.fits) {
        INFO(f.id);
        CHECK(f.ok());
    }
    CHECK(rep.pass());
}

TEST_CASE("doubling suite: exact homogeneity and theta = 1 at the origin") {
    auto rep = doubling_suite(parse_preset("z2", std::string("1")), DoublingSweep::standard(1, 1));
    CHECK(rep.pass());
    CHECK(check(rep, "origin-ratio-closed-form").value < 1e-12);
    // for |x|^2 weights the ratio never exceeds (R/r)^3 and reaches it at 0
    CHECK(fit(rep, "2.1-upper-theta").constant == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(check(rep, "volume-slope-max").value == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("cz suite on small runs") {
    CZSuiteOptions opt;
    opt.random_functions = 6;
    for (const char* p : {"z2:kappa=1", "z2^2:kappa=1/2,3/2"}) {
        auto rep = cz_suite(parse_preset(p), 3, opt);
        INFO(p);
        CHECK(rep.pass());
        CHECK(check(rep, "cz-worked-example").pass);
    }
}

TEST_CASE("claim 3.4 ratio for a spike at the origin") {
    auto rep = claim34_suite(z2("1"));
    CHECK(rep.pass());
    Claim34SuiteOptions opt;
    opt.t = {1e-2, 1e-1};
    CHECK(claim34_suite(z2("0"), opt).pass());
}

TEST_CASE("weak11 Gamma profile for kappa 0 equals 1/sqrt(pi)") {
    // S f(x) = 1/(2 sqrt(pi) |x - c|) away from a unit mass, so lambda mu{S f > lambda} = 1/sqrt(pi)
    Weak11Options opt;
    opt.widths = {0.1};
    opt.modes = {SquareMode::gamma};
    opt.x_per_decade = 8;
    auto rep = weak11_profile(z2("0"), opt);
    CHECK(rep.pass());
    double q = 0;
    for (const auto& n : rep.notes)
        if (n.rfind("Q(gamma", 0) == 0) q = std::stod(n.substr(n.rfind('=') + 1));
    CHECK(q == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(0.02));
}

TEST_CASE("L2 energy identities for a bump") {
    EnergyOptions opt;
    opt.panels = 2;
    opt.order = 8;
    auto rep = l2_energy_identities(z2("1/2"), {TestFunction::bump(Vec{0.3}, 0.5)}, opt);
    CHECK(rep.pass());
    CHECK(check(rep, "l2-gamma:f0").value == doctest::Approx(0.5).epsilon(0.01));
    CHECK(check(rep, "l2-horizontal:f0").value == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("exact suites pass on small presets") {
    CalculusOptions c;
    c.polynomials = 10;
    CHECK(verify_calculus_identities(parse_preset("b:2:kappa=1/2,2"), 5, c).pass());
    CHECK(kernel_calibration_suite({0.0, 1.0}, 5, 3).pass());
    CHECK(polynomial_flow_suite(parse_preset("z2", std::string("1")), 5, 3).pass());
    KernelSweep sw;
    sw.t = {0.1, 1.0};
    sw.points = {{0.0}, {0.5}, {-2.0}};
    CHECK(heat_equation_suite(z2("1"), sw).pass());
}

TEST_CASE("heat suite skips subnormal kernel values") {
    // exp(-|x - y|^2 / 4t) = exp(-750) is subnormal
    KernelSweep sw;
    sw.t = {0.01};
    sw.points = {{0.0, 0.0, 0.0}, {0.0, 0.0, std::sqrt(30.0)}};
    SuiteReport r = heat_equation_suite(KernelSpec(parse_preset("a:2:kappa=0")), sw);
    CHECK(r.pass());
    CHECK(r.notes.front().find("2 probes skipped") != std::string::npos);
}

TEST_CASE("reports: JSON fields, CSV quoting and hashes") {
    SuiteReport r;
    r.suite = "demo";
    r.fits.push_back({"b", 0.125, 0.0625, 1, 2.0, 2.1, "x=(1)", true, true});
    r.check("ok", true, 1.0, 2.0);
    r.csv.header = {"a", "b"};
    r.csv.add_row({"1,2", "say \"hi\""});
    CHECK(r.csv.str() == "a,b\n\"1,2\",\"say \"\"hi\"\"\"\n");
    auto j = r.to_json("abc");
    CHECK(j["suite"] == "demo");
    CHECK(j["status"] == "pass");
    CHECK(j["config_hash"] == "abc");
    CHECK(j["constants"][0]["exponent_used"] == 0.0625);
    CHECK(j["constants"][0]["halvings"] == 1);
    CHECK(j["locations"][0]["location"] == "x=(1)");
    r.check("bad", false, INFINITY, 1.0);
    CHECK_FALSE(r.pass());
    CHECK(r.to_json("abc")["checks"][1]["value"] == "inf");

    CHECK(config_hash("a=1") == config_hash("a=1"));
    CHECK(config_hash("a=1") != config_hash("a=2"));
    CHECK(config_hash("").size() == 16);

    auto dir = std::filesystem::temp_directory_path() / "dunkl_report_test";
    std::filesystem::remove_all(dir);
    r.write(dir, "abc");
    CHECK(std::filesystem::exists(dir / "demo.json"));
    std::ifstream in(dir / "demo.csv");
    std::string first;
    std::getline(in, first);
    CHECK(first == "a,b");
    std::filesystem::remove_all(dir);
}
