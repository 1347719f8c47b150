#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dunkl/error.hpp"
#include "dunkl/quadrature.hpp"
#include "dunkl/verifier.hpp"

namespace dunkl {

namespace {

bool on_hyperplane(const DunklCalculus<Rational>& C, const std::vector<Rational>& x) {
    for (const auto& f : C.root_forms()) {
        Rational ax = 0;
        for (std::size_t j = 0; j < x.size(); ++j) ax += f.a[j] * x[j];
        if (ax == 0) return true;
    }
    return false;
}

struct Tally {
    long count = 0;
    long failures = 0;
    std::string witness;

    void add(bool ok, const std::function<std::string()>& describe) {
        ++count;
        if (!ok && failures++ == 0) witness = describe();
    }
};

double weight1(double kappa, double z) { return kappa == 0.0 ? 1.0 : std::pow(2.0, kappa) * std::pow(std::abs(z), 2.0 * kappa); }

}  // namespace

SuiteReport verify_calculus_identities(const RootSystem& R, std::uint64_t seed, const CalculusOptions& opt) {
    SuiteReport rep;
    rep.suite = "calculus";
    if (!R.exact()) throw UnsupportedVariant("the exact calculus suite needs rational roots and multiplicities");
    auto start = std::chrono::steady_clock::now();
    DunklCalculus<Rational> C(R);
    std::mt19937_64 rng(seed);
    int d = R.dim();
    Rational bound = 1 + 2 * C.chi();
    Tally comm, gamma_pos, ineq, leibniz, lap, gamma_form, semigroup;
    rep.csv.header = {"preset", "poly", "degree", "terms"};
    for (int k = 0; k < opt.polynomials; ++k) {
        RationalPoly p = random_poly(d, opt.max_degree, rng);
        std::string ps = format_poly(p);
        rep.csv.add_row({R.name(), ps, std::to_string(p.degree()), std::to_string(p.size())});
        auto witness = [&](const std::string& what) { return [ps, what] { return what + " fails for p = " + ps; }; };

        std::vector<RationalPoly> D;
        for (int i = 0; i < d; ++i) D.push_back(C.dunkl_partial(p, i));
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                comm.add(C.dunkl_partial(D[static_cast<std::size_t>(j)], i) == C.dunkl_partial(D[static_cast<std::size_t>(i)], j),
                         witness("D_" + std::to_string(i + 1) + " D_" + std::to_string(j + 1) + " = D_" +
                                 std::to_string(j + 1) + " D_" + std::to_string(i + 1)));

        lap.add(C.laplacian_composed(p) == C.laplacian_expanded(p), witness("composed = expanded Laplacian"));

        RationalPoly q = random_poly(d, std::max(1, opt.max_degree - 2), rng);
        gamma_form.add(C.gamma(p, q).total == C.gamma_defining(p, q),
                       witness("Gamma(p, q) with q = " + format_poly(q) + ": explicit form = defining form"));

        RationalPoly inv = C.reynolds(random_poly(d, 2, rng, 4));
        for (int j = 0; j < d; ++j)
            leibniz.add(C.dunkl_partial(p * inv, j) == inv * D[static_cast<std::size_t>(j)] + p * C.dunkl_partial(inv, j),
                        witness("Leibniz with invariant " + format_poly(inv)));

        Rational s1(1, 3), s2(2, 5);
        semigroup.add(C.heat_poly(C.heat_poly(p, s1), s2) == C.heat_poly(p, s1 + s2), witness("heat_poly semigroup"));

        RationalPoly G = C.gamma(p, p).total;
        for (int n = 0; n < opt.points_per_poly; ++n) {
            auto x = random_rational_point(d, rng);
            if (on_hyperplane(C, x)) continue;
            Rational g = C.gamma_at(p, x);
            std::ostringstream xs;
            for (std::size_t j = 0; j < x.size(); ++j) xs << (j ? "," : "") << x[j].get_str();
            gamma_pos.add(g >= 0 && g == G.evaluate(std::span<const Rational>(x)),
                          witness("Gamma >= 0 at (" + xs.str() + ")"));
            ineq.add(C.dunkl_grad_sq_at(p, x) <= bound * g, witness("(1.3) at (" + xs.str() + ")"));
        }
    }
    auto add = [&](const char* id, const Tally& t) {
        rep.check(std::string(id) + ":" + R.name(), t.failures == 0, static_cast<double>(t.failures), 0.0,
                  t.failures ? t.witness : std::to_string(t.count) + " exact checks");
    };
    add("commutativity", comm);
    add("gamma-nonnegative", gamma_pos);
    add("gamma-explicit-form", gamma_form);
    add("1.3", ineq);
    add("2.3-leibniz", leibniz);
    add("laplacian-routes", lap);
    add("heat-semigroup", semigroup);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.notes.push_back(R.name() + ": " + std::to_string(opt.polynomials) + " polynomials of degree <= " +
                        std::to_string(opt.max_degree) + " in " + fmt(secs) + " s");
    return rep;
}

SuiteReport kernel_calibration_suite(const std::vector<double>& kappas, std::uint64_t seed, int semigroup_probes) {
    SuiteReport rep;
    rep.suite = "kernel-calibration";
    rep.csv.header = {"kappa", "probe", "s", "t", "x", "y", "value", "reference", "rel_error"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (double kappa : kappas) {
        const KernelFactor& K = *kernel_factor(kappa);
        std::string tag = "kappa=" + fmt(kappa);

        // mass at random (t, x), independent of the calibration probes
        double mass_err = 0.0;
        for (int i = 0; i < 20; ++i) {
            double t = std::pow(10.0, -2.0 + 4.0 * U(rng));
            double x = (-4.0 + 8.0 * U(rng)) * std::sqrt(t);
            double m = K.mass(t, x);
            mass_err = std::max(mass_err, std::abs(m - 1.0));
            rep.csv.add_row({fmt(kappa), "mass", "", fmt(t), fmt(x), "", fmt(m), "1", fmt(std::abs(m - 1.0))});
        }
        rep.check("unit-mass:" + tag, mass_err <= 1e-6, mass_err, 1e-6,
                  "calibration probes: " + fmt(K.validation_error()));

        double sym_err = 0.0;
        for (int i = 0; i < 50; ++i) {
            double t = std::pow(10.0, -2.0 + 4.0 * U(rng));
            double x = (-5.0 + 10.0 * U(rng)) * std::sqrt(t), y = (-5.0 + 10.0 * U(rng)) * std::sqrt(t);
            double a = K.value(t, x, y);
            sym_err = std::max({sym_err, std::abs(a - K.value(t, y, x)) / a, std::abs(a - K.value(t, -x, -y)) / a});
            if (!(a > 0.0)) sym_err = INFINITY;
        }
        rep.check("symmetry:" + tag, sym_err <= 1e-12, sym_err, 1e-12);

        double semi_err = 0.0;
        AdaptiveOptions opt{1e-300, 1e-13, 5000};
        for (int i = 0; i < semigroup_probes; ++i) {
            double s = 0.1 + 0.9 * U(rng), t = 0.1 + 0.9 * U(rng);
            double x = -2.0 + 4.0 * U(rng), y = -2.0 + 4.0 * U(rng);
            double L = std::max(std::abs(x), std::abs(y)) + 14.0 * std::sqrt(std::max(s, t));
            auto f = [&](double z) { return K.value(s, x, z) * K.value(t, z, y) * weight1(kappa, z); };
            double lhs = integrate_adaptive(f, -L, L, {0.0, x, -x, y, -y}, opt).value;
            double rhs = K.value(s + t, x, y);
            double e = std::abs(lhs - rhs) / rhs;
            semi_err = std::max(semi_err, e);
            rep.csv.add_row({fmt(kappa), "semigroup", fmt(s), fmt(t), fmt(x), fmt(y), fmt(lhs), fmt(rhs), fmt(e)});
        }
        rep.check("semigroup:" + tag, semi_err <= 1e-7, semi_err, 1e-7);

        if (kappa == 0.0) {
            double g_err = 0.0;
            for (int i = 0; i < 50; ++i) {
                double t = std::pow(10.0, -2.0 + 4.0 * U(rng));
                double x = (-5.0 + 10.0 * U(rng)) * std::sqrt(t), y = (-5.0 + 10.0 * U(rng)) * std::sqrt(t);
                double g = std::exp(-(x - y) * (x - y) / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
                g_err = std::max(g_err, std::abs(K.value(t, x, y) - g) / g);
            }
            rep.check("gaussian-limit", g_err <= 1e-12, g_err, 1e-12);
        }
    }
    return rep;
}

SuiteReport polynomial_flow_suite(const RootSystem& R, std::uint64_t seed, int polynomials) {
    SuiteReport rep;
    rep.suite = "polynomial-flow";
    rep.csv.header = {"preset", "poly", "t", "x", "semigroup_apply", "heat_poly", "rel_error"};
    KernelSpec spec(R);
    DunklCalculus<Rational> C(R);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int d = R.dim();
    double worst = 0.0;
    std::string where;
    for (int k = 0; k < polynomials; ++k) {
        RationalPoly p = random_poly(d, 4, rng);
        FloatPoly pf = p.to_float();
        int tq = 1 + static_cast<int>(U(rng) * 8.0);
        Rational t(tq, 8);
        t.canonicalize();
        Vec x(static_cast<std::size_t>(d));
        for (auto& v : x) v = -1.5 + 3.0 * U(rng);
        double ref = C.heat_poly(p, t).to_float().evaluate<double>(x);
        QuadratureGrid grid;
        grid.options = {1e-300, 1e-11, 4000};
        double got = semigroup_apply(spec, [&](std::span<const double> y) { return pf.evaluate<double>(y); },
                                     to_double(t), x, grid)
                         .value;
        // relative to H_t|p|(x) where the exact value nearly cancels
        double scale = std::abs(ref);
        double abs_flow = semigroup_apply(spec, [&](std::span<const double> y) { return std::abs(pf.evaluate<double>(y)); },
                                          to_double(t), x, grid)
                              .value;
        if (scale < 1e-3 * abs_flow) scale = abs_flow;
        double e = std::abs(got - ref) / scale;
        std::ostringstream xs;
        for (std::size_t j = 0; j < x.size(); ++j) xs << (j ? ";" : "") << fmt(x[j]);
        rep.csv.add_row({R.name(), format_poly(p), t.get_str(), xs.str(), fmt(got), fmt(ref), fmt(e)});
        if (e > worst) {
            worst = e;
            where = format_poly(p) + " at t=" + t.get_str() + ", x=(" + xs.str() + ")";
        }
    }
    rep.check("heat-poly:" + R.name(), worst <= 1e-6, worst, 1e-6, where);
    return rep;
}

}  // namespace dunkl
