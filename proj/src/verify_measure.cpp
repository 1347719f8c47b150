#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dunkl/error.hpp"
#include "dunkl/verifier.hpp"
#include "verify_fit.hpp"

namespace dunkl {

namespace {

std::string point_str(std::span<const double> x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t j = 0; j < x.size(); ++j) os << (j ? "," : "") << fmt(x[j]);
    os << ")";
    return os.str();
}

double volume(const WeightedDensity& W, std::span<const double> x, double r) {
    return W.dim() == 1 ? W.axis_measure(0, x[0] - r, x[0] + r) : ball_volume(x, r, W).value;
}

}  // namespace

DoublingSweep DoublingSweep::standard(int dim, std::uint64_t seed) {
    DoublingSweep s;
    if (dim == 1) {
        for (double v : {0.0, 1e-3, 0.1, 1.0, -2.5, 7.0}) s.centers.push_back({v});
        return s;
    }
    s.centers.push_back(Vec(static_cast<std::size_t>(dim), 0.0));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int i = 0; i < 5; ++i) {
        Vec p(static_cast<std::size_t>(dim));
        for (auto& v : p) v = U(rng);
        if (i % 2 == 0) p[static_cast<std::size_t>(i / 2) % p.size()] = 0.0;
        s.centers.push_back(p);
    }
    return s;
}

DoublingSweep DoublingSweep::densified() const {
    DoublingSweep o = *this;
    o.radii.clear();
    o.factors.clear();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        o.radii.push_back(radii[i]);
        if (i + 1 < radii.size()) o.radii.push_back(std::sqrt(radii[i] * radii[i + 1]));
    }
    for (std::size_t i = 0; i < factors.size(); ++i) {
        o.factors.push_back(factors[i]);
        if (i + 1 < factors.size()) o.factors.push_back(std::sqrt(factors[i] * factors[i + 1]));
    }
    return o;
}

SuiteReport doubling_suite(const RootSystem& R, const DoublingSweep& sweep) {
    SuiteReport rep;
    rep.suite = "doubling";
    rep.csv.header = {"center", "r", "R", "ratio", "secant_slope", "local_slope"};
    DunklSystem S(R);
    const WeightedDensity& W = S.density;
    const double d = R.dim(), dk = W.homogeneous_dim();

    double lo_slope = INFINITY, hi_slope = -INFINITY;
    std::string lo_at, hi_at;
    auto eval = [&](bool upper, bool dense) {
        const DoublingSweep& D = dense ? sweep.densified() : sweep;
        SweepMax mx;
        for (const auto& c : D.centers)
            for (double r : D.radii)
                for (double f : D.factors) {
                    DoublingResult p = doubling_probe(c, r, f * r, W);
                    std::string where = "x=" + point_str(c) + " r=" + fmt(r) + " R=" + fmt(f * r);
                    if (!dense && upper) {
                        rep.csv.add_row({point_str(c), fmt(r), fmt(f * r), fmt(p.ratio), fmt(p.secant_slope),
                                         fmt(p.local_slope)});
                        for (double s : {p.secant_slope, p.local_slope}) {
                            if (s < lo_slope) lo_slope = s, lo_at = where;
                            if (s > hi_slope) hi_slope = s, hi_at = where;
                        }
                    }
                    // theta = sup ratio (r/R)^{d_kappa}; theta' = sup (R/r)^d / ratio
                    double v = upper ? std::log(p.ratio) - dk * std::log(f) : d * std::log(f) - std::log(p.ratio);
                    mx.add(v, [&] { return where; });
                }
        return mx;
    };
    rep.fits.push_back(fit_with_halving("2.1-upper-theta", dk, 0, 0.25, [&](double, bool dn) { return eval(true, dn); }));
    rep.fits.push_back(fit_with_halving("2.1-lower-theta", d, 0, 0.25, [&](double, bool dn) { return eval(false, dn); }));
    rep.check("volume-slope-min", lo_slope >= d - 0.02, lo_slope, d - 0.02, lo_at);
    rep.check("volume-slope-max", hi_slope <= dk + 0.02, hi_slope, dk + 0.02, hi_at);

    // mu(B(gx, r)) = mu(B(x, r))
    double inv = 0.0;
    std::string inv_at;
    for (const auto& c : sweep.centers)
        for (double r : sweep.radii) {
            double base = volume(W, c, r);
            for (std::size_t g = 0; g < S.group.order(); ++g) {
                Vec gc = S.group.apply(g, c);
                double e = std::abs(volume(W, gc, r) / base - 1.0);
                if (e > inv) inv = e, inv_at = "x=" + point_str(c) + " r=" + fmt(r);
            }
        }
    rep.check("volume-G-invariance", inv <= 1e-6, inv, 1e-6, inv_at);

    // homogeneity at the origin: mu(B(0,R)) / mu(B(0,r)) = (R/r)^{d_kappa}
    Vec origin(static_cast<std::size_t>(R.dim()), 0.0);
    double hom = 0.0;
    std::string hom_at;
    for (double r : sweep.radii)
        for (double f : sweep.factors) {
            double ratio = doubling_probe(origin, r, f * r, W).ratio;
            double e = std::abs(ratio / std::pow(f, dk) - 1.0);
            if (e > hom) hom = e, hom_at = "r=" + fmt(r) + " R=" + fmt(f * r) + " ratio=" + fmt(ratio);
        }
    rep.check("origin-ratio-closed-form", hom <= 1e-6, hom, 1e-6, hom_at);
    return rep;
}

namespace {

void add_cz_row(SuiteReport& rep, const std::string& what, const CZResult& r, const CZPropertyReport& p) {
    rep.csv.add_row({what, r.mode == BadPartMode::plain ? "plain" : "mean_zero", fmt(r.lambda),
                     std::to_string(r.bad.size()), fmt(p.c_a), fmt(p.c_b), fmt(p.c_c), std::to_string(p.overlap),
                     fmt(p.reconstruction_residual), fmt(r.max_tree_ratio), p.all() ? "true" : "false"});
}

}  // namespace

SuiteReport cz_suite(const RootSystem& R, std::uint64_t seed, const CZSuiteOptions& opt) {
    SuiteReport rep;
    rep.suite = "cz";
    rep.csv.header = {"case", "mode", "lambda", "cubes", "c_a", "c_b", "c_c", "overlap", "reconstruction_residual",
                      "max_tree_ratio", "all"};
    WeightedDensity W(R);
    const int d = R.dim();
    if (d > 2) throw UnsupportedVariant("the CZ suite runs in one or two dimensions");
    const double dk = W.homogeneous_dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int depth = d == 1 ? opt.depth_1d : opt.depth_2d;
    const double side = d == 1 ? 8.0 : 4.0;
    const Vec lo(static_cast<std::size_t>(d), -side / 2);

    long failures = 0, structure_fail = 0;
    std::string witness, structure_witness;
    double max_c[3] = {0, 0, 0};
    for (int k = 0; k < opt.random_functions; ++k) {
        StepFunction f = StepFunction::random(d, lo, side, depth, rng);
        double avg = f.l1(W) / box_mu(lo, Vec(lo.size(), side / 2), W);
        double top = 0.0;
        for (double v : f.values()) top = std::max(top, std::abs(v));
        // between the root average and the largest value, log-uniformly
        double lam = avg * std::pow(std::max(top / avg, 1.5), 0.1 + 0.9 * U(rng));
        for (BadPartMode mode : {BadPartMode::plain, BadPartMode::mean_zero}) {
            CZResult r = cz_decompose(f, lam, W, {mode, false});
            CZPropertyReport p = verify_cz_properties(r, W);
            add_cz_row(rep, "random-" + std::to_string(k), r, p);
            max_c[0] = std::max(max_c[0], p.c_a);
            max_c[1] = std::max(max_c[1], p.c_b);
            max_c[2] = std::max(max_c[2], p.c_c);
            if (!p.all() && failures++ == 0)
                witness = "random function " + std::to_string(k) + " at lambda " + fmt(lam);
            if (p.c_a > std::pow(2.0, dk) * r.max_tree_ratio && structure_fail++ == 0)
                structure_witness = "random function " + std::to_string(k) + ": c_a " + fmt(p.c_a);
        }
    }
    rep.check("cz-properties:" + R.name(), failures == 0, static_cast<double>(failures), 0.0,
              failures ? witness : std::to_string(2 * opt.random_functions) + " decompositions");
    rep.check("cz-a-structure:" + R.name(), structure_fail == 0, static_cast<double>(structure_fail), 0.0,
              structure_witness);
    rep.notes.push_back(R.name() + ": largest constants c_a = " + fmt(max_c[0]) + ", c_b = " + fmt(max_c[1]) +
                        ", c_c = " + fmt(max_c[2]));

    if (d == 1) {
        // opposite spikes straddling the dyadic boundary at 0
        std::vector<double> v(std::size_t{1} << depth, 0.0);
        v[v.size() / 2 - 1] = 50.0;
        v[v.size() / 2] = -50.0;
        StepFunction f(lo, side, depth, v);
        double avg = f.l1(W) / box_mu(lo, Vec{side / 2}, W);
        bool ok = true;
        for (BadPartMode mode : {BadPartMode::plain, BadPartMode::mean_zero}) {
            CZResult r = cz_decompose(f, 2.0 * avg, W, {mode, false});
            CZPropertyReport p = verify_cz_properties(r, W);
            add_cz_row(rep, "adversarial-spikes", r, p);
            ok = ok && p.all();
        }
        rep.check("cz-adversarial:" + R.name(), ok, ok ? 0.0 : 1.0, 0.0);
    }

    // hand-computed example: kappa = 0, f = 1 on [0, 1), root [-2, 2), lambda = 1/4
    {
        WeightedDensity W0(parse_preset("z2", std::string("0")));
        std::vector<double> v(8, 0.0);
        v[4] = v[5] = 1.0;
        StepFunction f(Vec{-2.0}, 4.0, 3, v);
        CZResult r = cz_decompose(f, 0.25, W0, {BadPartMode::plain, false});
        CZPropertyReport p = verify_cz_properties(r, W0);
        bool ok = r.bad.size() == 1 && p.all();
        if (ok) {
            const BadPart& b = r.bad[0];
            ok = b.cube.generation == 1 && b.cube.lo[0] == 0.0 && b.cube.side == 2.0 && b.abs_average == 0.5 &&
                 r.sum_mu == 2.0 && p.c_c == 0.5 && p.reconstruction_residual == 0.0;
        }
        add_cz_row(rep, "worked-example", r, p);
        rep.check("cz-worked-example", ok, ok ? 0.0 : 1.0, 0.0,
                  "f = 1 on [0,1), lambda = 1/4: one cube [0,2) with average 1/2");
    }
    return rep;
}

SuiteReport claim34_suite(const KernelSpec& spec, const Claim34SuiteOptions& opt) {
    SuiteReport rep;
    rep.suite = "claim34";
    rep.csv.header = {"t", "lhs", "rhs", "ratio", "argmax_y"};
    if (opt.t.empty()) throw InvalidArgument("claim34 suite needs t values");
    Vec c(static_cast<std::size_t>(spec.dim()), 0.0);
    c[0] = opt.center;
    TestFunction v = TestFunction::spike(c, opt.width, spec.density());
    std::vector<double> ratios;
    bool finite = true;
    for (double t : opt.t) {
        Claim34Result r = claim34_ratio(v, t, c, spec);
        ratios.push_back(r.ratio);
        finite = finite && std::isfinite(r.ratio) && r.ratio > 0.0;
        rep.csv.add_row({fmt(t), fmt(r.lhs), fmt(r.rhs), fmt(r.ratio), point_str(r.argmax_y)});
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    double med = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                   : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    double dev = 0.0;
    std::string where;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        double e = std::abs(ratios[i] / med - 1.0);
        if (!(e <= dev)) dev = std::isfinite(e) ? e : INFINITY, where = "t=" + fmt(opt.t[i]) + " ratio " + fmt(ratios[i]);
    }
    rep.check("claim34-finite", finite, finite ? 0.0 : 1.0, 0.0);
    rep.check("claim34-spread", dev <= opt.tolerance, dev, opt.tolerance, where + " vs median " + fmt(med));
    return rep;
}

}  // namespace dunkl
