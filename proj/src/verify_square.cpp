#include <algorithm>
#include <cmath>

#include "dunkl/error.hpp"
#include "dunkl/quadrature.hpp"
#include "dunkl/verifier.hpp"

namespace dunkl {

namespace {

std::vector<double> weak11_grid(double c, double w, const Weak11Options& opt) {
    std::vector<double> xs{c, -c};
    double lo = std::log10(opt.x_near * w), hi = std::log10(opt.x_far * std::max(w, 1.0));
    int n = static_cast<int>(std::ceil((hi - lo) * opt.x_per_decade));
    for (int k = 0; k <= n; ++k) {
        double dist = std::pow(10.0, lo + (hi - lo) * k / n);
        for (double base : {c, -c})
            for (int sgn : {-1, 1}) xs.push_back(base + sgn * dist);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), xs.end());
    return xs;
}

}  // namespace

SuiteReport weak11_profile(const KernelSpec& spec, const Weak11Options& opt) {
    SuiteReport rep;
    rep.suite = "weak11";
    rep.csv.header = {"mode", "width", "lambda", "level_set_measure", "resolved", "q"};
    if (spec.dim() != 1) throw UnsupportedVariant("weak11_profile runs in one dimension");
    if (opt.widths.empty() || opt.modes.empty()) throw InvalidArgument("weak11 needs widths and modes");
    const WeightedDensity& W = spec.density();
    const double c = opt.center;
    SpatialOptions sp;
    sp.limit_mode = true;

    std::vector<std::vector<double>> Q(opt.modes.size());
    for (double w : opt.widths) {
        TestFunction f = TestFunction::spike(Vec{c}, w, W);  // unit mu mass
        std::vector<double> xs = weak11_grid(c, w, opt);
        std::vector<SquareFunctionValues> vals(xs.size());
        parallel_for(xs.size(), opt.threads, [&](std::size_t i) {
            vals[i] = square_functions(f, std::span<const double>(&xs[i], 1), spec, {}, sp);
        });
        for (std::size_t mi = 0; mi < opt.modes.size(); ++mi) {
            SquareMode mode = opt.modes[mi];
            SampledField field;
            field.axes = {xs};
            for (const auto& v : vals) field.values.push_back(v.value[static_cast<int>(mode)]);
            for (double v : field.values)
                if (!std::isfinite(v)) throw NumericalInstability("non-finite square function sample");
            std::vector<double> sorted = field.values;
            std::sort(sorted.begin(), sorted.end());
            double med = sorted[sorted.size() / 2];
            int steps = static_cast<int>(std::lround(opt.lambda_decades * opt.lambda_per_decade));
            double q = 0.0;
            int resolved = 0;
            for (int k = 0; k <= steps; ++k) {
                double lam = med * std::pow(10.0, -0.5 * opt.lambda_decades +
                                                      static_cast<double>(k) / opt.lambda_per_decade);
                LevelSetMeasure m = superlevel_measure(field, lam, W);
                // a level set reaching the grid edge is cut off
                bool inside = field.values.front() <= lam && field.values.back() <= lam;
                bool ok = m.resolved && inside && m.value > 0.0;
                double qq = lam * m.value;  // ||f_w||_1 = 1
                rep.csv.add_row({mode_name(mode), fmt(w), fmt(lam), fmt(m.value), ok ? "true" : "false", fmt(qq)});
                if (!ok) continue;
                ++resolved;
                q = std::max(q, qq);
            }
            std::string tag = std::string(mode_name(mode)) + ":w=" + fmt(w);
            rep.check("weak11-resolved:" + tag, resolved >= opt.min_resolved, resolved, opt.min_resolved,
                      std::to_string(resolved) + " of " + std::to_string(steps + 1) + " levels resolved; " +
                          std::to_string(xs.size()) + " grid points");
            rep.notes.push_back("Q(" + tag + ") = " + fmt(q));
            Q[mi].push_back(q);
        }
    }
    for (std::size_t mi = 0; mi < opt.modes.size(); ++mi) {
        auto [lo, hi] = std::minmax_element(Q[mi].begin(), Q[mi].end());
        double ratio = *lo > 0.0 ? *hi / *lo : INFINITY;
        rep.check(std::string("weak11-profile:") + mode_name(opt.modes[mi]), ratio <= opt.stability, ratio,
                  opt.stability, "Q from " + fmt(*lo) + " to " + fmt(*hi));
    }
    return rep;
}

SuiteReport l2_energy_identities(const KernelSpec& spec, const std::vector<TestFunction>& family,
                                 const EnergyOptions& opt) {
    SuiteReport rep;
    rep.suite = "l2";
    rep.csv.header = {"function", "norm_sq", "gamma_sq", "gamma_ratio", "horizontal_sq", "horizontal_ratio"};
    if (spec.dim() != 1) throw UnsupportedVariant("l2_energy_identities runs in one dimension");
    const WeightedDensity& W = spec.density();
    const GaussRule& G = gauss_legendre(opt.order);
    TimeQuadrature tq;
    tq.nodes_per_decade = opt.time_nodes_per_decade;
    SpatialOptions sp;
    sp.limit_mode = true;
    int idx = 0;
    for (const TestFunction& f : family) {
        double lo = f.support_lo()[0], hi = f.support_hi()[0];
        double c = 0.5 * (lo + hi), s = 0.5 * (hi - lo);
        // x = c +- s u / (1 - u): [0, 1/2] is the support, split into `panels`; geometric panels beyond
        std::vector<std::pair<int, double>> nodes;  // (side, u)
        std::vector<double> weights;
        for (int side : {-1, 1}) {
            std::vector<double> cuts;
            for (int p = 0; p <= opt.panels; ++p) cuts.push_back(0.5 * p / opt.panels);
            for (int p = 1; p <= 10; ++p) cuts.push_back(1.0 - std::pow(0.5, p + 1));
            double z = side * (0.0 - c);
            if (z > 0.0) cuts.push_back(z / (s + z));
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                double a = cuts[i], b = cuts[i + 1];
                if (!(b > a)) continue;
                for (std::size_t q = 0; q < G.nodes.size(); ++q) {
                    double u = 0.5 * (a + b) + 0.5 * (b - a) * G.nodes[q];
                    nodes.push_back({side, u});
                    weights.push_back(0.5 * (b - a) * G.weights[q] * s / ((1.0 - u) * (1.0 - u)));
                }
            }
        }
        std::vector<SquareFunctionValues> vals(nodes.size());
        std::vector<double> xs(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            xs[i] = c + nodes[i].first * s * nodes[i].second / (1.0 - nodes[i].second);
        parallel_for(nodes.size(), opt.threads, [&](std::size_t i) {
            vals[i] = square_functions(f, std::span<const double>(&xs[i], 1), spec, tq, sp);
        });
        CompensatedSum gam, hor;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            double w = weights[i] * W(std::span<const double>(&xs[i], 1));
            double g = vals[i].value[static_cast<int>(SquareMode::gamma)];
            double h = vals[i].value[static_cast<int>(SquareMode::horizontal)];
            gam.add(w * g * g);
            hor.add(w * h * h);
        }
        double norm = integrate_box([&](std::span<const double> y) { double v = f(y); return v * v; },
                                    f.support_lo(), f.support_hi(), W, {}, f.breaks())
                          .value;
        double rg = gam.value() / norm, rh = hor.value() / norm;
        std::string tag = "f" + std::to_string(idx++);
        rep.csv.add_row({tag, fmt(norm), fmt(gam.value()), fmt(rg), fmt(hor.value()), fmt(rh)});
        rep.check("l2-gamma:" + tag, std::abs(rg - 0.5) <= opt.tolerance, rg, 0.5,
                  "||V_Gamma f||^2 / ||f||^2, tolerance " + fmt(opt.tolerance));
        rep.check("l2-horizontal:" + tag, std::abs(rh - 0.25) <= opt.tolerance, rh, 0.25,
                  "||H f||^2 / ||f||^2, tolerance " + fmt(opt.tolerance));
    }
    return rep;
}

}  // namespace dunkl
