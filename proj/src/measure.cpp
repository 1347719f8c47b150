#include "dunkl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dunkl/error.hpp"

namespace dunkl {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Crossings of reflection hyperplanes with the line through x varying in coordinate k,
// for hyperplanes that involve no coordinate beyond k.
std::vector<double> hyperplane_breaks(const RootSystem& R, int k, std::span<const double> x) {
    std::vector<double> out;
    for (const auto& r : R.positive_roots()) {
        if (r.kappa == 0.0) continue;
        const Vec& a = r.vec;
        if (std::abs(a[static_cast<std::size_t>(k)]) < 1e-14) continue;
        bool inner = false;
        for (std::size_t j = static_cast<std::size_t>(k) + 1; j < a.size(); ++j)
            if (std::abs(a[j]) > 1e-14) inner = true;
        if (inner) continue;
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += a[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        out.push_back(-s / a[static_cast<std::size_t>(k)]);
    }
    return out;
}

double axis_weight(double kappa, double u) {
    if (kappa == 0.0) return 1.0;
    return std::pow(std::sqrt(2.0) * std::abs(u), 2.0 * kappa);
}

struct Nested {
    const FnD* f;
    const WeightedDensity& W;
    const AdaptiveOptions& opt;
    int d;
    bool ball;
    Vec c;
    double r;
    Vec lo, hi;
    bool closed_inner;
    const AxisBreaks* extra = nullptr;
    double outer_error = 0.0;

    double level(int k, Vec& x) {
        double a, b;
        if (ball) {
            double s = r * r;
            for (int j = 0; j < k; ++j) s -= (x[static_cast<std::size_t>(j)] - c[static_cast<std::size_t>(j)]) * (x[static_cast<std::size_t>(j)] - c[static_cast<std::size_t>(j)]);
            double rho = std::sqrt(std::max(s, 0.0));
            a = c[static_cast<std::size_t>(k)] - rho;
            b = c[static_cast<std::size_t>(k)] + rho;
        } else {
            a = lo[static_cast<std::size_t>(k)];
            b = hi[static_cast<std::size_t>(k)];
        }
        if (!(b > a)) return 0.0;
        bool innermost = (k == d - 1);
        if (innermost && closed_inner) {
            const auto& ks = *W.axis_kappas();
            double pre = 1.0;
            for (int j = 0; j < k; ++j) pre *= axis_weight(ks[static_cast<std::size_t>(j)], x[static_cast<std::size_t>(j)]);
            return pre * W.axis_measure(k, a, b);
        }
        std::vector<double> br = hyperplane_breaks(W.roots(), k, x);
        if (extra && static_cast<int>(extra->size()) > k)
            br.insert(br.end(), (*extra)[static_cast<std::size_t>(k)].begin(), (*extra)[static_cast<std::size_t>(k)].end());
        auto value_at = [&](double t) {
            x[static_cast<std::size_t>(k)] = t;
            if (innermost) {
                double w = W(x);
                if (w == 0.0) return 0.0;
                double fv = f ? (*f)(x) : 1.0;
                if (!std::isfinite(fv)) throw EvaluationError("non-finite integrand value", x);
                return fv * w;
            }
            return level(k + 1, x);
        };
        Estimate e;
        if (ball && !innermost) {
            // x_k = c_k + rho sin(u) removes the square-root endpoint behavior of inner slices
            double cc = 0.5 * (a + b), rho = 0.5 * (b - a);
            std::vector<double> ub;
            for (double p : br)
                if (p > a && p < b) ub.push_back(std::asin((p - cc) / rho));
            ub.push_back(0.0);
            e = integrate_adaptive([&](double u) { return rho * std::cos(u) * value_at(cc + rho * std::sin(u)); }, -kHalfPi,
                                   kHalfPi, ub, opt);
        } else {
            e = integrate_adaptive(value_at, a, b, br, opt);
        }
        if (k == 0) outer_error = e.error;
        return e.value;
    }
};

Estimate monte_carlo(const FnD* f, std::span<const double> lo, std::span<const double> hi, const WeightedDensity& W,
                     const QuadratureGrid& grid, const Vec* ball_c, double ball_r) {
    int d = static_cast<int>(lo.size());
    std::mt19937_64 rng(grid.seed);
    std::vector<std::uniform_real_distribution<double>> u;
    double vol = 1.0;
    for (int j = 0; j < d; ++j) {
        u.emplace_back(lo[static_cast<std::size_t>(j)], hi[static_cast<std::size_t>(j)]);
        vol *= hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];
    }
    CompensatedSum s1, s2;
    Vec x(static_cast<std::size_t>(d));
    for (std::size_t n = 0; n < grid.mc_samples; ++n) {
        for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(j)](rng);
        double v = 0.0;
        if (!ball_c || distance(x, *ball_c) < ball_r) {
            double fv = f ? (*f)(x) : 1.0;
            if (!std::isfinite(fv)) throw EvaluationError("non-finite integrand value", x);
            v = fv * W(x);
        }
        s1.add(v);
        s2.add(v * v);
    }
    double N = static_cast<double>(grid.mc_samples);
    double mean = s1.value() / N;
    double var = std::max(0.0, s2.value() / N - mean * mean);
    return {vol * mean, 3.0 * vol * std::sqrt(var / N)};
}

}  // namespace

QuadratureGrid QuadratureGrid::refined(double factor) const {
    QuadratureGrid g = *this;
    g.options.abs_tol *= factor;
    g.options.rel_tol *= factor;
    g.options.max_intervals *= 4;
    g.mc_samples *= 4;
    return g;
}

Estimate integrate_box(const FnD& f, std::span<const double> lo, std::span<const double> hi, const WeightedDensity& W,
                       const QuadratureGrid& grid, const AxisBreaks& breaks) {
    int d = W.dim();
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d) throw InvalidArgument("box dimension mismatch");
    if (grid.scheme == Scheme::monte_carlo || d > 3) return monte_carlo(&f, lo, hi, W, grid, nullptr, 0.0);
    Nested n{&f, W, grid.options, d, false, {}, 0.0, Vec(lo.begin(), lo.end()), Vec(hi.begin(), hi.end()), false, &breaks};
    Vec x(static_cast<std::size_t>(d));
    double v = n.level(0, x);
    return {v, n.outer_error + grid.options.rel_tol * std::abs(v) * (d - 1)};
}

Estimate integrate_ball(const FnD* f, std::span<const double> c, double r, const WeightedDensity& W,
                        const QuadratureGrid& grid, const AxisBreaks& breaks) {
    int d = W.dim();
    if (static_cast<int>(c.size()) != d) throw InvalidArgument("ball center dimension mismatch");
    if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
    bool closed = (f == nullptr) && W.axis_kappas().has_value();
    if (grid.scheme == Scheme::monte_carlo || d > 3) {
        Vec lo(c.begin(), c.end()), hi(c.begin(), c.end());
        for (auto& v : lo) v -= r;
        for (auto& v : hi) v += r;
        Vec cc(c.begin(), c.end());
        return monte_carlo(f, lo, hi, W, grid, &cc, r);
    }
    Nested n{f, W, grid.options, d, true, Vec(c.begin(), c.end()), r, {}, {}, closed, &breaks};
    Vec x(static_cast<std::size_t>(d));
    double v = n.level(0, x);
    double err = (closed && d == 1) ? 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v)
                                    : n.outer_error + grid.options.rel_tol * std::abs(v) * (d - 1);
    return {v, err};
}

Estimate integrate_gaussian(const FnD& f, std::span<const double> c, double sigma, const WeightedDensity& W,
                            const QuadratureGrid& grid, double peak) {
    int d = W.dim();
    double L = sigma * std::sqrt(2.0 * std::log(1e16));
    Vec lo(c.begin(), c.end()), hi(c.begin(), c.end());
    for (int j = 0; j < d; ++j) {
        lo[static_cast<std::size_t>(j)] -= L;
        hi[static_cast<std::size_t>(j)] += L;
    }
    Estimate e = integrate_box(f, lo, hi, W, grid);
    e.error += std::abs(peak) * 1e-16 * std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * d) * d;
    return e;
}

BallVolumeResult ball_volume(std::span<const double> x, double r, const WeightedDensity& W, const QuadratureGrid& grid) {
    Estimate e = integrate_ball(nullptr, x, r, W, grid);
    return {Vec(x.begin(), x.end()), r, e.value, e.error};
}

DoublingResult doubling_probe(std::span<const double> x, double r, double R, const WeightedDensity& W,
                              const QuadratureGrid& grid) {
    if (!(r > 0.0) || R < r) throw InvalidArgument("doubling probe needs 0 < r <= R");
    auto small = ball_volume(x, r, W, grid);
    auto big = ball_volume(x, R, W, grid);
    DoublingResult out;
    out.ratio = big.value / small.value;
    out.ratio_error = out.ratio * (big.error / big.value + small.error / small.value);
    out.secant_slope = R > r ? std::log(out.ratio) / std::log(R / r) : 0.0;
    const double h = 1e-4;
    double vp = ball_volume(x, R * (1 + h), W, grid).value;
    double vm = ball_volume(x, R * (1 - h), W, grid).value;
    out.local_slope = std::log(vp / vm) / std::log((1 + h) / (1 - h));
    if (R == r) out.secant_slope = out.local_slope;
    return out;
}

double dunkl_derivative_at(const SmoothFunction& f, std::span<const double> xi, const RootSystem& R,
                           std::span<const double> x) {
    Vec g = f.gradient(x);
    double v = dot(g, xi);
    double fx = f.value(x);
    for (const auto& r : R.positive_roots()) {
        if (r.kappa == 0.0) continue;
        double axi = dot(r.vec, xi);
        if (axi == 0.0) continue;
        double ax = dot(r.vec, x);
        if (ax == 0.0) throw DomainError("Dunkl derivative evaluated on a reflection hyperplane");
        Vec rx = reflect(r.vec, x);
        v += r.kappa * axi * (fx - f.value(rx)) / ax;
    }
    return v;
}

IbpResult integration_by_parts_residual(const SmoothFunction& u, const SmoothFunction& v, std::span<const double> xi,
                                        const WeightedDensity& W, std::span<const double> lo,
                                        std::span<const double> hi, const QuadratureGrid& grid) {
    const RootSystem& R = W.roots();
    auto a = [&](std::span<const double> x) { return v.value(x) * dunkl_derivative_at(u, xi, R, x); };
    auto b = [&](std::span<const double> x) { return u.value(x) * dunkl_derivative_at(v, xi, R, x); };
    Estimate ea = integrate_box(a, lo, hi, W, grid);
    Estimate eb = integrate_box(b, lo, hi, W, grid);
    Estimate sa = integrate_box([&](std::span<const double> x) { return std::abs(a(x)); }, lo, hi, W, grid);
    Estimate sb = integrate_box([&](std::span<const double> x) { return std::abs(b(x)); }, lo, hi, W, grid);
    IbpResult out;
    out.lhs = ea.value;
    out.rhs = eb.value;
    out.residual = std::abs(ea.value + eb.value);
    out.scale = sa.value + sb.value;
    out.error = ea.error + eb.error;
    return out;
}

}  // namespace dunkl
