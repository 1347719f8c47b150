#include "dunkl/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include "dunkl/error.hpp"

namespace dunkl {

namespace {

// Kronrod 15-point nodes (positive half) and weights, Gauss 7-point weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
};

Piece gk15(const Fn1& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    auto eval = [&](double x) {
        double v = f(x);
        if (!std::isfinite(v)) throw EvaluationError("non-finite integrand value", {x});
        return v;
    };
    double fc = eval(c);
    double rk = fc * kWgk[7];
    double rg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * kXgk[j];
        double f1 = eval(c - dx), f2 = eval(c + dx);
        rk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
    }
    double err = std::abs((rk - rg) * h);
    return {a, b, rk * h, err};
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return cache.emplace(n, std::move(r)).first->second;
}

Estimate integrate_adaptive(const Fn1& f, double a, double b, const std::vector<double>& breakpoints,
                            const AdaptiveOptions& opt) {
    if (!(b > a)) return {0.0, 0.0};
    std::vector<double> cuts{a};
    std::vector<double> bp = breakpoints;
    std::sort(bp.begin(), bp.end());
    for (double p : bp)
        if (p > a && p < b && p > cuts.back()) cuts.push_back(p);
    cuts.push_back(b);

    auto worse = [](const Piece& x, const Piece& y) {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    };
    std::priority_queue<Piece, std::vector<Piece>, decltype(worse)> heap(worse);
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Piece p = gk15(f, cuts[i], cuts[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int count = static_cast<int>(heap.size());
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && count < opt.max_intervals) {
        Piece p = heap.top();
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) break;
        heap.pop();
        Piece l = gk15(f, p.a, mid), r = gk15(f, mid, p.b);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    std::vector<Piece> pieces;
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    CompensatedSum v, e;
    for (const auto& p : pieces) {
        v.add(p.value);
        e.add(p.error);
    }
    return {v.value(), e.value()};
}

double integrate_composite(const Fn1& f, const std::vector<double>& breaks, int panels, int order) {
    const GaussRule& g = gauss_legendre(order);
    CompensatedSum s;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = breaks[i], b = breaks[i + 1];
        if (!(b > a)) continue;
        double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            double c = a + (p + 0.5) * h;
            for (std::size_t k = 0; k < g.nodes.size(); ++k) s.add(0.5 * h * g.weights[k] * f(c + 0.5 * h * g.nodes[k]));
        }
    }
    return s.value();
}

}  // namespace dunkl
