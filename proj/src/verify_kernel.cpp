#include <cmath>
#include <limits>
#include <map>
#include <numbers>
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

std::string probe_str(double t, std::span<const double> x, std::span<const double> y) {
    return "t=" + fmt(t) + " x=" + point_str(x) + " y=" + point_str(y);
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    std::vector<double> out;
    int n = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
    for (int k = 0; k <= n; ++k) out.push_back(lo * std::pow(10.0, static_cast<double>(k) / per_decade));
    return out;
}

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

double spread_of(const KernelSpec& spec, double t, std::span<const double> x, std::span<const double> y) {
    // squared distance to the nearest orbit point, over 4t
    return rho(spec.group(), x, y) * rho(spec.group(), x, y) / (4.0 * t);
}

// mu(B(x, r)) memoized on (x, r); the sweeps revisit the same balls many times.
class VolumeCache {
public:
    explicit VolumeCache(const WeightedDensity& W) : W_(W) {}
    double operator()(std::span<const double> x, double r) {
        std::vector<double> key(x.begin(), x.end());
        key.push_back(r);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        double v;
        if (W_.dim() == 1)
            v = W_.axis_measure(0, x[0] - r, x[0] + r);
        else
            v = ball_volume(x, r, W_).value;
        cache_.emplace(std::move(key), v);
        return v;
    }

private:
    const WeightedDensity& W_;
    std::map<std::vector<double>, double> cache_;
};

}  // namespace

double two_point_volume(const WeightedDensity& W, std::span<const double> x, std::span<const double> y, double r) {
    auto vol = [&](std::span<const double> c) {
        return W.dim() == 1 ? W.axis_measure(0, c[0] - r, c[0] + r) : ball_volume(c, r, W).value;
    };
    return std::max(vol(x), vol(y));
}

KernelSweep KernelSweep::standard(int dim, std::uint64_t seed) {
    KernelSweep s;
    s.t = log_grid(1e-2, 1e2, 2);
    if (dim == 1) {
        for (double v : {0.0, 0.05, -0.3, 1.0, -1.0, 2.5, -4.0, 6.0, 0.5, -0.02, 10.0, -15.0}) s.points.push_back({v});
        return s;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    for (int i = 0; i < 36; ++i) {
        Vec p(static_cast<std::size_t>(dim));
        for (auto& v : p) v = U(rng);
        // a third on a coordinate hyperplane, a third close to one
        if (i % 3 == 0) p[static_cast<std::size_t>(i / 3) % p.size()] = 0.0;
        if (i % 3 == 1) p[static_cast<std::size_t>(i / 3) % p.size()] = 1e-3;
        s.points.push_back(p);
    }
    return s;
}

KernelSweep KernelSweep::densified() const {
    KernelSweep s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        s.t.push_back(t[i]);
        if (i + 1 < t.size()) s.t.push_back(std::sqrt(t[i] * t[i + 1]));
    }
    s.points = points;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        Vec m(points[i].size());
        for (std::size_t j = 0; j < m.size(); ++j) m[j] = 0.5 * (points[i][j] + points[i + 1][j]);
        s.points.push_back(m);
    }
    return s;
}

SuiteReport heat_equation_suite(const KernelSpec& spec, const KernelSweep& sweep, int max_order, double tolerance) {
    SuiteReport rep;
    rep.suite = "heat-equation";
    rep.csv.header = {"t", "x", "y", "m", "fd_in_t", "laplacian_in_x", "analytic_in_t", "rel_deviation", "route"};
    DerivativeOptions opt{true, INFINITY};
    double worst = 0.0;
    std::string where;
    long compared = 0, underflow = 0, near_plane = 0;
    for (double t : sweep.t)
        for (const auto& x : sweep.points)
            for (const auto& y : sweep.points) {
                KernelDerivatives D = eval_kernel_derivatives(spec, t, x, y, max_order, opt);
                // subnormal values carry no relative precision
                if (!(std::abs(D.value) >= std::numeric_limits<double>::min()) || !std::isfinite(D.value)) {
                    ++underflow;
                    continue;
                }
                double spread = spread_of(spec, t, x, y);
                bool xr = !D.dt_xroute.empty();
                if (!xr) ++near_plane;
                for (int k = 1; k <= max_order; ++k) {
                    std::size_t K = static_cast<std::size_t>(k);
                    // FD in t against the x-route; the analytic t-jet stands in on hyperplanes
                    double ref = xr ? D.dt_xroute[K] : D.dt[K];
                    double floor = 1e-3 * std::abs(D.value) * std::pow((1.0 + spread) / t, k);
                    double dev = std::abs(D.dt_fd[K] - ref) / std::max(std::abs(ref), floor);
                    ++compared;
                    rep.csv.add_row({fmt(t), point_str(x), point_str(y), std::to_string(k), fmt(D.dt_fd[K]),
                                     xr ? fmt(D.dt_xroute[K]) : "", fmt(D.dt[K]), fmt(dev), xr ? "x" : "t-jet"});
                    if (dev > worst) {
                        worst = dev;
                        where = probe_str(t, x, y) + " m=" + std::to_string(k);
                    }
                }
            }
    rep.check("heat-equation-dual-route", worst <= tolerance, worst, tolerance, where);
    rep.notes.push_back(std::to_string(compared) + " comparisons; " + std::to_string(underflow) +
                        " probes skipped (kernel underflows to 0 or a subnormal); " + std::to_string(near_plane) +
                        " probes within 0.05 sqrt(t) of a hyperplane compared against the analytic t-jet");
    return rep;
}

namespace {

double log_bound(const KernelSpec& spec, KernelBound b, int m, int j, double c, double t, std::span<const double> x,
                 std::span<const double> y, double V) {
    double r = rho(spec.group(), x, y);
    double tail = c * r * r / t + std::log(V);
    switch (b) {
        case KernelBound::upper:
            return log_eval_kernel(spec, t, x, y) + tail;
        case KernelBound::time_derivative: {
            KernelJets J = kernel_t_jets(spec, t, x, y, m);
            double v = factorial(m) * J.h[m];
            return J.log_scale + std::log(std::abs(v)) + m * std::log(t) + tail;
        }
        case KernelBound::mixed: {
            KernelJets J = kernel_t_jets(spec, t, x, y, m);
            std::size_t J_ = static_cast<std::size_t>(j);
            double v = factorial(m) * (J.grad[J_][m] + spec.kappas()[J_] * J.quot[J_][m]);
            return J.log_scale + std::log(std::abs(v)) + (m + 0.5) * std::log(t) + tail;
        }
        case KernelBound::gamma:
            return 0.5 * log_gamma_of_kernel(spec, m, t, x, y, true) + (m + 0.5) * std::log(t) + tail;
    }
    return NAN;
}

}  // namespace

double log_kernel_bound_quantity(const KernelSpec& spec, KernelBound b, int m, int j, double c, double t,
                                 std::span<const double> x, std::span<const double> y) {
    return log_bound(spec, b, m, j, c, t, x, y, two_point_volume(spec.density(), x, y, std::sqrt(t)));
}

SuiteReport verify_kernel_bounds(const KernelSpec& spec, const KernelSweep& sweep, const KernelBoundOptions& opt) {
    SuiteReport rep;
    rep.suite = "kernel-bounds";
    KernelSweep dense = sweep.densified();
    int d = spec.dim();
    VolumeCache vol(spec.density());

    auto run = [&](std::string id, KernelBound b, int m, int j, double exponent) {
        auto eval = [&](double c, bool use_dense) {
            const KernelSweep& S = use_dense ? dense : sweep;
            SweepMax mx;
            for (double t : S.t)
                for (const auto& x : S.points)
                    for (const auto& y : S.points) {
                        double V = std::max(vol(x, std::sqrt(t)), vol(y, std::sqrt(t)));
                        mx.add(log_bound(spec, b, m, j, c, t, x, y, V), [&] { return probe_str(t, x, y); });
                    }
            return mx;
        };
        FitReport f = fit_with_halving(std::move(id), exponent, opt.max_halvings, opt.stability, eval);
        if (f.halvings > 0)
            rep.notes.push_back(f.id + ": exponent halved " + std::to_string(f.halvings) + " time(s) to " +
                                fmt(f.exponent));
        rep.fits.push_back(f);
        return f;
    };

    FitReport upper = run("2.4", KernelBound::upper, 0, 0, opt.upper_exponent);
    for (int m : {1, 2}) run("2.5:m=" + std::to_string(m), KernelBound::time_derivative, m, 0, opt.derivative_exponent);
    for (int j = 0; j < d; ++j)
        for (int m : {0, 1})
            run("2.10:j=" + std::to_string(j + 1) + ":m=" + std::to_string(m), KernelBound::mixed, m, j,
                opt.derivative_exponent);
    for (int m : {0, 1}) run("gamma-bound:m=" + std::to_string(m), KernelBound::gamma, m, 0, opt.derivative_exponent);

    if (spec.variant() == KernelVariant::gaussian) {
        // sup of (4 pi t)^{-d/2} e^{-|x-y|^2/4t} omega_d t^{d/2} e^{c rho^2/t} is at x = y
        double omega = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
        double exact = omega / std::pow(4.0 * std::numbers::pi, 0.5 * d);
        double rel = std::abs(upper.constant / exact - 1.0);
        rep.check("2.4-gaussian-constant", rel <= 0.05, rel, 0.05,
                  "fitted " + fmt(upper.constant) + " vs omega_d/(4 pi)^{d/2} = " + fmt(exact));
    }
    rep.csv.header = {"bound", "requested_exponent", "exponent", "halvings", "constant", "refined_constant", "stable",
                      "location"};
    for (const auto& f : rep.fits)
        rep.csv.add_row({f.id, fmt(f.requested_exponent), fmt(f.exponent), std::to_string(f.halvings), fmt(f.constant),
                         fmt(f.refined_constant), f.stable ? "true" : "false", f.location});
    return rep;
}

}  // namespace dunkl
