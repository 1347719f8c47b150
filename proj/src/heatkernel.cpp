#include "dunkl/heatkernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "dunkl/error.hpp"

namespace dunkl {

namespace {

constexpr double kTail = 13.0;  // exp(-13^2/4) ~ 4e-19
constexpr double kXRouteMin = 0.05;

int scale_sign(double z) {
    if (std::abs(z) < 1.0) return 0;
    return z > 0 ? 1 : -1;
}

// x^2 + y^2 - 2 s x y without cancellation.
double shifted_square(double x, double y, int s) {
    if (s == 0) return x * x + y * y;
    double d = x - s * y;
    return d * d;
}

// 1/(t + delta) - 1/t
Jet inverse_increment(double t, int order) {
    Jet j(order);
    double p = -1.0 / (t * t);
    for (int k = 1; k <= order; ++k) {
        j[k] = p;
        p /= -t;
    }
    return j;
}

// 1/(x0 + delta)
Jet inverse_jet(double x0, int order) {
    Jet j(order);
    double p = 1.0 / x0;
    for (int k = 0; k <= order; ++k) {
        j[k] = p;
        p /= -x0;
    }
    return j;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

void check_args(const KernelSpec& spec, double t, std::span<const double> x, std::span<const double> y) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("heat kernel needs t > 0");
    if (static_cast<int>(x.size()) != spec.dim() || static_cast<int>(y.size()) != spec.dim())
        throw InvalidArgument("heat kernel point dimension mismatch");
}

void check_hyperplanes(const KernelSpec& spec, std::span<const double> x, bool limit_mode) {
    if (limit_mode) return;
    for (const auto& r : spec.system().roots.positive_roots())
        if (r.kappa != 0.0 && dot(r.vec, x) == 0.0)
            throw DomainError("Gamma of the kernel evaluated on a reflection hyperplane (enable limit mode)");
}

// Gamma and |grad_kappa|^2 of Delta^m h, both scaled by exp(-2 log_scale).
struct ScaledGamma {
    double log_scale = 0.0;
    double gamma = 0.0;
    double dunkl_sq = 0.0;
};

ScaledGamma scaled_gamma(const KernelSpec& spec, int m, double t, std::span<const double> x,
                         std::span<const double> y) {
    KernelJets J = kernel_t_jets(spec, t, x, y, m);
    double f = factorial(m);
    ScaledGamma out;
    out.log_scale = J.log_scale;
    for (int j = 0; j < spec.dim(); ++j) {
        double k = spec.kappas()[static_cast<std::size_t>(j)];
        double F = f * J.grad[static_cast<std::size_t>(j)][m];
        double Q = f * J.quot[static_cast<std::size_t>(j)][m];
        out.gamma += F * F + 0.5 * k * Q * Q;
        out.dunkl_sq += (F + k * Q) * (F + k * Q);
    }
    return out;
}

// Richardson-extrapolated central differences in t (two levels).
std::vector<double> fd_time_derivatives(const KernelSpec& spec, double t, std::span<const double> x,
                                        std::span<const double> y, int m) {
    std::vector<double> out{eval_kernel(spec, t, x, y)};
    double spread = 0.0;
    for (int j = 0; j < spec.dim(); ++j) {
        double xj = x[static_cast<std::size_t>(j)], yj = y[static_cast<std::size_t>(j)];
        spread += shifted_square(xj, yj, scale_sign(xj * yj / (2.0 * t))) / (4.0 * t);
    }
    // time scale of the kernel near t
    double tau = t / (1.0 + spread);
    auto h = [&](double s) { return eval_kernel(spec, s, x, y); };
    for (int k = 1; k <= m; ++k) {
        static constexpr double rel[] = {0.0, 1e-4, 1e-3, 2e-2};
        auto central = [&](double step) {
            switch (k) {
                case 1: return (h(t + step) - h(t - step)) / (2.0 * step);
                case 2: return (h(t + step) - 2.0 * out[0] + h(t - step)) / (step * step);
                default:
                    return (h(t + 2.0 * step) - 2.0 * h(t + step) + 2.0 * h(t - step) - h(t - 2.0 * step)) /
                           (2.0 * step * step * step);
            }
        };
        double s0 = rel[k] * tau;
        double d0 = central(s0), d1 = central(s0 / 2.0), d2 = central(s0 / 4.0);
        double r0 = (4.0 * d1 - d0) / 3.0, r1 = (4.0 * d2 - d1) / 3.0;
        out.push_back((16.0 * r1 - r0) / 15.0);
    }
    return out;
}

// L^k f(x0), k = 0..m, for L f = f'' + 2 kappa f'/x - kappa (f(x) - f(-x))/x^2, with f = h_t(., y).
// Values are scaled by exp(-log_scale).
std::vector<double> factor_laplacian_powers(const KernelFactor& F, double t, double x0, double y, int m,
                                            double& log_scale) {
    double k = F.kappa();
    int n = 2 * m;
    auto A = F.x_jet(t, x0, y, n);
    auto B = F.x_jet(t, -x0, y, n);
    log_scale = std::max(A.log_scale, B.log_scale);
    Jet a = A.h * std::exp(A.log_scale - log_scale);
    Jet b = B.h * std::exp(B.log_scale - log_scale);
    std::vector<double> out{a[0]};
    for (int step = 1; step <= m; ++step) {
        n -= 2;
        auto apply = [&](const Jet& f, const Jet& g, double base) {
            Jet f1 = f.derivative_jet();
            Jet f2 = f1.derivative_jet();
            Jet r = f2.truncated(n);
            if (k != 0.0) {
                Jet inv = inverse_jet(base, n);
                Jet diff = (f - g.reflected()).truncated(n);
                r += (2.0 * k) * (f1.truncated(n) * inv);
                r -= k * (diff * inv * inv);
            }
            return r;
        };
        Jet an = apply(a, b, x0);
        Jet bn = apply(b, a, -x0);
        a = an;
        b = bn;
        out.push_back(a[0]);
    }
    return out;
}

}  // namespace

KernelFactor::KernelFactor(double kappa) : F_(kappa) {
    log_c_ = 0.0;
    log_c_ = -std::log(mass(1.0, 0.0));
    std::mt19937_64 rng(0x5eed0000u + static_cast<std::uint64_t>(kappa * 1000.0));
    std::uniform_real_distribution<double> lt(-2.0, 2.0), ux(-4.0, 4.0);
    for (int i = 0; i < 20; ++i) {
        double t = std::pow(10.0, lt(rng));
        double x = ux(rng) * std::sqrt(t);
        double err = std::abs(mass(t, x) - 1.0);
        validation_error_ = std::max(validation_error_, err);
        if (err > kMassTolerance) {
            std::ostringstream os;
            os << "heat kernel normalization fails validation for kappa=" << kappa << " at t=" << t << ", x=" << x
               << ": |mass - 1| = " << err;
            throw ConsistencyError(os.str());
        }
    }
}

double KernelFactor::log_value(double t, double x, double y) const {
    double z = x * y / (2.0 * t);
    int s = scale_sign(z);
    double E[1], S[1];
    F_.scaled_taylor(z, s, 0, E, S);
    return log_c_ - (kappa() + 0.5) * std::log(t) - shifted_square(x, y, s) / (4.0 * t) + std::log(E[0]);
}

double KernelFactor::mass(double t, double x) const {
    double k = kappa();
    double L = kTail * std::sqrt(t);
    double lo = -std::abs(x) - L, hi = std::abs(x) + L;
    AdaptiveOptions opt{1e-16, 1e-14, 5000};
    auto f = [&](double y) {
        double w = k == 0.0 ? 1.0 : std::pow(2.0, k) * std::pow(std::abs(y), 2.0 * k);
        return w == 0.0 ? 0.0 : value(t, x, y) * w;
    };
    return integrate_adaptive(f, lo, hi, {0.0, x, -x}, opt).value;
}

KernelFactor::TJets KernelFactor::t_jets(double t, double x, double y, int order) const {
    double z0 = x * y / (2.0 * t);
    int s = scale_sign(z0);
    double D = shifted_square(x, y, s);
    double g = kappa() + 0.5;
    TJets J;
    J.log_scale = log_c_ - g * std::log(t) - D / (4.0 * t);
    Jet inv = inverse_increment(t, order);
    Jet lg(order);
    double p = 1.0 / t;
    for (int k = 1; k <= order; ++k) {
        lg[k] = (k % 2 == 1 ? p : -p) / k;
        p /= t;
    }
    Jet P = exp((-g) * lg - (D / 4.0) * inv);
    Jet zeta = (x * y / 2.0) * inv;
    double E[Jet::kMaxOrder + 1], S[Jet::kMaxOrder + 1];
    F_.scaled_taylor(z0, s, order, E, S);
    Jet Et = Jet::compose(E, zeta);
    Jet St = Jet::compose(S, zeta);
    Jet half_inv = 0.5 * inv;
    half_inv[0] = 0.5 / t;
    J.h = P * Et;
    J.g = P * (half_inv * ((-x) * Et + y * (Et - (2.0 * kappa()) * St)));
    J.q = P * ((2.0 * y) * (half_inv * St));
    return J;
}

KernelFactor::XJet KernelFactor::x_jet(double t, double x0, double y, int order) const {
    double z0 = x0 * y / (2.0 * t);
    int s = scale_sign(z0);
    XJet J;
    J.log_scale = log_c_ - (kappa() + 0.5) * std::log(t) - shifted_square(x0, y, s) / (4.0 * t);
    double b = x0 - s * y;
    Jet expo(order);
    if (order >= 1) expo[1] = -b / (2.0 * t);
    if (order >= 2) expo[2] = -1.0 / (4.0 * t);
    Jet zeta(order);
    if (order >= 1) zeta[1] = y / (2.0 * t);
    double E[Jet::kMaxOrder + 1], S[Jet::kMaxOrder + 1];
    F_.scaled_taylor(z0, s, order, E, S);
    J.h = exp(expo) * Jet::compose(E, zeta);
    return J;
}

std::shared_ptr<const KernelFactor> kernel_factor(double kappa) {
    static std::mutex mu;
    static std::map<double, std::shared_ptr<const KernelFactor>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(kappa);
    if (it != cache.end()) return it->second;
    auto f = std::make_shared<const KernelFactor>(kappa);
    cache.emplace(kappa, f);
    return f;
}

KernelSpec::KernelSpec(const RootSystem& R) {
    auto ax = R.axis_kappas();
    if (R.kappa_is_zero()) {
        variant_ = KernelVariant::gaussian;
        kappas_.assign(static_cast<std::size_t>(R.dim()), 0.0);
    } else if (ax) {
        variant_ = R.dim() == 1 ? KernelVariant::z2_rank1 : KernelVariant::z2_product;
        kappas_ = *ax;
    } else {
        throw UnsupportedVariant("no closed-form heat kernel for root system '" + R.name() +
                                 "' with nonzero multiplicities (only Z_2^d or kappa = 0)");
    }
    for (double k : kappas_) factors_.push_back(kernel_factor(k));
    system_ = std::make_shared<const DunklSystem>(R);
}

double log_eval_kernel(const KernelSpec& spec, double t, std::span<const double> x, std::span<const double> y) {
    check_args(spec, t, x, y);
    double s = 0.0;
    for (int j = 0; j < spec.dim(); ++j)
        s += spec.factor(j).log_value(t, x[static_cast<std::size_t>(j)], y[static_cast<std::size_t>(j)]);
    return s;
}

double eval_kernel(const KernelSpec& spec, double t, std::span<const double> x, std::span<const double> y) {
    return std::exp(log_eval_kernel(spec, t, x, y));
}

KernelJets kernel_t_jets(const KernelSpec& spec, double t, std::span<const double> x, std::span<const double> y,
                         int order) {
    check_args(spec, t, x, y);
    int d = spec.dim();
    std::vector<KernelFactor::TJets> f;
    KernelJets J;
    for (int j = 0; j < d; ++j) {
        f.push_back(spec.factor(j).t_jets(t, x[static_cast<std::size_t>(j)], y[static_cast<std::size_t>(j)], order));
        J.log_scale += f.back().log_scale;
    }
    J.h = Jet(order, 1.0);
    for (const auto& fj : f) J.h = J.h * fj.h;
    for (int j = 0; j < d; ++j) {
        Jet rest(order, 1.0);
        for (int i = 0; i < d; ++i)
            if (i != j) rest = rest * f[static_cast<std::size_t>(i)].h;
        J.grad.push_back(f[static_cast<std::size_t>(j)].g * rest);
        J.quot.push_back(f[static_cast<std::size_t>(j)].q * rest);
    }
    return J;
}

std::vector<double> laplacian_powers_x(const KernelSpec& spec, double t, std::span<const double> x,
                                       std::span<const double> y, int m) {
    check_args(spec, t, x, y);
    if (m < 0 || 2 * m > Jet::kMaxOrder) throw InvalidArgument("Laplacian power out of range");
    int d = spec.dim();
    std::vector<std::vector<double>> L;
    double log_scale = 0.0;
    for (int j = 0; j < d; ++j) {
        double xj = x[static_cast<std::size_t>(j)];
        if (spec.kappas()[static_cast<std::size_t>(j)] != 0.0 && xj == 0.0)
            throw DomainError("x-route Laplacian needs x off the reflection hyperplanes");
        double ls = 0.0;
        L.push_back(factor_laplacian_powers(spec.factor(j), t, xj, y[static_cast<std::size_t>(j)], m, ls));
        log_scale += ls;
    }
    // Delta^k = (sum_j L_j)^k with commuting L_j acting on separate factors
    std::vector<double> out(static_cast<std::size_t>(m + 1), 0.0);
    std::vector<int> pw(static_cast<std::size_t>(d), 0);
    auto rec = [&](auto&& self, int j, int used) -> void {
        if (j == d) {
            double v = factorial(used);
            for (int i = 0; i < d; ++i) {
                int p = pw[static_cast<std::size_t>(i)];
                v *= L[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] / factorial(p);
            }
            out[static_cast<std::size_t>(used)] += v;
            return;
        }
        for (int p = 0; used + p <= m; ++p) {
            pw[static_cast<std::size_t>(j)] = p;
            self(self, j + 1, used + p);
        }
        pw[static_cast<std::size_t>(j)] = 0;
    };
    rec(rec, 0, 0);
    double sc = std::exp(log_scale);
    for (auto& v : out) v *= sc;
    return out;
}

KernelDerivatives eval_kernel_derivatives(const KernelSpec& spec, double t, std::span<const double> x,
                                          std::span<const double> y, int m, const DerivativeOptions& opt) {
    if (m < 0 || m > 3) throw InvalidArgument("time derivative order must be in 0..3");
    KernelJets J = kernel_t_jets(spec, t, x, y, m);
    int d = spec.dim();
    double sc = std::exp(J.log_scale);
    KernelDerivatives out;
    for (int k = 0; k <= m; ++k) out.dt.push_back(sc * J.h.derivative(k));
    out.value = out.dt[0];
    out.grad.resize(static_cast<std::size_t>(d));
    out.dunkl_grad.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        std::size_t J_ = static_cast<std::size_t>(j);
        out.grad[J_] = sc * J.grad[J_][0];
        out.dunkl_grad[J_] = out.grad[J_] + spec.kappas()[J_] * sc * J.quot[J_][0];
    }
    for (const auto& r : spec.system().roots.positive_roots()) {
        int axis = -1, nonzero = 0;
        for (int j = 0; j < d; ++j)
            if (std::abs(r.vec[static_cast<std::size_t>(j)]) > 1e-12) {
                axis = j;
                ++nonzero;
            }
        if (nonzero == 1) {
            // (h - h o r)/<a,x> = Q_j x_j / (a_j x_j)
            out.root_quotients.push_back(sc * J.quot[static_cast<std::size_t>(axis)][0] /
                                         r.vec[static_cast<std::size_t>(axis)]);
        } else {
            // Gaussian: h(r x) = h(x) exp(-<a,x><a,y>/(2t)) for |a|^2 = 2
            double ax = dot(r.vec, x), ay = dot(r.vec, y);
            double q = ax == 0.0 ? ay / (2.0 * t) : -std::expm1(-ax * ay / (2.0 * t)) / ax;
            out.root_quotients.push_back(out.value * q);
        }
    }
    if (!opt.cross_check || m == 0) return out;

    bool x_ok = true;
    for (int j = 0; j < d; ++j)
        if (spec.kappas()[static_cast<std::size_t>(j)] != 0.0 &&
            std::abs(x[static_cast<std::size_t>(j)]) < kXRouteMin * std::sqrt(t))
            x_ok = false;
    if (x_ok) out.dt_xroute = laplacian_powers_x(spec, t, x, y, m);
    out.dt_fd = fd_time_derivatives(spec, t, x, y, m);
    double spread = 0.0;
    for (int j = 0; j < d; ++j) {
        double xj = x[static_cast<std::size_t>(j)], yj = y[static_cast<std::size_t>(j)];
        spread += shifted_square(xj, yj, scale_sign(xj * yj / (2.0 * t))) / (4.0 * t);
    }
    std::ostringstream diag;
    for (int k = 1; k <= m; ++k) {
        std::size_t K = static_cast<std::size_t>(k);
        double floor = 1e-3 * std::abs(out.value) * std::pow((1.0 + spread) / t, k);
        double scale = std::max(std::abs(out.dt[K]), floor);
        double dev_fd = std::abs(out.dt_fd[K] - out.dt[K]) / scale;
        double dev_x = x_ok ? std::abs(out.dt_xroute[K] - out.dt[K]) / scale : 0.0;
        out.max_route_deviation = std::max({out.max_route_deviation, dev_fd, dev_x});
        diag << " k=" << k << " analytic=" << out.dt[K] << " fd=" << out.dt_fd[K];
        if (x_ok) diag << " xroute=" << out.dt_xroute[K];
    }
    if (out.max_route_deviation > opt.tolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "time-derivative routes disagree (relative " << out.max_route_deviation << ") at t=" << t << ":"
           << diag.str();
        throw NumericalInstability(os.str());
    }
    return out;
}

double gamma_of_kernel(const KernelSpec& spec, int m, double t, std::span<const double> x, std::span<const double> y,
                       bool limit_mode) {
    check_args(spec, t, x, y);
    check_hyperplanes(spec, x, limit_mode);
    ScaledGamma g = scaled_gamma(spec, m, t, x, y);
    return g.gamma * std::exp(2.0 * g.log_scale);
}

double log_gamma_of_kernel(const KernelSpec& spec, int m, double t, std::span<const double> x,
                           std::span<const double> y, bool limit_mode) {
    check_args(spec, t, x, y);
    check_hyperplanes(spec, x, limit_mode);
    ScaledGamma g = scaled_gamma(spec, m, t, x, y);
    return std::log(g.gamma) + 2.0 * g.log_scale;
}

double dunkl_grad_sq_of_kernel(const KernelSpec& spec, int m, double t, std::span<const double> x,
                               std::span<const double> y, bool limit_mode) {
    check_args(spec, t, x, y);
    check_hyperplanes(spec, x, limit_mode);
    ScaledGamma g = scaled_gamma(spec, m, t, x, y);
    return g.dunkl_sq * std::exp(2.0 * g.log_scale);
}

Estimate semigroup_apply(const KernelSpec& spec, const FnD& f, double t, std::span<const double> x,
                         const QuadratureGrid& grid, const AxisBreaks& breaks) {
    int d = spec.dim();
    if (!(t > 0.0)) throw InvalidArgument("semigroup needs t > 0");
    if (static_cast<int>(x.size()) != d) throw InvalidArgument("semigroup point dimension mismatch");
    Vec lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    AxisBreaks br(static_cast<std::size_t>(d));
    double L = kTail * std::sqrt(t);
    for (int j = 0; j < d; ++j) {
        std::size_t J = static_cast<std::size_t>(j);
        hi[J] = std::abs(x[J]) + L;
        lo[J] = -hi[J];
        br[J] = {0.0, x[J], -x[J]};
        if (J < breaks.size()) br[J].insert(br[J].end(), breaks[J].begin(), breaks[J].end());
    }
    Vec xv(x.begin(), x.end());
    auto g = [&](std::span<const double> y) {
        double fv = f(y);
        return fv == 0.0 ? 0.0 : eval_kernel(spec, t, xv, y) * fv;
    };
    return integrate_box(g, lo, hi, spec.density(), grid, br);
}

}  // namespace dunkl
