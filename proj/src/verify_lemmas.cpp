#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "dunkl/error.hpp"
#include "dunkl/quadrature.hpp"
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

double ball_measure(const KernelSpec& spec, std::span<const double> y, double r) {
    const WeightedDensity& W = spec.density();
    return W.dim() == 1 ? W.axis_measure(0, y[0] - r, y[0] + r) : ball_volume(y, r, W).value;
}

}  // namespace

Estimate exterior_integral(const FnD& F, const KernelSpec& spec, std::span<const double> y, double r, double reach,
                           double rel_tol) {
    const int d = spec.dim();
    if (d > 3) throw UnsupportedVariant("exterior_integral supports d <= 3");
    if (!(reach > 0.0)) throw InvalidArgument("reach must be positive");
    const std::vector<Vec> orbit = spec.group().orbit(y);
    const WeightedDensity& W = spec.density();
    Vec lo(static_cast<std::size_t>(d), INFINITY), hi(static_cast<std::size_t>(d), -INFINITY);
    for (const auto& o : orbit)
        for (std::size_t j = 0; j < o.size(); ++j) {
            lo[j] = std::min(lo[j], o[j] - reach);
            hi[j] = std::max(hi[j], o[j] + reach);
        }
    AdaptiveOptions opt{1e-300, rel_tol, 2000};
    Vec x(static_cast<std::size_t>(d));
    double err = 0.0;

    std::function<double(int)> level = [&](int k) -> double {
        std::size_t K = static_cast<std::size_t>(k);
        std::vector<double> breaks{0.0};
        for (const auto& o : orbit) {
            double rem = r * r;
            for (std::size_t i = 0; i < K; ++i) rem -= (x[i] - o[i]) * (x[i] - o[i]);
            breaks.push_back(o[K]);
            if (rem > 0.0) {
                breaks.push_back(o[K] - std::sqrt(rem));
                breaks.push_back(o[K] + std::sqrt(rem));
            }
        }
        std::erase_if(breaks, [&](double b) { return !(b > lo[K] && b < hi[K]); });
        std::sort(breaks.begin(), breaks.end());
        auto inner = [&](double v) {
            x[K] = v;
            if (k + 1 < d) return level(k + 1);
            if (r > 0.0)
                for (const auto& o : orbit) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < o.size(); ++i) s += (x[i] - o[i]) * (x[i] - o[i]);
                    if (s < r * r) return 0.0;
                }
            return F(x) * W(x);
        };
        Estimate e = integrate_adaptive(inner, lo[K], hi[K], breaks, opt);
        if (k == 0) err = e.error;
        return e.value;
    };
    double v = level(0);
    return {v, err};
}

LemmaSweep LemmaSweep::standard(int dim, std::uint64_t seed) {
    LemmaSweep s;
    if (dim == 1) {
        for (double v : {0.0, 1e-3, 0.01, 0.1, -0.3, 0.5, 1.0, -2.0, 3.0, -0.2, 1.5, 5.0}) s.y.push_back({v});
        return s;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int i = 0; i < 12; ++i) {
        Vec p(static_cast<std::size_t>(dim));
        for (auto& v : p) v = U(rng);
        if (i % 3 == 0) p[static_cast<std::size_t>(i / 3) % p.size()] = 0.0;
        if (i % 3 == 1) p[static_cast<std::size_t>(i / 3) % p.size()] = 1e-3;
        s.y.push_back(p);
    }
    return s;
}

LemmaSweep LemmaSweep::densified() const {
    LemmaSweep o = *this;
    o.s.clear();
    o.t_over_s.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
        o.s.push_back(s[i]);
        if (i + 1 < s.size()) o.s.push_back(std::sqrt(s[i] * s[i + 1]));
    }
    for (std::size_t i = 0; i < t_over_s.size(); ++i) {
        o.t_over_s.push_back(t_over_s[i]);
        if (i + 1 < t_over_s.size()) o.t_over_s.push_back(0.5 * (t_over_s[i] + t_over_s[i + 1]));
    }
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        Vec m(y[i].size());
        for (std::size_t j = 0; j < m.size(); ++j) m[j] = 0.5 * (y[i][j] + y[i + 1][j]);
        o.y.push_back(m);
    }
    return o;
}

namespace {

enum class Lemma { decay, gamma_total, gamma_exterior, time_exterior };

struct Row {
    double s, t_over_s;
    Vec y;
    double log_integral;
    double log_quantity;
};

// Integrals of one lemma over a sweep at one exponent.
std::vector<Row> lemma_rows(const KernelSpec& spec, Lemma lemma, int m, double exponent, const LemmaSweep& S) {
    std::vector<Row> rows;
    std::vector<double> ts = lemma == Lemma::gamma_total ? std::vector<double>{0.0} : S.t_over_s;
    for (double s : S.s)
        for (const auto& y : S.y) {
            double logV = std::log(ball_measure(spec, y, std::sqrt(s)));
            for (double ts_ : ts) {
                double r = std::sqrt(ts_ * s);
                FnD F;
                double decay = 0.0;  // Gaussian rate of the integrand in rho^2 / s
                double log_pref = 0.0;
                switch (lemma) {
                    case Lemma::decay:
                        F = [&, s](std::span<const double> x) {
                            double p = rho(spec.group(), x, y);
                            return std::exp(-2.0 * exponent * p * p / s);
                        };
                        decay = 2.0 * exponent;
                        log_pref = -logV + exponent * ts_;
                        break;
                    case Lemma::gamma_total:
                    case Lemma::gamma_exterior: {
                        double eps = lemma == Lemma::gamma_total ? 0.0 : exponent;
                        F = [&, s, eps](std::span<const double> x) {
                            double p = rho(spec.group(), x, y);
                            return std::exp(log_gamma_of_kernel(spec, m, s, x, y, true) + eps * p * p / s);
                        };
                        decay = 0.5 - eps;
                        log_pref = (2 * m + 1) * std::log(s) + logV + eps * ts_;
                        break;
                    }
                    case Lemma::time_exterior:
                        F = [&, s](std::span<const double> x) {
                            KernelJets J = kernel_t_jets(spec, s, x, y, m);
                            double f = 1.0;
                            for (int i = 2; i <= m; ++i) f *= i;
                            double v = f * J.h[m];
                            double p = rho(spec.group(), x, y);
                            if (v == 0.0) return 0.0;
                            return std::exp(2.0 * (J.log_scale + std::log(std::abs(v))) + exponent * p * p / s);
                        };
                        decay = 0.5 - exponent;
                        log_pref = 2 * m * std::log(s) + logV + exponent * ts_;
                        break;
                }
                double reach = std::max(std::sqrt(70.0 * s / decay), 2.0 * r);
                double I = exterior_integral(F, spec, y, r, reach).value;
                double li = std::log(I);
                rows.push_back({s, ts_, y, li, li + log_pref});
            }
        }
    return rows;
}

std::string row_str(const Row& r, int m) {
    return "s=" + fmt(r.s) + " t/s=" + fmt(r.t_over_s) + " y=" + point_str(r.y) + " m=" + std::to_string(m);
}

}  // namespace

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_slope needs two or more matching points");
    double n = static_cast<double>(x.size()), mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

SuiteReport verify_integral_lemmas(const KernelSpec& spec, const LemmaSweep& sweep, double stability) {
    SuiteReport rep;
    rep.suite = "lemmas";
    rep.csv.header = {"lemma", "m", "exponent", "s", "t_over_s", "y", "log_integral", "log_quantity"};
    if (sweep.y.empty()) throw InvalidArgument("lemma sweep has no y points");
    const LemmaSweep dense = sweep.densified();
    std::map<std::tuple<int, int, double, bool>, std::vector<Row>> cache;
    auto rows = [&](Lemma L, int m, double e, bool use_dense) -> const std::vector<Row>& {
        auto key = std::make_tuple(static_cast<int>(L), m, e, use_dense);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, lemma_rows(spec, L, m, e, use_dense ? dense : sweep)).first;
        return it->second;
    };

    auto run = [&](const std::string& id, Lemma L, int m, double exponent) {
        auto eval = [&](double e, bool use_dense) {
            SweepMax mx;
            for (const Row& r : rows(L, m, e, use_dense)) mx.add(r.log_quantity, [&] { return row_str(r, m); });
            return mx;
        };
        // two halvings at most; the exponent enters every (2.8)-type integrand
        FitReport f = fit_with_halving(id, exponent, L == Lemma::gamma_total ? 0 : 2, stability, eval);
        if (f.halvings > 0)
            rep.notes.push_back(f.id + ": exponent halved " + std::to_string(f.halvings) + " time(s) to " +
                                fmt(f.exponent));
        for (const Row& r : rows(L, m, f.exponent, false))
            rep.csv.add_row({id, std::to_string(m), fmt(f.exponent), fmt(r.s), fmt(r.t_over_s), point_str(r.y),
                             fmt(r.log_integral), fmt(r.log_quantity)});
        rep.fits.push_back(f);
        return f;
    };

    run("lemma-2.2", Lemma::decay, 0, sweep.delta);
    for (int m : sweep.m) {
        std::string ms = ":m=" + std::to_string(m);
        run("2.7" + ms, Lemma::gamma_total, m, 0.0);
        FitReport f8 = run("2.8" + ms, Lemma::gamma_exterior, m, sweep.epsilon);
        run("lemma-2.4" + ms, Lemma::time_exterior, m, sweep.epsilon);

        // decay of the weighted exterior integral along t/s, per (s, y)
        double eps = f8.exponent;
        double worst = -INFINITY;
        std::string where;
        std::map<std::pair<double, std::size_t>, std::pair<std::vector<double>, std::vector<double>>> series;
        const auto& R8 = rows(Lemma::gamma_exterior, m, eps, false);
        for (std::size_t i = 0; i < R8.size(); ++i) {
            std::size_t yi = (i / sweep.t_over_s.size()) % sweep.y.size();
            auto& sr = series[{R8[i].s, yi}];
            sr.first.push_back(R8[i].t_over_s);
            sr.second.push_back(R8[i].log_integral);
        }
        for (const auto& [key, xy] : series) {
            if (xy.first.size() < 2) continue;
            double slope = fit_slope(xy.first, xy.second);
            if (!std::isfinite(slope)) slope = INFINITY;
            if (slope > worst) {
                worst = slope;
                where = "s=" + fmt(key.first) + " y=" + point_str(sweep.y[key.second]);
            }
        }
        rep.check("2.8-decay-slope" + ms, worst <= -0.9 * eps, worst, -0.9 * eps, where);

        if (spec.variant() == KernelVariant::gaussian) {
            // int Gamma(Delta^m h_s) = C s^{-(2m+1+d/2)} for the Gaussian kernel
            double expect = -(2.0 * m + 1.0 + 0.5 * spec.dim());
            const auto& R7 = rows(Lemma::gamma_total, m, 0.0, false);
            double dev = 0.0;
            std::string w;
            for (std::size_t yi = 0; yi < sweep.y.size(); ++yi) {
                std::vector<double> ls, li;
                for (std::size_t i = yi; i < R7.size(); i += sweep.y.size()) {
                    ls.push_back(std::log(R7[i].s));
                    li.push_back(R7[i].log_integral);
                }
                double e = std::abs(fit_slope(ls, li) / expect - 1.0);
                if (!(e <= dev)) {
                    dev = std::isfinite(e) ? e : INFINITY;
                    w = "y=" + point_str(sweep.y[yi]) + " slope " + fmt(fit_slope(ls, li)) + " vs " + fmt(expect);
                }
            }
            rep.check("2.7-gaussian-exponent" + ms, dev <= 0.02, dev, 0.02, w);
        }
    }
    return rep;
}

}  // namespace dunkl
