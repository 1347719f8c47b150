#include "dunkl/squarefns.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <sstream>
#include <thread>

#include "dunkl/error.hpp"
#include "dunkl/rational.hpp"

namespace dunkl {

namespace {

constexpr double kBumpCut = 9.0;

double window_value(double u2) { return u2 >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - u2)); }

double axis_weight(double kappa, double u) {
    if (kappa == 0.0) return 1.0;
    return std::pow(std::sqrt(2.0) * std::abs(u), 2.0 * kappa);
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

// Splits at `sep` outside (), [].
std::vector<std::string> split_top(std::string_view s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(s.substr(start)));
    return out;
}

double parse_number(const std::string& s) {
    try {
        return to_double(parse_rational(s));
    } catch (const Error&) {
        throw InvalidArgument("bad number '" + s + "' in test function");
    }
}

Vec parse_point(const std::string& s, int dim) {
    Vec v;
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw InvalidArgument("unterminated point '" + s + "'");
        for (const auto& p : split_top(std::string_view(s).substr(1, s.size() - 2), ','))
            v.push_back(parse_number(p));
    } else {
        v.assign(static_cast<std::size_t>(dim), parse_number(s));
    }
    if (static_cast<int>(v.size()) != dim) throw InvalidArgument("point '" + s + "' has the wrong dimension");
    return v;
}

struct AxisNodes {
    std::vector<double> y, w, h, ht, g, q;
};

AxisNodes axis_nodes(const KernelFactor& F, double xj, double t, double lo, double hi, const std::vector<double>& br,
                     double feature, const SpatialOptions& opt) {
    double kappa = F.kappa();
    double r = std::sqrt(t);
    double L = opt.window * r;
    std::vector<std::pair<double, double>> iv{{xj - L, xj + L}};
    if (kappa != 0.0) iv.push_back({-xj - L, -xj + L});
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (auto [a, b] : iv) {
        a = std::max(a, lo);
        b = std::min(b, hi);
        if (!(b > a)) continue;
        if (!merged.empty() && a <= merged.back().second)
            merged.back().second = std::max(merged.back().second, b);
        else
            merged.push_back({a, b});
    }
    const GaussRule& G = gauss_legendre(opt.order);
    double pw = std::min(opt.panel * r, feature / 4.0);
    AxisNodes out;
    for (auto [a, b] : merged) {
        std::vector<double> cuts{a, b};
        for (double p : br)
            if (p > a && p < b) cuts.push_back(p);
        if (kappa != 0.0 && a < 0.0 && b > 0.0) cuts.push_back(0.0);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            double p = cuts[s], q = cuts[s + 1];
            if (!(q > p)) continue;
            int n = std::max(1, static_cast<int>(std::ceil((q - p) / pw)));
            double len = (q - p) / n;
            for (int k = 0; k < n; ++k) {
                double c = p + (k + 0.5) * len, hl = 0.5 * len;
                for (std::size_t i = 0; i < G.nodes.size(); ++i) {
                    double y = c + hl * G.nodes[i];
                    double w = hl * G.weights[i] * axis_weight(kappa, y);
                    if (w == 0.0) continue;
                    auto J = F.t_jets(t, xj, y, 1);
                    double sc = std::exp(J.log_scale);
                    out.y.push_back(y);
                    out.w.push_back(w);
                    out.h.push_back(sc * J.h[0]);
                    out.ht.push_back(sc * J.h[1]);
                    out.g.push_back(sc * J.g[0]);
                    out.q.push_back(sc * J.q[0]);
                }
            }
        }
    }
    return out;
}

struct Prepared {
    Vec lo, hi;
    AxisBreaks br;
    double feature;
};

Prepared prepare(const TestFunction& f) {
    return {f.support_lo(), f.support_hi(), f.breaks(), f.feature_scale()};
}

HeatFlowValues heat_flow_core(const TestFunction& f, const Prepared& P, double t, std::span<const double> x,
                              const KernelSpec& spec, const SpatialOptions& opt) {
    int d = spec.dim();
    HeatFlowValues out;
    out.grad.assign(static_cast<std::size_t>(d), 0.0);
    out.quot.assign(static_cast<std::size_t>(d), 0.0);
    if (f.is_zero()) return out;
    std::vector<AxisNodes> ax;
    for (int j = 0; j < d; ++j) {
        std::size_t J = static_cast<std::size_t>(j);
        ax.push_back(axis_nodes(spec.factor(j), x[J], t, P.lo[J], P.hi[J], P.br[J], P.feature, opt));
        if (ax.back().y.empty()) return out;
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    Vec y(static_cast<std::size_t>(d));
    CompensatedSum sv, st;
    std::vector<CompensatedSum> sg(static_cast<std::size_t>(d)), sq(static_cast<std::size_t>(d));
    while (true) {
        double wt = 1.0;
        for (int j = 0; j < d; ++j) {
            std::size_t J = static_cast<std::size_t>(j);
            y[J] = ax[J].y[idx[J]];
            wt *= ax[J].w[idx[J]];
        }
        double fv = f(y) * wt;
        if (fv != 0.0) {
            double hp = 1.0;
            for (int j = 0; j < d; ++j) hp *= ax[static_cast<std::size_t>(j)].h[idx[static_cast<std::size_t>(j)]];
            sv.add(fv * hp);
            double dts = 0.0;
            for (int j = 0; j < d; ++j) {
                std::size_t J = static_cast<std::size_t>(j);
                double rest = 1.0;
                for (int i = 0; i < d; ++i)
                    if (i != j) rest *= ax[static_cast<std::size_t>(i)].h[idx[static_cast<std::size_t>(i)]];
                dts += ax[J].ht[idx[J]] * rest;
                sg[J].add(fv * ax[J].g[idx[J]] * rest);
                sq[J].add(fv * ax[J].q[idx[J]] * rest);
            }
            st.add(fv * dts);
        }
        int j = d - 1;
        while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == ax[static_cast<std::size_t>(j)].y.size()) {
            idx[static_cast<std::size_t>(j)] = 0;
            --j;
        }
        if (j < 0) break;
    }
    out.value = sv.value();
    out.dt = st.value();
    for (int j = 0; j < d; ++j) {
        out.grad[static_cast<std::size_t>(j)] = sg[static_cast<std::size_t>(j)].value();
        out.quot[static_cast<std::size_t>(j)] = sq[static_cast<std::size_t>(j)].value();
    }
    return out;
}

bool near_hyperplane(const KernelSpec& spec, std::span<const double> x, double collar) {
    for (const auto& r : spec.system().roots.positive_roots())
        if (r.kappa != 0.0 && std::abs(dot(r.vec, x)) < collar) return true;
    return false;
}

}  // namespace

TestFunction TestFunction::spike(std::span<const double> center, double width, const WeightedDensity& W) {
    if (!(width > 0.0)) throw InvalidArgument("spike width must be positive");
    TestFunction f(static_cast<int>(center.size()));
    if (f.dim_ != W.dim()) throw InvalidArgument("spike dimension does not match the measure");
    Atom a{Kind::spike, Vec(center.begin(), center.end()), width, 1.0, {}};
    f.atoms_.push_back(a);
    QuadratureGrid g;
    g.options = {1e-15, 1e-12, 4000};
    Estimate m = integrate_box(f, f.support_lo(), f.support_hi(), W, g, f.breaks());
    f.atoms_[0].coeff = 1.0 / m.value;
    return f;
}

TestFunction TestFunction::bump(std::span<const double> center, double scale) {
    if (!(scale > 0.0)) throw InvalidArgument("bump scale must be positive");
    TestFunction f(static_cast<int>(center.size()));
    f.atoms_.push_back({Kind::bump, Vec(center.begin(), center.end()), scale, 1.0, {}});
    return f;
}

TestFunction TestFunction::poly_window(const FloatPoly& p, double scale) {
    if (!(scale > 0.0)) throw InvalidArgument("window scale must be positive");
    TestFunction f(p.dim());
    f.atoms_.push_back({Kind::poly_window, Vec(static_cast<std::size_t>(p.dim()), 0.0), scale, 1.0, p});
    return f;
}

double TestFunction::operator()(std::span<const double> y) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        double u2 = 0.0;
        for (int j = 0; j < dim_; ++j) {
            double u = (y[static_cast<std::size_t>(j)] - a.center[static_cast<std::size_t>(j)]) / a.scale;
            u2 += u * u;
        }
        switch (a.kind) {
            case Kind::spike: s += a.coeff * window_value(u2); break;
            case Kind::bump: s += a.coeff * std::exp(-u2); break;
            case Kind::poly_window:
                if (u2 < 1.0) s += a.coeff * a.poly.evaluate<double>(y) * std::exp(1.0) * window_value(u2);
                break;
        }
    }
    return s;
}

Vec TestFunction::support_lo() const {
    Vec v(static_cast<std::size_t>(dim_), atoms_.empty() ? 0.0 : INFINITY);
    for (const auto& a : atoms_)
        for (int j = 0; j < dim_; ++j) {
            double r = a.kind == Kind::bump ? kBumpCut * a.scale : a.scale;
            v[static_cast<std::size_t>(j)] = std::min(v[static_cast<std::size_t>(j)], a.center[static_cast<std::size_t>(j)] - r);
        }
    return v;
}

Vec TestFunction::support_hi() const {
    Vec v(static_cast<std::size_t>(dim_), atoms_.empty() ? 0.0 : -INFINITY);
    for (const auto& a : atoms_)
        for (int j = 0; j < dim_; ++j) {
            double r = a.kind == Kind::bump ? kBumpCut * a.scale : a.scale;
            v[static_cast<std::size_t>(j)] = std::max(v[static_cast<std::size_t>(j)], a.center[static_cast<std::size_t>(j)] + r);
        }
    return v;
}

AxisBreaks TestFunction::breaks() const {
    AxisBreaks b(static_cast<std::size_t>(dim_));
    for (const auto& a : atoms_) {
        if (a.kind == Kind::bump) continue;
        for (int j = 0; j < dim_; ++j) {
            b[static_cast<std::size_t>(j)].push_back(a.center[static_cast<std::size_t>(j)] - a.scale);
            b[static_cast<std::size_t>(j)].push_back(a.center[static_cast<std::size_t>(j)] + a.scale);
        }
    }
    return b;
}

double TestFunction::feature_scale() const {
    double s = INFINITY;
    for (const auto& a : atoms_) s = std::min(s, a.kind == Kind::poly_window ? a.scale / 2.0 : a.scale);
    return s;
}

TestFunction& TestFunction::operator+=(const TestFunction& o) {
    if (o.dim_ != dim_ && !o.atoms_.empty()) {
        if (atoms_.empty())
            dim_ = o.dim_;
        else
            throw InvalidArgument("adding test functions of different dimensions");
    }
    atoms_.insert(atoms_.end(), o.atoms_.begin(), o.atoms_.end());
    return *this;
}

TestFunction& TestFunction::operator*=(double c) {
    for (auto& a : atoms_) a.coeff *= c;
    return *this;
}

TestFunction parse_test_function(std::string_view text, const WeightedDensity& W) {
    int d = W.dim();
    TestFunction out(d);
    for (const auto& term : split_top(text, '+')) {
        if (term.empty()) throw InvalidArgument("empty term in test function '" + std::string(text) + "'");
        if (term == "zero" || term == "0") continue;
        std::size_t open = term.find('(');
        if (open == std::string::npos || term.back() != ')')
            throw InvalidArgument("expected name(args) in test function term '" + term + "'");
        std::string head = trim(std::string_view(term).substr(0, open));
        double coeff = 1.0;
        if (auto star = head.rfind('*'); star != std::string::npos) {
            coeff = parse_number(trim(std::string_view(head).substr(0, star)));
            head = trim(std::string_view(head).substr(star + 1));
        }
        auto args = split_top(std::string_view(term).substr(open + 1, term.size() - open - 2), ',');
        if (args.size() != 2) throw InvalidArgument("'" + head + "' takes two arguments");
        TestFunction t;
        if (head == "spike") {
            t = TestFunction::spike(parse_point(args[0], d), parse_number(args[1]), W);
        } else if (head == "bump") {
            t = TestFunction::bump(parse_point(args[0], d), parse_number(args[1]));
        } else if (head == "poly_window") {
            t = TestFunction::poly_window(parse_poly(args[0], d).to_float(), parse_number(args[1]));
        } else {
            throw InvalidArgument("unknown test function '" + head + "'");
        }
        out += coeff * t;
    }
    return out;
}

std::vector<TimeQuadrature::Node> TimeQuadrature::nodes(double t_hi) const {
    if (!(t_min > 0.0) || !(t_hi > t_min)) throw InvalidArgument("time window must satisfy 0 < t_min < t_max");
    if (nodes_per_decade < 1) throw InvalidArgument("nodes per decade must be positive");
    const GaussRule& G = gauss_legendre(nodes_per_decade);
    std::vector<Node> out;
    double la = std::log(t_min), lend = std::log(t_hi), step = std::log(10.0);
    for (; la < lend - 1e-12; la += step) {
        double lb = std::min(la + step, lend);
        double c = 0.5 * (la + lb), hl = 0.5 * (lb - la);
        for (std::size_t i = 0; i < G.nodes.size(); ++i) {
            double t = std::exp(c + hl * G.nodes[i]);
            out.push_back({t, hl * G.weights[i] * t});
        }
    }
    return out;
}

HeatFlowValues heat_flow(const TestFunction& f, double t, std::span<const double> x, const KernelSpec& spec,
                         const SpatialOptions& opt) {
    if (!(t > 0.0)) throw InvalidArgument("heat flow needs t > 0");
    if (static_cast<int>(x.size()) != spec.dim() || (f.dim() != spec.dim() && !f.is_zero()))
        throw InvalidArgument("heat flow dimension mismatch");
    return heat_flow_core(f, prepare(f), t, x, spec, opt);
}

const char* mode_name(SquareMode m) {
    switch (m) {
        case SquareMode::gamma: return "gamma";
        case SquareMode::dunkl_grad: return "dunkl_grad";
        case SquareMode::grad: return "grad";
        case SquareMode::horizontal: return "horizontal";
    }
    return "?";
}

SquareMode parse_mode(std::string_view s) {
    if (s == "gamma") return SquareMode::gamma;
    if (s == "dunkl_grad") return SquareMode::dunkl_grad;
    if (s == "grad") return SquareMode::grad;
    if (s == "horizontal") return SquareMode::horizontal;
    throw InvalidArgument("unknown square-function mode '" + std::string(s) + "'");
}

SquareFunctionValues square_functions(const TestFunction& f, std::span<const double> x, const KernelSpec& spec,
                                      const TimeQuadrature& tq, const SpatialOptions& opt) {
    int d = spec.dim();
    if (static_cast<int>(x.size()) != d) throw InvalidArgument("square function point dimension mismatch");
    SquareFunctionValues out;
    out.x = Vec(x.begin(), x.end());
    if (f.is_zero()) return out;
    if (f.dim() != d) throw InvalidArgument("test function dimension mismatch");
    Prepared P = prepare(f);
    double t_hi = tq.t_max;
    if (tq.extend_tail) {
        double D = 0.0;
        for (int j = 0; j < d; ++j) {
            std::size_t J = static_cast<std::size_t>(j);
            double e = std::abs(x[J]) + std::max(std::abs(P.lo[J]), std::abs(P.hi[J]));
            D += e * e;
        }
        t_hi = std::max(t_hi, tq.tail_factor * D);
    }
    auto nodes = tq.nodes(t_hi);
    const auto& ks = spec.kappas();
    CompensatedSum I[4];
    double first[4] = {0, 0, 0, 0}, last[4] = {0, 0, 0, 0};
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        double t = nodes[n].t;
        HeatFlowValues H = heat_flow_core(f, P, t, x, spec, opt);
        double F[4] = {0, 0, 0, 0};
        for (int j = 0; j < d; ++j) {
            std::size_t J = static_cast<std::size_t>(j);
            double g = H.grad[J], q = H.quot[J];
            F[0] += g * g + 0.5 * ks[J] * q * q;
            F[1] += (g + ks[J] * q) * (g + ks[J] * q);
            F[2] += g * g;
        }
        F[3] = t * H.dt * H.dt;
        for (int m = 0; m < 4; ++m) {
            I[m].add(nodes[n].weight * F[m]);
            if (n == 0) first[m] = F[m];
            last[m] = F[m];
        }
    }
    bool on_plane = !opt.limit_mode && near_hyperplane(spec, x, opt.collar);
    for (int m = 0; m < 4; ++m) {
        double v = I[m].value();
        double e = tq.t_min * first[m] + last[m] * nodes.back().t + 1e-12 * v;
        out.value[m] = std::sqrt(std::max(v, 0.0));
        out.error[m] = std::sqrt(std::max(v, 0.0) + e) - out.value[m];
        if (on_plane && m < 2) out.value[m] = out.error[m] = NAN;
    }
    return out;
}

SquareFunctionSample vertical_square_function(const TestFunction& f, std::span<const double> x, SquareMode mode,
                                              const KernelSpec& spec, const TimeQuadrature& tq,
                                              const SpatialOptions& opt) {
    if (mode == SquareMode::horizontal) throw InvalidArgument("horizontal is not a vertical square function");
    if ((mode == SquareMode::gamma || mode == SquareMode::dunkl_grad) && !opt.limit_mode &&
        near_hyperplane(spec, x, opt.collar))
        throw DomainError(std::string(mode_name(mode)) + " square function at a point on a reflection hyperplane");
    return square_functions(f, x, spec, tq, opt).sample(mode);
}

SquareFunctionSample horizontal_square_function(const TestFunction& f, std::span<const double> x,
                                                const KernelSpec& spec, const TimeQuadrature& tq,
                                                const SpatialOptions& opt) {
    return square_functions(f, x, spec, tq, opt).sample(SquareMode::horizontal);
}

Vec SampledField::point(std::size_t i) const {
    Vec p(axes.size());
    for (std::size_t j = axes.size(); j-- > 0;) {
        std::size_t n = axes[j].size();
        p[j] = axes[j][i % n];
        i /= n;
    }
    return p;
}

LevelSetMeasure superlevel_measure(const SampledField& field, double lambda, const WeightedDensity& W) {
    if (!(lambda > 0.0)) throw InvalidArgument("level must be positive");
    std::size_t d = field.axes.size();
    if (static_cast<int>(d) != W.dim()) throw InvalidArgument("field dimension does not match the measure");
    std::size_t total = 1;
    for (const auto& a : field.axes) {
        if (a.size() < 2) throw InvalidArgument("each grid axis needs at least two points");
        total *= a.size();
    }
    if (total != field.values.size()) throw InvalidArgument("field value count does not match the grid");
    LevelSetMeasure out;
    bool boundary_hit = false;
    for (std::size_t i = 0; i < total; ++i) {
        if (!(field.values[i] > lambda)) continue;
        std::size_t r = i;
        for (std::size_t j = d; j-- > 0;) {
            std::size_t n = field.axes[j].size(), k = r % n;
            if (k == 0 || k == n - 1) boundary_hit = true;
            r /= n;
        }
    }
    auto cell_measure = [&](const Vec& lo, const Vec& hi) {
        if (W.axis_kappas()) return W.box_measure(lo, hi);
        return integrate_box([](std::span<const double>) { return 1.0; }, lo, hi, W).value;
    };
    std::size_t corners = std::size_t{1} << d;
    std::size_t ncells = 1;
    for (const auto& a : field.axes) ncells *= a.size() - 1;
    std::vector<std::size_t> cell(d);
    for (std::size_t ci = 0; ci < ncells; ++ci) {
        std::size_t r = ci;
        for (std::size_t j = d; j-- > 0;) {
            cell[j] = r % (field.axes[j].size() - 1);
            r /= field.axes[j].size() - 1;
        }
        Vec lo(d), hi(d);
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = field.axes[j][cell[j]];
            hi[j] = field.axes[j][cell[j] + 1];
        }
        int above = 0;
        double vlo = 0.0, vhi = 0.0;
        for (std::size_t c = 0; c < corners; ++c) {
            std::size_t flat = 0;
            for (std::size_t j = 0; j < d; ++j) flat = flat * field.axes[j].size() + cell[j] + ((c >> (d - 1 - j)) & 1);
            double v = field.values[flat];
            if (c == 0) vlo = v;
            if (c == 1) vhi = v;
            if (v > lambda) ++above;
        }
        if (above == 0) continue;
        double mu = cell_measure(lo, hi);
        out.outer += mu;
        if (above == static_cast<int>(corners)) {
            out.inner += mu;
            out.value += mu;
        } else if (d == 1) {
            // linear crossing inside the cell
            double s = (lambda - vlo) / (vhi - vlo);
            double xc = lo[0] + s * (hi[0] - lo[0]);
            Vec a = lo, b = hi;
            if (vlo > lambda)
                b[0] = xc;
            else
                a[0] = xc;
            out.value += cell_measure(a, b);
        } else {
            out.value += mu * above / static_cast<double>(corners);
        }
    }
    std::ostringstream warn;
    if (out.outer > 0.0 && out.outer - out.inner > 0.2 * out.outer) {
        out.resolved = false;
        warn << "level set unresolved at lambda=" << lambda << ": inner " << out.inner << ", outer " << out.outer;
    }
    if (boundary_hit) {
        out.resolved = false;
        if (!warn.str().empty()) warn << "; ";
        warn << "level set reaches the grid boundary at lambda=" << lambda;
    }
    out.warning = warn.str();
    return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    int T = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (T <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (int k = 0; k < T; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace dunkl
