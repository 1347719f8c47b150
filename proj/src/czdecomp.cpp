#include "dunkl/czdecomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dunkl/error.hpp"

namespace dunkl {

namespace {

double axis_weight(double kappa, double u) {
    if (kappa == 0.0) return 1.0;
    return std::pow(std::sqrt(2.0) * std::abs(u), 2.0 * kappa);
}

// Sums over the finest cells of a step function, per dyadic cube.
struct CellTable {
    const StepFunction& f;
    std::vector<double> mu, absf, sf;  // per finest cell: mu, |f| mu, f mu

    CellTable(const StepFunction& fn, const WeightedDensity& W) : f(fn) {
        std::size_t n = f.cell_count();
        mu.resize(n);
        absf.resize(n);
        sf.resize(n);
        double h = f.cell_side();
        for (std::size_t i = 0; i < n; ++i) {
            Vec lo = f.cell_lo(i), hi = lo;
            for (auto& v : hi) v += h;
            mu[i] = box_mu(lo, hi, W);
            absf[i] = std::abs(f.cell_value(i)) * mu[i];
            sf[i] = f.cell_value(i) * mu[i];
        }
    }

    // Calls fn(flat) for each finest cell inside the cube.
    template <class Fn>
    void for_cells(const DyadicCube& Q, Fn&& fn) const {
        int d = f.dim();
        long span = 1L << (f.depth() - Q.generation);
        long n = f.cells_per_axis();
        std::vector<long> k(static_cast<std::size_t>(d), 0);
        while (true) {
            std::size_t flat = 0;
            for (int j = 0; j < d; ++j)
                flat = flat * static_cast<std::size_t>(n) +
                       static_cast<std::size_t>(Q.index[static_cast<std::size_t>(j)] * span + k[static_cast<std::size_t>(j)]);
            fn(flat);
            int j = d - 1;
            while (j >= 0 && ++k[static_cast<std::size_t>(j)] == span) {
                k[static_cast<std::size_t>(j)] = 0;
                --j;
            }
            if (j < 0) break;
        }
    }

    struct Sums {
        double mu = 0.0, absf = 0.0, sf = 0.0;
    };
    Sums sums(const DyadicCube& Q) const {
        CompensatedSum a, b, c;
        for_cells(Q, [&](std::size_t i) {
            a.add(mu[i]);
            b.add(absf[i]);
            c.add(sf[i]);
        });
        return {a.value(), b.value(), c.value()};
    }
};

DyadicCube make_cube(const StepFunction& f, int gen, std::vector<long> index) {
    DyadicCube Q;
    Q.generation = gen;
    Q.index = std::move(index);
    Q.side = f.side() / static_cast<double>(1L << gen);
    Q.lo = f.lo();
    for (std::size_t j = 0; j < Q.lo.size(); ++j) Q.lo[j] += static_cast<double>(Q.index[j]) * Q.side;
    return Q;
}

std::vector<DyadicCube> children(const StepFunction& f, const DyadicCube& Q) {
    int d = f.dim();
    std::vector<DyadicCube> out;
    for (long c = 0; c < (1L << d); ++c) {
        std::vector<long> idx(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) idx[static_cast<std::size_t>(j)] = 2 * Q.index[static_cast<std::size_t>(j)] + ((c >> (d - 1 - j)) & 1);
        out.push_back(make_cube(f, Q.generation + 1, idx));
    }
    return out;
}

std::vector<double> merged_breaks(const MaximalData& v, int axis, double extra) {
    std::vector<double> b;
    if (static_cast<std::size_t>(axis) < v.breaks.size()) b = v.breaks[static_cast<std::size_t>(axis)];
    b.push_back(v.lo[static_cast<std::size_t>(axis)]);
    b.push_back(v.hi[static_cast<std::size_t>(axis)]);
    b.push_back(extra);
    return b;
}

}  // namespace

StepFunction::StepFunction(Vec lo, double side, int depth, std::vector<double> values)
    : lo_(std::move(lo)), side_(side), depth_(depth), values_(std::move(values)) {
    if (!(side > 0.0)) throw InvalidArgument("step function root side must be positive");
    if (depth < 0 || depth > 20) throw InvalidArgument("step function depth out of range");
    std::size_t n = 1;
    for (std::size_t j = 0; j < lo_.size(); ++j) n *= static_cast<std::size_t>(cells_per_axis());
    if (values_.size() != n) throw InvalidArgument("step function needs 2^(depth*dim) values");
}

StepFunction StepFunction::sample(const FnD& f, Vec lo, double side, int depth) {
    std::size_t d = lo.size();
    std::size_t n = 1;
    for (std::size_t j = 0; j < d; ++j) n *= std::size_t{1} << depth;
    StepFunction s(lo, side, depth, std::vector<double>(n, 0.0));
    double h = s.cell_side();
    for (std::size_t i = 0; i < n; ++i) {
        Vec c = s.cell_lo(i);
        for (auto& v : c) v += 0.5 * h;
        s.values_[i] = f(c);
    }
    return s;
}

StepFunction StepFunction::random(int dim, Vec lo, double side, int depth, std::mt19937_64& rng) {
    std::size_t n = 1;
    for (int j = 0; j < dim; ++j) n *= std::size_t{1} << depth;
    StepFunction s(lo, side, depth, std::vector<double>(n, 0.0));
    std::uniform_int_distribution<int> nb(1, 5), gen(1, depth);
    std::uniform_real_distribution<double> mag(-1.0, 1.0);
    std::bernoulli_distribution neg(0.3);
    int blocks = nb(rng);
    for (int b = 0; b < blocks; ++b) {
        int g = gen(rng);
        std::vector<long> idx(static_cast<std::size_t>(dim));
        for (auto& v : idx) v = std::uniform_int_distribution<long>(0, (1L << g) - 1)(rng);
        double height = std::pow(10.0, mag(rng)) * (neg(rng) ? -1.0 : 1.0);
        DyadicCube Q = make_cube(s, g, idx);
        for (std::size_t i = 0; i < n; ++i)
            if (Q.contains_cell(s.cell_index(i), depth)) s.values_[i] += height;
    }
    return s;
}

std::vector<long> StepFunction::cell_index(std::size_t flat) const {
    std::vector<long> k(lo_.size());
    long n = cells_per_axis();
    for (std::size_t j = lo_.size(); j-- > 0;) {
        k[j] = static_cast<long>(flat % static_cast<std::size_t>(n));
        flat /= static_cast<std::size_t>(n);
    }
    return k;
}

Vec StepFunction::cell_lo(std::size_t flat) const {
    auto k = cell_index(flat);
    Vec v = lo_;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += static_cast<double>(k[j]) * cell_side();
    return v;
}

double StepFunction::operator()(std::span<const double> y) const {
    long n = cells_per_axis();
    std::size_t flat = 0;
    for (std::size_t j = 0; j < lo_.size(); ++j) {
        double u = (y[j] - lo_[j]) / cell_side();
        if (!(u >= 0.0) || u >= static_cast<double>(n)) return 0.0;
        flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(std::min(static_cast<long>(u), n - 1));
    }
    return values_[flat];
}

double StepFunction::l1(const WeightedDensity& W) const {
    CompensatedSum s;
    double h = cell_side();
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] == 0.0) continue;
        Vec lo = cell_lo(i), hi = lo;
        for (auto& v : hi) v += h;
        s.add(std::abs(values_[i]) * box_mu(lo, hi, W));
    }
    return s.value();
}

AxisBreaks StepFunction::breaks() const {
    AxisBreaks b(lo_.size());
    for (std::size_t j = 0; j < lo_.size(); ++j)
        for (long k = 0; k <= cells_per_axis(); ++k) b[j].push_back(lo_[j] + static_cast<double>(k) * cell_side());
    return b;
}

bool DyadicCube::contains(std::span<const double> y) const {
    for (std::size_t j = 0; j < lo.size(); ++j)
        if (!(y[j] >= lo[j] && y[j] < lo[j] + side)) return false;
    return true;
}

bool DyadicCube::contains_cell(const std::vector<long>& cell, int depth) const {
    int shift = depth - generation;
    if (shift < 0) return false;
    for (std::size_t j = 0; j < index.size(); ++j)
        if ((cell[j] >> shift) != index[j]) return false;
    return true;
}

double box_mu(std::span<const double> lo, std::span<const double> hi, const WeightedDensity& W) {
    if (W.axis_kappas()) return W.box_measure(lo, hi);
    QuadratureGrid g;
    return integrate_box([](std::span<const double>) { return 1.0; }, lo, hi, W, g).value;
}

double CZResult::bad_value(std::size_t i, std::span<const double> y) const {
    const BadPart& b = bad.at(i);
    if (!b.cube.contains(y)) return 0.0;
    double v = f(y);
    return mode == BadPartMode::plain ? v : v - b.average;
}

CZResult cz_decompose(const StepFunction& f, double lambda, const WeightedDensity& W, const CZOptions& opt) {
    if (f.dim() != W.dim()) throw InvalidArgument("step function dimension does not match the measure");
    if (!(lambda > 0.0)) throw InvalidArgument("threshold must be positive");
    CellTable T(f, W);
    CZResult r;
    r.lambda = lambda;
    r.mode = opt.mode;
    r.f = f;
    int d = f.dim();
    int max_gen = f.depth();
    int selected_at_max = 0, strict_top = 0;
    double mass_at_max = 0.0;

    auto select = [&](const DyadicCube& Q, const CellTable::Sums& s, double parent_mu) {
        BadPart b;
        b.cube = Q;
        b.cube.measure = s.mu;
        b.average = s.sf / s.mu;
        b.abs_average = s.absf / s.mu;
        b.parent_ratio = parent_mu > 0.0 ? parent_mu / s.mu : 1.0;
        b.t = 0.25 * Q.side * Q.side;
        if (Q.generation == max_gen) {
            ++selected_at_max;
            mass_at_max += s.absf;
        }
        r.bad.push_back(b);
    };
    auto descend = [&](auto&& self, const DyadicCube& Q, double q_mu) -> void {
        if (Q.generation >= max_gen) return;
        for (auto& c : children(f, Q)) {
            auto s = T.sums(c);
            if (s.mu <= 0.0) continue;
            r.max_tree_ratio = std::max(r.max_tree_ratio, q_mu / s.mu);
            if (s.absf / s.mu > lambda)
                select(c, s, q_mu);
            else
                self(self, c, s.mu);
        }
    };

    if (!opt.paper_strict) {
        DyadicCube root = make_cube(f, 0, std::vector<long>(static_cast<std::size_t>(d), 0));
        auto s = T.sums(root);
        double avg = s.absf / s.mu;
        if (lambda < avg) {
            std::ostringstream os;
            os << "threshold " << lambda << " is below the root average " << avg;
            throw ThresholdTooSmall(os.str());
        }
        descend(descend, root, s.mu);
    } else {
        int g0 = 0;
        while (f.side() / static_cast<double>(1L << g0) > 2.0 && g0 < max_gen) ++g0;
        long n = 1L << g0;
        std::vector<long> idx(static_cast<std::size_t>(d), 0);
        while (true) {
            DyadicCube Q = make_cube(f, g0, idx);
            auto s = T.sums(Q);
            if (s.mu > 0.0) {
                if (s.absf / s.mu > lambda) {
                    select(Q, s, 0.0);
                    ++strict_top;
                } else {
                    descend(descend, Q, s.mu);
                }
            }
            int j = d - 1;
            while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == n) {
                idx[static_cast<std::size_t>(j)] = 0;
                --j;
            }
            if (j < 0) break;
        }
    }

    std::vector<double> gv = f.values();
    std::vector<int> cover(f.cell_count(), 0);
    for (auto& b : r.bad) {
        CompensatedSum l1;
        T.for_cells(b.cube, [&](std::size_t i) {
            ++cover[i];
            double fv = f.cell_value(i);
            if (r.mode == BadPartMode::plain) {
                gv[i] = 0.0;
                l1.add(T.absf[i]);
            } else {
                gv[i] = b.average;
                l1.add(std::abs(fv - b.average) * T.mu[i]);
            }
        });
        b.l1 = l1.value();
        r.sum_mu += b.cube.measure;
    }
    r.g = StepFunction(f.lo(), f.side(), f.depth(), gv);
    for (std::size_t i = 0; i < gv.size(); ++i) {
        if (T.mu[i] > 0.0) r.ess_sup_g = std::max(r.ess_sup_g, std::abs(gv[i]));
        r.overlap = std::max(r.overlap, cover[i]);
    }
    r.f_l1 = 0.0;
    for (double a : T.absf) r.f_l1 += a;
    if (selected_at_max > 0) {
        std::ostringstream os;
        os << selected_at_max << " cubes selected at the maximum depth (mass " << mass_at_max
           << "); the data is not resolved below the grid";
        r.warnings.push_back(os.str());
    }
    if (strict_top > 0) {
        std::ostringstream os;
        os << strict_top << " top cubes of side <= 2 exceed lambda and were selected whole";
        r.warnings.push_back(os.str());
    }
    return r;
}

CZPropertyReport verify_cz_properties(const CZResult& r, const WeightedDensity& W) {
    CZPropertyReport rep;
    const StepFunction& f = r.f;
    double doubling = 1.0;
    for (const auto& b : r.bad) doubling = std::max(doubling, b.parent_ratio);
    bool plain = r.mode == BadPartMode::plain;
    rep.bound = doubling;
    const double slack = 1.0 + 1e-12;

    rep.c_a = r.ess_sup_g / r.lambda;
    rep.a = rep.c_a <= (plain ? 1.0 : doubling) * slack;

    bool support_ok = true;
    for (std::size_t i = 0; i < r.bad.size(); ++i) {
        const auto& b = r.bad[i];
        rep.c_b = std::max(rep.c_b, b.l1 / (r.lambda * b.cube.measure));
        for (std::size_t c = 0; c < f.cell_count(); ++c) {
            if (b.cube.contains_cell(f.cell_index(c), f.depth())) continue;
            Vec y = f.cell_lo(c);
            for (auto& v : y) v += 0.5 * f.cell_side();
            if (r.bad_value(i, y) != 0.0) support_ok = false;
        }
    }
    rep.b = support_ok && rep.c_b <= (plain ? 1.0 : 2.0) * doubling * slack;

    rep.c_c = r.f_l1 > 0.0 ? r.sum_mu * r.lambda / r.f_l1 : 0.0;
    rep.c = rep.c_c <= slack;

    bool disjoint = true;
    for (std::size_t i = 0; i < r.bad.size(); ++i)
        for (std::size_t j = i + 1; j < r.bad.size(); ++j) {
            const auto& A = r.bad[i].cube;
            const auto& B = r.bad[j].cube;
            const auto& fine = A.generation >= B.generation ? A : B;
            const auto& coarse = A.generation >= B.generation ? B : A;
            if (coarse.contains_cell(fine.index, fine.generation)) disjoint = false;
        }
    rep.overlap = r.overlap;
    rep.d = disjoint && r.overlap <= 1;

    double fmax = 0.0;
    for (std::size_t c = 0; c < f.cell_count(); ++c) {
        Vec y = f.cell_lo(c);
        for (auto& v : y) v += 0.5 * f.cell_side();
        double s = r.g(y);
        for (std::size_t i = 0; i < r.bad.size(); ++i) s += r.bad_value(i, y);
        rep.reconstruction_residual = std::max(rep.reconstruction_residual, std::abs(s - f(y)));
        fmax = std::max(fmax, std::abs(f(y)));
    }
    double tol = plain ? 0.0 : 4.0 * std::numeric_limits<double>::epsilon() * fmax;
    rep.reconstruction = rep.reconstruction_residual <= tol;
    (void)W;
    return rep;
}

MaximalData maximal_data(const TestFunction& f) {
    return {[f](std::span<const double> y) { return f(y); }, f.support_lo(), f.support_hi(), f.breaks()};
}

MaximalData maximal_data(const StepFunction& f) {
    Vec hi = f.lo();
    for (auto& v : hi) v += f.side();
    return {[f](std::span<const double> y) { return f(y); }, f.lo(), hi, f.breaks()};
}

MaximalValue hl_maximal(const MaximalData& v, std::span<const double> x, const WeightedDensity& W,
                        const RadiusGrid& grid) {
    int d = W.dim();
    if (static_cast<int>(x.size()) != d) throw InvalidArgument("maximal operator point dimension mismatch");
    // radius that covers the support box from x
    double rmax2 = 0.0;
    for (int j = 0; j < d; ++j) {
        std::size_t J = static_cast<std::size_t>(j);
        double e = std::max(std::abs(x[J] - v.lo[J]), std::abs(x[J] - v.hi[J]));
        rmax2 += e * e;
    }
    double r_max = std::sqrt(rmax2) * (1.0 + 1e-9);
    if (!(r_max > 0.0)) return {};
    double r_min = r_max * std::pow(10.0, -grid.decades);
    std::vector<double> radii;
    int n = grid.per_decade * grid.decades;
    for (int k = 0; k <= n; ++k) radii.push_back(r_min * std::pow(10.0, static_cast<double>(k) / grid.per_decade));
    if (grid.critical) {
        for (int j = 0; j < d; ++j)
            for (double b : merged_breaks(v, j, 0.0)) {
                double r = std::abs(x[static_cast<std::size_t>(j)] - b);
                if (r > r_min && r < r_max) {
                    radii.push_back(r);
                    radii.push_back(r * (1.0 + 1e-9));
                }
            }
    }
    FnD absf = [&](std::span<const double> y) { return std::abs(v.f(y)); };
    AdaptiveOptions opt{1e-14, 1e-10, 4000};
    QuadratureGrid qg;
    qg.options = opt;
    MaximalValue best;
    for (double r : radii) {
        double mass, vol;
        if (d == 1) {
            double k = (*W.axis_kappas())[0];
            double a = std::max(x[0] - r, v.lo[0]), b = std::min(x[0] + r, v.hi[0]);
            mass = b > a ? integrate_adaptive([&](double y) { return std::abs(v.f(std::span<const double>(&y, 1))) * axis_weight(k, y); },
                                              a, b, merged_breaks(v, 0, 0.0), opt)
                               .value
                         : 0.0;
            vol = W.axis_measure(0, x[0] - r, x[0] + r);
        } else {
            mass = integrate_ball(&absf, x, r, W, qg, v.breaks).value;
            vol = ball_volume(x, r, W, qg).value;
        }
        double avg = mass / vol;
        if (avg > best.value) best = {avg, r};
    }
    return best;
}

Claim34Result claim34_ratio(const TestFunction& v, double t, std::span<const double> x, const KernelSpec& spec,
                            const Claim34Options& opt) {
    int d = spec.dim();
    if (!(t > 0.0)) throw InvalidArgument("claim (3.4) probe needs t > 0");
    double r = std::sqrt(t);
    int n = std::max(2, opt.samples);
    std::vector<Vec> pts;
    std::vector<int> k(static_cast<std::size_t>(d), 0);
    while (true) {
        Vec p(static_cast<std::size_t>(d));
        double dist2 = 0.0;
        for (int j = 0; j < d; ++j) {
            double u = -1.0 + 2.0 * k[static_cast<std::size_t>(j)] / (n - 1);
            p[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + r * u;
            dist2 += u * u;
        }
        if (dist2 <= 1.0 + 1e-12) pts.push_back(p);
        int j = d - 1;
        while (j >= 0 && ++k[static_cast<std::size_t>(j)] == n) {
            k[static_cast<std::size_t>(j)] = 0;
            --j;
        }
        if (j < 0) break;
    }
    Claim34Result out;
    for (const auto& y : pts) {
        double h = heat_flow(v, t, y, spec).value;
        if (h > out.lhs) {
            out.lhs = h;
            out.argmax_y = y;
        }
    }
    MaximalData md = maximal_data(v);
    const auto& G = spec.group();
    for (std::size_t g = 0; g < G.order(); ++g) {
        double inf = INFINITY;
        for (const auto& z : pts) inf = std::min(inf, hl_maximal(md, G.apply(g, z), spec.density(), opt.radii).value);
        out.rhs += inf;
    }
    out.ratio = out.lhs / out.rhs;
    return out;
}

double maximal_l2_ratio(const TestFunction& v, const WeightedDensity& W, const RadiusGrid& grid) {
    if (W.dim() != 1) throw UnsupportedVariant("maximal L2 ratio is implemented in one dimension");
    double lo = v.support_lo()[0], hi = v.support_hi()[0];
    double c = 0.5 * (lo + hi), s = 0.5 * (hi - lo);
    MaximalData md = maximal_data(v);
    const GaussRule& G = gauss_legendre(16);
    CompensatedSum num;
    // x = c +- s u / (1 - u), u in (0, 1), panels split where x = 0 and at the support edge
    for (int side : {-1, 1}) {
        std::vector<double> cuts{0.0, 0.5, 1.0};
        double z = side * (0.0 - c);
        if (z > 0.0) cuts.push_back(z / (s + z));
        for (int p = 1; p <= 7; ++p) cuts.push_back(1.0 - std::pow(0.5, p + 1));
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            double a = cuts[i], b = cuts[i + 1];
            if (!(b > a)) continue;
            for (std::size_t q = 0; q < G.nodes.size(); ++q) {
                double u = 0.5 * (a + b) + 0.5 * (b - a) * G.nodes[q];
                double x = c + side * s * u / (1.0 - u);
                double jac = s / ((1.0 - u) * (1.0 - u));
                double m = hl_maximal(md, std::span<const double>(&x, 1), W, grid).value;
                double k = (*W.axis_kappas())[0];
                num.add(0.5 * (b - a) * G.weights[q] * jac * m * m * axis_weight(k, x));
            }
        }
    }
    Estimate den = integrate_box([&](std::span<const double> y) { double f = v(y); return f * f; }, v.support_lo(),
                                 v.support_hi(), W, {}, v.breaks());
    return std::sqrt(num.value() / den.value);
}

}  // namespace dunkl
