#include "dunkl/rootsys.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "dunkl/error.hpp"

namespace dunkl {

namespace {

constexpr double kRootTol = 1e-9;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool same_vec(std::span<const double> a, std::span<const double> b, double tol = kRootTol) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

Vec negate(const Vec& v) {
    Vec r(v);
    for (auto& c : r) c = -c;
    return r;
}

Root make_root(std::vector<Rational> dir, const Rational& kappa) {
    Rational n2 = 0;
    for (const auto& c : dir) n2 += c * c;
    if (n2 == 0) throw InvalidArgument("zero root vector");
    double s = std::sqrt(2.0 / n2.get_d());
    Root r;
    r.vec.resize(dir.size());
    for (std::size_t i = 0; i < dir.size(); ++i) r.vec[i] = dir[i].get_d() * s;
    r.direction = std::move(dir);
    r.kappa = kappa.get_d();
    r.kappa_exact = kappa;
    return r;
}

Root make_float_root(Vec v, double kappa, std::optional<Rational> kappa_exact) {
    double n = norm(v);
    if (n == 0.0) throw InvalidArgument("zero root vector");
    for (auto& c : v) c *= std::sqrt(2.0) / n;
    Root r;
    r.vec = std::move(v);
    r.kappa = kappa;
    r.kappa_exact = std::move(kappa_exact);
    return r;
}

std::vector<Rational> unit(int d, int j) {
    std::vector<Rational> e(static_cast<std::size_t>(d), Rational(0));
    e[static_cast<std::size_t>(j)] = 1;
    return e;
}

// Index of the positive root equal to +-v, or -1.
int find_root(const std::vector<Root>& pos, std::span<const double> v) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (same_vec(pos[i].vec, v)) return static_cast<int>(i);
        Vec n = negate(pos[i].vec);
        if (same_vec(n, v)) return static_cast<int>(i);
    }
    return -1;
}

// Orbit label per positive root under the reflections, labels in order of first appearance.
std::vector<int> root_orbits(const std::vector<Root>& pos) {
    std::vector<int> label(pos.size(), -1);
    int next = 0;
    for (std::size_t s = 0; s < pos.size(); ++s) {
        if (label[s] >= 0) continue;
        std::deque<std::size_t> queue{s};
        label[s] = next;
        while (!queue.empty()) {
            std::size_t i = queue.front();
            queue.pop_front();
            for (const auto& beta : pos) {
                Vec img = reflect(beta.vec, pos[i].vec);
                int k = find_root(pos, img);
                if (k >= 0 && label[static_cast<std::size_t>(k)] < 0) {
                    label[static_cast<std::size_t>(k)] = next;
                    queue.push_back(static_cast<std::size_t>(k));
                }
            }
        }
        ++next;
    }
    return label;
}

int parse_int(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("expected an integer for " + context + ", got '" + s + "'");
    }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double max_entry_distance(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

Vec reflect(std::span<const double> alpha, std::span<const double> x) {
    double a2 = dot(alpha, alpha);
    if (a2 == 0.0) throw InvalidArgument("reflect: zero root vector");
    double c = 2.0 * dot(alpha, x) / a2;
    Vec r(x.begin(), x.end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * alpha[i];
    return r;
}

Matrix reflection_matrix(std::span<const double> alpha) {
    int n = static_cast<int>(alpha.size());
    double a2 = dot(alpha, alpha);
    if (a2 == 0.0) throw InvalidArgument("reflection_matrix: zero root vector");
    Matrix m = Matrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) -= 2.0 * alpha[static_cast<std::size_t>(i)] * alpha[static_cast<std::size_t>(j)] / a2;
    return m;
}

RationalMatrix reflection_matrix(std::span<const Rational> alpha) {
    int n = static_cast<int>(alpha.size());
    Rational a2 = 0;
    for (const auto& c : alpha) a2 += c * c;
    if (a2 == 0) throw InvalidArgument("reflection_matrix: zero root vector");
    RationalMatrix m = RationalMatrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rational v = 2 * alpha[static_cast<std::size_t>(i)] * alpha[static_cast<std::size_t>(j)] / a2;
            m(i, j) -= v;
        }
    return m;
}

// ---------------------------------------------------------------------------
// RootSystem

RootSystem::RootSystem(int dim, std::vector<Root> positive_roots, std::string name)
    : dim_(dim), positive_(std::move(positive_roots)), name_(std::move(name)) {
    if (dim_ <= 0) throw InvalidArgument("root system dimension must be positive");
    for (const auto& r : positive_) {
        if (static_cast<int>(r.vec.size()) != dim_) throw InvalidArgument("root has wrong dimension");
        if (std::abs(dot(r.vec, r.vec) - 2.0) > kRootTol) throw InvalidArgument("root does not satisfy |alpha|^2 = 2");
        if (r.kappa < 0.0 || !std::isfinite(r.kappa)) throw InvalidArgument("multiplicity must be nonnegative");
        if (r.direction) {
            if (static_cast<int>(r.direction->size()) != dim_) throw InvalidArgument("root direction has wrong dimension");
            // direction must be parallel to vec: vec = s*dir for some s > 0
            double s = 0.0;
            for (std::size_t i = 0; i < r.vec.size(); ++i)
                if ((*r.direction)[i] != 0) {
                    s = r.vec[i] / (*r.direction)[i].get_d();
                    break;
                }
            for (std::size_t i = 0; i < r.vec.size(); ++i)
                if (std::abs(r.vec[i] - s * (*r.direction)[i].get_d()) > kRootTol || s <= 0.0)
                    throw InvalidArgument("root direction is not parallel to the root");
        }
    }
    // R alpha meets R only in +-alpha: no two positive roots are parallel.
    for (std::size_t i = 0; i < positive_.size(); ++i)
        for (std::size_t j = i + 1; j < positive_.size(); ++j) {
            double c = dot(positive_[i].vec, positive_[j].vec) / 2.0;
            if (std::abs(std::abs(c) - 1.0) < kRootTol) throw InvalidArgument("two roots are parallel (R alpha must meet R only in +-alpha)");
        }
    // r_alpha(R) = R and G-invariance of kappa.
    for (const auto& beta : positive_)
        for (const auto& alpha : positive_) {
            Vec img = reflect(beta.vec, alpha.vec);
            int k = find_root(positive_, img);
            if (k < 0) throw InvalidArgument("root set is not closed under its reflections");
            if (std::abs(positive_[static_cast<std::size_t>(k)].kappa - alpha.kappa) > kRootTol)
                throw InvalidArgument("multiplicity is not invariant under the reflection group");
        }
}

std::vector<Vec> RootSystem::roots() const {
    std::vector<Vec> all;
    all.reserve(2 * positive_.size());
    for (const auto& r : positive_) {
        all.push_back(r.vec);
        all.push_back(negate(r.vec));
    }
    return all;
}

bool RootSystem::exact() const {
    return std::all_of(positive_.begin(), positive_.end(),
                       [](const Root& r) { return r.direction.has_value() && r.kappa_exact.has_value(); });
}

double RootSystem::chi() const {
    double s = 0.0;
    for (const auto& r : positive_) s += r.kappa;
    return s;
}

bool RootSystem::kappa_is_zero() const {
    return std::all_of(positive_.begin(), positive_.end(), [](const Root& r) { return r.kappa == 0.0; });
}

std::optional<std::vector<double>> RootSystem::axis_kappas() const {
    std::vector<double> k(static_cast<std::size_t>(dim_), 0.0);
    for (const auto& r : positive_) {
        int axis = -1;
        for (int i = 0; i < dim_; ++i) {
            double c = r.vec[static_cast<std::size_t>(i)];
            if (std::abs(c) > kRootTol) {
                if (axis >= 0) return std::nullopt;
                axis = i;
            }
        }
        k[static_cast<std::size_t>(axis)] = r.kappa;
    }
    return k;
}

RootSystem RootSystem::with_kappas(const std::vector<Rational>& kappas) const {
    std::vector<int> orbit = root_orbits(positive_);
    int n_orbits = positive_.empty() ? 0 : *std::max_element(orbit.begin(), orbit.end()) + 1;
    if (kappas.size() != 1 && static_cast<int>(kappas.size()) != n_orbits)
        throw InvalidArgument("expected 1 or " + std::to_string(n_orbits) + " multiplicities, got " +
                              std::to_string(kappas.size()));
    std::vector<Root> pos = positive_;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const Rational& k = kappas.size() == 1 ? kappas[0] : kappas[static_cast<std::size_t>(orbit[i])];
        if (k < 0) throw InvalidArgument("multiplicity must be nonnegative");
        pos[i].kappa = k.get_d();
        pos[i].kappa_exact = k;
    }
    return RootSystem(dim_, std::move(pos), name_);
}

// ---------------------------------------------------------------------------
// ReflectionGroup

ReflectionGroup ReflectionGroup::generate(const RootSystem& roots, std::size_t cap, double tol) {
    ReflectionGroup g;
    g.dim_ = roots.dim();
    const auto& pos = roots.positive_roots();
    bool exact = std::all_of(pos.begin(), pos.end(), [](const Root& r) { return r.direction.has_value(); });

    std::vector<Matrix> gens;
    std::vector<RationalMatrix> exact_gens;
    for (const auto& r : pos) {
        gens.push_back(reflection_matrix(r.vec));
        if (exact) exact_gens.push_back(reflection_matrix(std::span<const Rational>(*r.direction)));
    }

    g.elements_.push_back(Matrix::identity(g.dim_));
    g.words_.push_back({});
    if (exact) g.exact_elements_.push_back(RationalMatrix::identity(g.dim_));

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (std::size_t s = 0; s < gens.size(); ++s) {
            Matrix prod = gens[s] * g.elements_[cur];
            bool seen = false;
            for (const auto& e : g.elements_)
                if (max_entry_distance(e, prod) < tol) {
                    seen = true;
                    break;
                }
            if (seen) continue;
            if (g.elements_.size() >= cap)
                throw GroupNotFinite("reflection group closure exceeded " + std::to_string(cap) + " elements");
            g.elements_.push_back(std::move(prod));
            std::vector<int> w{static_cast<int>(s)};
            w.insert(w.end(), g.words_[cur].begin(), g.words_[cur].end());
            g.words_.push_back(std::move(w));
            if (exact) g.exact_elements_.push_back(exact_gens[s] * g.exact_elements_[cur]);
            queue.push_back(g.elements_.size() - 1);
        }
    }
    return g;
}

Vec ReflectionGroup::apply(std::size_t element, std::span<const double> x) const {
    return elements_[element].apply(x);
}

std::vector<Vec> ReflectionGroup::orbit(std::span<const double> x) const {
    std::vector<Vec> out;
    for (const auto& e : elements_) {
        Vec y = e.apply(x);
        bool dup = false;
        for (const auto& o : out)
            if (same_vec(o, y, 1e-12)) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(std::move(y));
    }
    return out;
}

double rho(const ReflectionGroup& group, std::span<const double> x, std::span<const double> y) {
    double best = std::numeric_limits<double>::infinity();
    Vec gy(y.size());
    for (const auto& e : group.elements()) {
        double s = 0.0;
        for (int i = 0; i < e.n; ++i) {
            double v = 0.0;
            for (int j = 0; j < e.n; ++j) v += e(i, j) * y[static_cast<std::size_t>(j)];
            double diff = x[static_cast<std::size_t>(i)] - v;
            s += diff * diff;
        }
        best = std::min(best, s);
    }
    return std::sqrt(best);
}

// ---------------------------------------------------------------------------
// WeightedDensity

WeightedDensity::WeightedDensity(RootSystem roots) : roots_(std::move(roots)) {
    chi_ = roots_.chi();
    axis_kappas_ = roots_.axis_kappas();
}

double WeightedDensity::operator()(std::span<const double> x) const {
    double w = 1.0;
    for (const auto& r : roots_.positive_roots()) {
        if (r.kappa == 0.0) continue;
        w *= std::pow(std::abs(dot(r.vec, x)), 2.0 * r.kappa);
    }
    return w;
}

double WeightedDensity::axis_measure(int axis, double lo, double hi) const {
    if (!axis_kappas_) throw UnsupportedVariant("closed-form axis measure needs a product weight");
    if (hi <= lo) return 0.0;
    double k = (*axis_kappas_)[static_cast<std::size_t>(axis)];
    if (k == 0.0) return hi - lo;
    // antiderivative of 2^k |u|^{2k}: 2^k sign(u)|u|^{2k+1}/(2k+1)
    auto F = [k](double u) {
        double a = std::pow(std::abs(u), 2.0 * k + 1.0) / (2.0 * k + 1.0);
        return u < 0 ? -a : a;
    };
    return std::pow(2.0, k) * (F(hi) - F(lo));
}

double WeightedDensity::box_measure(std::span<const double> lo, std::span<const double> hi) const {
    double m = 1.0;
    for (int j = 0; j < dim(); ++j) m *= axis_measure(j, lo[static_cast<std::size_t>(j)], hi[static_cast<std::size_t>(j)]);
    return m;
}

DunklSystem::DunklSystem(RootSystem r)
    : roots(std::move(r)), group(ReflectionGroup::generate(roots)), density(roots) {}

// ---------------------------------------------------------------------------
// Presets and files

std::vector<Rational> parse_rational_list(std::string_view text) {
    std::vector<Rational> out;
    std::string s(text);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (t.empty()) continue;
        out.push_back(parse_rational(t));
    }
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

RootSystem parse_preset(std::string_view spec_in, std::optional<std::string> kappa_override) {
    std::string spec = trim(spec_in);
    if (spec.rfind("file:", 0) == 0) {
        RootSystem r = load_root_system(spec.substr(5));
        if (kappa_override) r = r.with_kappas(parse_rational_list(*kappa_override));
        return r;
    }
    std::string name = spec, params;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        params = spec.substr(colon + 1);
    }
    std::optional<int> rank;
    std::optional<std::string> kappa_text;
    // kappa= swallows the remainder, since the list itself contains commas
    if (auto kp = params.find("kappa="); kp != std::string::npos) {
        kappa_text = params.substr(kp + 6);
        params = params.substr(0, kp);
    }
    std::replace(params.begin(), params.end(), ':', ',');
    std::stringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (t.empty()) continue;
        if (t.rfind("d=", 0) == 0)
            rank = parse_int(t.substr(2), "d");
        else if (std::isdigit(static_cast<unsigned char>(t[0])))
            rank = parse_int(t, "rank");
        else
            throw InvalidArgument("unknown preset parameter '" + t + "' in '" + spec + "'");
    }
    if (kappa_override) kappa_text = kappa_override;
    std::vector<Rational> kappas = kappa_text ? parse_rational_list(*kappa_text) : std::vector<Rational>{Rational(1)};

    auto need_rank = [&](const char* what) {
        if (!rank || *rank <= 0) throw InvalidArgument(std::string("preset ") + what + " needs a positive rank");
        return *rank;
    };

    if (name == "trivial") {
        int d = need_rank("trivial");
        return RootSystem(d, {}, "trivial:d=" + std::to_string(d));
    }
    if (name.rfind("z2", 0) == 0) {
        if (name.size() > 3 && name[2] == '^' && name.substr(3) != "d") rank = parse_int(name.substr(3), "z2 rank");
        if (!rank && name == "z2") rank = 1;
        int d = need_rank("z2");
        std::vector<Root> pos;
        for (int j = 0; j < d; ++j) pos.push_back(make_root(unit(d, j), Rational(0)));
        RootSystem r(d, std::move(pos), "z2^" + std::to_string(d));
        return r.with_kappas(kappas);
    }
    if (name == "a") {
        int n = need_rank("a");
        int d = n + 1;
        std::vector<Root> pos;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                std::vector<Rational> dir(static_cast<std::size_t>(d), Rational(0));
                dir[static_cast<std::size_t>(i)] = 1;
                dir[static_cast<std::size_t>(j)] = -1;
                pos.push_back(make_root(std::move(dir), Rational(0)));
            }
        RootSystem r(d, std::move(pos), "a:" + std::to_string(n));
        return r.with_kappas(kappas);
    }
    if (name == "b") {
        int d = need_rank("b");
        std::vector<Root> pos;
        for (int i = 0; i < d; ++i) pos.push_back(make_root(unit(d, i), Rational(0)));
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                for (int sgn : {-1, 1}) {
                    std::vector<Rational> dir(static_cast<std::size_t>(d), Rational(0));
                    dir[static_cast<std::size_t>(i)] = 1;
                    dir[static_cast<std::size_t>(j)] = sgn;
                    pos.push_back(make_root(std::move(dir), Rational(0)));
                }
        RootSystem r(d, std::move(pos), "b:" + std::to_string(d));
        return r.with_kappas(kappas);
    }
    if (name == "i2") {
        int m = need_rank("i2");
        std::vector<Root> pos;
        for (int k = 0; k < m; ++k) {
            double th = std::numbers::pi * k / m;
            pos.push_back(make_float_root({std::cos(th), std::sin(th)}, 0.0, Rational(0)));
        }
        RootSystem r(2, std::move(pos), "i2:" + std::to_string(m));
        return r.with_kappas(kappas);
    }
    throw InvalidArgument("unknown root-system preset '" + spec + "'");
}

RootSystem parse_root_system_text(std::string_view text, std::string name) {
    std::stringstream in{std::string(text)};
    std::string line;
    int dim = 0;
    int lineno = 0;
    std::vector<Root> pos;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        std::stringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };
        if (key == "dim") {
            std::string v;
            ls >> v;
            dim = parse_int(v, "dim" + where());
        } else if (key == "root") {
            if (dim <= 0) throw InvalidArgument("'dim' must precede roots" + where());
            std::vector<Rational> dir;
            std::string tok;
            Rational kappa = 0;
            bool have_kappa = false;
            while (ls >> tok) {
                if (tok == "kappa") {
                    std::string k;
                    if (!(ls >> k)) throw InvalidArgument("missing kappa value" + where());
                    kappa = parse_rational(k);
                    have_kappa = true;
                } else {
                    dir.push_back(parse_rational(tok));
                }
            }
            if (static_cast<int>(dir.size()) != dim) throw InvalidArgument("root has wrong number of coordinates" + where());
            if (!have_kappa) throw InvalidArgument("root without kappa" + where());
            pos.push_back(make_root(std::move(dir), kappa));
        } else {
            throw InvalidArgument("unknown keyword '" + key + "'" + where());
        }
    }
    if (dim <= 0) throw InvalidArgument("root-system file has no 'dim' line");
    return RootSystem(dim, std::move(pos), std::move(name));
}

RootSystem load_root_system(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot open root-system file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_root_system_text(ss.str(), "file:" + path);
}

}  // namespace dunkl
