#include "dunkl/dunklcalc.hpp"

#include <algorithm>
#include <cmath>

namespace dunkl {

namespace {

constexpr double kFloatTol = 1e-10;

template <class T>
bool negligible(const MultiPoly<T>& r, double scale) {
    if constexpr (std::is_same_v<T, Rational>) {
        (void)scale;
        return r.is_zero();
    } else {
        return r.max_abs_coeff() <= kFloatTol * std::max(1.0, scale);
    }
}

template <class T>
T from_rational(const Rational& q) {
    if constexpr (std::is_same_v<T, Rational>)
        return q;
    else
        return q.get_d();
}

}  // namespace

template <class T>
DunklCalculus<T>::DunklCalculus(const RootSystem& roots) : dim_(roots.dim()), chi_(0) {
    if (dim_ > kMaxPolyDim) throw InvalidArgument("Dunkl calculus supports dimension <= 4");
    constexpr bool exact = std::is_same_v<T, Rational>;
    if (exact && !roots.exact())
        throw UnsupportedVariant("exact calculus needs rational root directions and rational multiplicities");
    ReflectionGroup G = ReflectionGroup::generate(roots);
    for (const auto& r : roots.positive_roots()) {
        RootForm f;
        if constexpr (exact) {
            f.a = *r.direction;
            f.kappa = *r.kappa_exact;
            f.reflection = reflection_matrix(std::span<const Rational>(f.a));
        } else {
            f.a = r.vec;
            f.kappa = r.kappa;
            f.reflection = reflection_matrix(std::span<const double>(f.a));
        }
        T n2 = 0;
        for (const auto& c : f.a) n2 += c * c;
        f.half_norm2 = n2 / 2;
        chi_ += f.kappa;
        forms_.push_back(std::move(f));
    }
    if constexpr (exact)
        group_ = G.exact_elements();
    else
        group_ = G.elements();
}

template <class T>
void DunklCalculus<T>::check_degree(const MultiPoly<T>& p) const {
    if (p.dim() != dim_) throw InvalidArgument("polynomial dimension does not match the root system");
    if (p.degree() > kMaxExactDegree) throw InvalidArgument("polynomial degree exceeds the cap of 12");
}

template <class T>
bool DunklCalculus<T>::equal(const MultiPoly<T>& a, const MultiPoly<T>& b) const {
    if constexpr (std::is_same_v<T, Rational>) {
        return a == b;
    } else {
        return negligible(a - b, std::max(a.max_abs_coeff(), b.max_abs_coeff()));
    }
}

template <class T>
MultiPoly<T> DunklCalculus<T>::divided_difference(const MultiPoly<T>& p, std::size_t root) const {
    const RootForm& f = forms_.at(root);
    MultiPoly<T> diff = p - p.compose(f.reflection);
    MultiPoly<T> rem(dim_);
    MultiPoly<T> q = diff.divide_linear(f.a, &rem);
    if (!negligible(rem, p.max_abs_coeff()))
        throw ConsistencyError("nonzero remainder dividing p - p o r by <a,x> for p = " + p.str());
    return q;
}

template <class T>
MultiPoly<T> DunklCalculus<T>::dunkl_derivative(const MultiPoly<T>& p, std::span<const T> xi) const {
    check_degree(p);
    MultiPoly<T> r = p.directional_derivative(xi);
    for (std::size_t i = 0; i < forms_.size(); ++i) {
        const RootForm& f = forms_[i];
        if (coeff_is_zero(f.kappa)) continue;
        T ax = 0;
        for (int j = 0; j < dim_; ++j) ax += f.a[static_cast<std::size_t>(j)] * xi[static_cast<std::size_t>(j)];
        if (coeff_is_zero(ax)) continue;
        r += divided_difference(p, i) * T(f.kappa * ax);
    }
    return r;
}

template <class T>
MultiPoly<T> DunklCalculus<T>::dunkl_partial(const MultiPoly<T>& p, int j) const {
    std::vector<T> e(static_cast<std::size_t>(dim_), T(0));
    e[static_cast<std::size_t>(j)] = 1;
    return dunkl_derivative(p, e);
}

template <class T>
std::vector<MultiPoly<T>> DunklCalculus<T>::dunkl_gradient(const MultiPoly<T>& p) const {
    std::vector<MultiPoly<T>> g;
    for (int j = 0; j < dim_; ++j) g.push_back(dunkl_partial(p, j));
    return g;
}

template <class T>
MultiPoly<T> DunklCalculus<T>::laplacian_composed(const MultiPoly<T>& p) const {
    MultiPoly<T> r(dim_);
    for (int j = 0; j < dim_; ++j) r += dunkl_partial(dunkl_partial(p, j), j);
    return r;
}

template <class T>
MultiPoly<T> DunklCalculus<T>::laplacian_expanded(const MultiPoly<T>& p) const {
    check_degree(p);
    MultiPoly<T> r(dim_);
    for (int j = 0; j < dim_; ++j) r += p.derivative(j).derivative(j);
    for (std::size_t i = 0; i < forms_.size(); ++i) {
        const RootForm& f = forms_[i];
        if (coeff_is_zero(f.kappa)) continue;
        // <a,grad p>/<a,x> - (|a|^2/2)(p - p o r)/<a,x>^2, combined over one denominator
        MultiPoly<T> num = p.directional_derivative(f.a) - divided_difference(p, i) * f.half_norm2;
        MultiPoly<T> rem(dim_);
        MultiPoly<T> q = num.divide_linear(f.a, &rem);
        if (!negligible(rem, p.max_abs_coeff()))
            throw ConsistencyError("expanded Laplacian numerator not divisible by <a,x> for p = " + p.str());
        r += q * T(2 * f.kappa);
    }
    return r;
}

template <class T>
MultiPoly<T> DunklCalculus<T>::dunkl_laplacian(const MultiPoly<T>& p) const {
    MultiPoly<T> a = laplacian_composed(p);
    MultiPoly<T> b = laplacian_expanded(p);
    if (!equal(a, b))
        throw ConsistencyError("composed and expanded Dunkl Laplacians disagree for p = " + p.str());
    return a;
}

template <class T>
GammaValue<T> DunklCalculus<T>::gamma(const MultiPoly<T>& f, const MultiPoly<T>& g) const {
    check_degree(f);
    check_degree(g);
    GammaValue<T> v{MultiPoly<T>(dim_), MultiPoly<T>(dim_), MultiPoly<T>(dim_)};
    for (int j = 0; j < dim_; ++j) v.gradient += f.derivative(j) * g.derivative(j);
    for (std::size_t i = 0; i < forms_.size(); ++i) {
        const RootForm& rf = forms_[i];
        if (coeff_is_zero(rf.kappa)) continue;
        v.difference += divided_difference(f, i) * divided_difference(g, i) * T(rf.kappa * rf.half_norm2);
    }
    v.total = v.gradient + v.difference;
    return v;
}

template <class T>
MultiPoly<T> DunklCalculus<T>::gamma_defining(const MultiPoly<T>& f, const MultiPoly<T>& g) const {
    MultiPoly<T> r = dunkl_laplacian(f * g) - f * dunkl_laplacian(g) - g * dunkl_laplacian(f);
    return r * T(T(1) / T(2));
}

template <class T>
MultiPoly<T> DunklCalculus<T>::heat_poly(const MultiPoly<T>& p, const T& t) const {
    if (t < 0) throw InvalidArgument("heat_poly needs t >= 0");
    MultiPoly<T> r = p;
    MultiPoly<T> term = p;
    T factor = 1;
    for (int m = 1; !term.is_zero(); ++m) {
        term = dunkl_laplacian(term);
        if (term.is_zero()) break;
        factor = factor * t / T(m);
        r += term * factor;
    }
    return r;
}

template <class T>
MultiPoly<T> DunklCalculus<T>::reynolds(const MultiPoly<T>& p) const {
    MultiPoly<T> r(dim_);
    for (const auto& g : group_) r += p.compose(g);
    return r * T(T(1) / T(static_cast<long>(group_.size())));
}

template <class T>
T DunklCalculus<T>::dunkl_grad_sq_at(const MultiPoly<T>& p, std::span<const T> x) const {
    std::vector<T> v(static_cast<std::size_t>(dim_));
    for (int j = 0; j < dim_; ++j) v[static_cast<std::size_t>(j)] = p.derivative(j).evaluate(x);
    T px = p.evaluate(x);
    for (const auto& f : forms_) {
        if (coeff_is_zero(f.kappa)) continue;
        std::vector<T> rx = f.reflection.apply(x);
        T ax = 0;
        for (int j = 0; j < dim_; ++j) ax += f.a[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        if (coeff_is_zero(ax)) throw DomainError("point lies on a reflection hyperplane");
        T q = (px - p.evaluate(std::span<const T>(rx))) / ax;
        for (int j = 0; j < dim_; ++j) v[static_cast<std::size_t>(j)] += f.kappa * f.a[static_cast<std::size_t>(j)] * q;
    }
    T s = 0;
    for (const auto& c : v) s += c * c;
    return s;
}

template <class T>
T DunklCalculus<T>::gamma_at(const MultiPoly<T>& p, std::span<const T> x) const {
    T s = 0;
    for (int j = 0; j < dim_; ++j) {
        T d = p.derivative(j).evaluate(x);
        s += d * d;
    }
    T px = p.evaluate(x);
    for (const auto& f : forms_) {
        if (coeff_is_zero(f.kappa)) continue;
        std::vector<T> rx = f.reflection.apply(x);
        T ax = 0;
        for (int j = 0; j < dim_; ++j) ax += f.a[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        if (coeff_is_zero(ax)) throw DomainError("point lies on a reflection hyperplane");
        T q = (px - p.evaluate(std::span<const T>(rx))) / ax;
        s += f.kappa * f.half_norm2 * q * q;
    }
    return s;
}

template class DunklCalculus<Rational>;
template class DunklCalculus<double>;

RationalPoly random_poly(int dim, int max_degree, std::mt19937_64& rng, int max_terms) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 4);
    std::uniform_int_distribution<int> deg(0, max_degree);
    RationalPoly p(dim);
    int n = nterms(rng);
    for (int k = 0; k < n; ++k) {
        int total = deg(rng);
        std::array<int, kMaxPolyDim> e{};
        std::uniform_int_distribution<int> var(0, dim - 1);
        for (int s = 0; s < total; ++s) ++e[static_cast<std::size_t>(var(rng))];
        Rational c(num(rng), den(rng));
        c.canonicalize();
        p.add_term(Monomial::from(std::span<const int>(e.data(), static_cast<std::size_t>(dim))), c);
    }
    return p;
}

std::vector<Rational> random_rational_point(int dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n(-24, 24);
    std::vector<Rational> x;
    for (int i = 0; i < dim; ++i) {
        int v = 0;
        while (v == 0) v = n(rng);
        Rational q(v, 8);
        q.canonicalize();
        x.push_back(q);
    }
    return x;
}

}  // namespace dunkl
