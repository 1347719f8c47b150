#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dunkl/error.hpp"
#include "dunkl/rational.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

constexpr int kMaxPolyDim = 4;

// Exponent multi-index packed 8 bits per variable; x1 occupies the lowest byte.
struct Monomial {
    std::uint32_t key = 0;

    static Monomial from(std::span<const int> e) {
        Monomial m;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] < 0 || e[i] > 255) throw InvalidArgument("exponent out of range");
            m.key |= static_cast<std::uint32_t>(e[i]) << (8 * i);
        }
        return m;
    }
    int exp(int i) const { return static_cast<int>((key >> (8 * i)) & 0xffu); }
    int degree() const {
        int s = 0;
        for (int i = 0; i < kMaxPolyDim; ++i) s += exp(i);
        return s;
    }
    Monomial operator*(Monomial o) const { return Monomial{key + o.key}; }
    Monomial with(int i, int e) const {
        Monomial m{key & ~(0xffu << (8 * i))};
        m.key |= static_cast<std::uint32_t>(e) << (8 * i);
        return m;
    }
    bool operator<(Monomial o) const { return key < o.key; }
    bool operator==(Monomial o) const { return key == o.key; }
};

inline bool coeff_is_zero(const Rational& c) { return c == 0; }
inline bool coeff_is_zero(double c) { return c == 0.0; }

// Sparse polynomial in d <= 4 variables. T is Rational (exact) or double (float path).
template <class T>
class MultiPoly {
public:
    using Terms = std::map<Monomial, T>;

    MultiPoly() = default;
    explicit MultiPoly(int dim) : dim_(dim) {
        if (dim < 1 || dim > kMaxPolyDim) throw InvalidArgument("polynomial dimension must be in 1..4");
    }
    static MultiPoly constant(int dim, const T& c) {
        MultiPoly p(dim);
        p.add_term(Monomial{}, c);
        return p;
    }
    static MultiPoly variable(int dim, int i) {
        MultiPoly p(dim);
        std::array<int, kMaxPolyDim> e{};
        e[static_cast<std::size_t>(i)] = 1;
        p.add_term(Monomial::from(std::span<const int>(e.data(), static_cast<std::size_t>(dim))), T(1));
        return p;
    }
    static MultiPoly linear(std::span<const T> a) {
        MultiPoly p(static_cast<int>(a.size()));
        for (int i = 0; i < p.dim_; ++i) p += variable(p.dim_, i) * a[static_cast<std::size_t>(i)];
        return p;
    }

    int dim() const { return dim_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    int degree() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }
    T coeff(Monomial m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? T(0) : it->second;
    }

    void add_term(Monomial m, const T& c) {
        if (coeff_is_zero(c)) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (coeff_is_zero(it->second)) terms_.erase(it);
        }
    }

    MultiPoly& operator+=(const MultiPoly& o) {
        check_dim(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    MultiPoly& operator-=(const MultiPoly& o) {
        check_dim(o);
        for (const auto& [m, c] : o.terms_) add_term(m, T(-c));
        return *this;
    }
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    MultiPoly operator-() const {
        MultiPoly r(*this);
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }
    friend MultiPoly operator*(const MultiPoly& a, const T& s) {
        MultiPoly r(a.dim_);
        if (coeff_is_zero(s)) return r;
        for (const auto& [m, c] : a.terms_) r.add_term(m, T(c * s));
        return r;
    }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        a.check_dim(b);
        MultiPoly r(a.dim_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, T(ca * cb));
        return r;
    }
    bool operator==(const MultiPoly& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

    MultiPoly derivative(int i) const {
        MultiPoly r(dim_);
        for (const auto& [m, c] : terms_) {
            int e = m.exp(i);
            if (e == 0) continue;
            r.add_term(m.with(i, e - 1), T(c * T(e)));
        }
        return r;
    }

    MultiPoly directional_derivative(std::span<const T> xi) const {
        MultiPoly r(dim_);
        for (int i = 0; i < dim_; ++i)
            if (!coeff_is_zero(xi[static_cast<std::size_t>(i)])) r += derivative(i) * xi[static_cast<std::size_t>(i)];
        return r;
    }

    // p(Mx).
    MultiPoly compose(const SquareMatrix<T>& M) const {
        if (M.n != dim_) throw InvalidArgument("compose: matrix dimension mismatch");
        std::vector<MultiPoly> rows;
        for (int i = 0; i < dim_; ++i) {
            std::vector<T> row(static_cast<std::size_t>(dim_));
            for (int j = 0; j < dim_; ++j) row[static_cast<std::size_t>(j)] = M(i, j);
            rows.push_back(linear(row));
        }
        // powers[i][e] = (row_i . x)^e
        std::vector<std::vector<MultiPoly>> powers(static_cast<std::size_t>(dim_));
        MultiPoly r(dim_);
        for (const auto& [m, c] : terms_) {
            MultiPoly term = constant(dim_, c);
            for (int i = 0; i < dim_; ++i) {
                int e = m.exp(i);
                auto& pw = powers[static_cast<std::size_t>(i)];
                if (pw.empty()) pw.push_back(constant(dim_, T(1)));
                while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * rows[static_cast<std::size_t>(i)]);
                if (e > 0) term = term * pw[static_cast<std::size_t>(e)];
            }
            r += term;
        }
        return r;
    }

    // Quotient by the linear form <a,x>; any remainder is returned through `remainder`.
    MultiPoly divide_linear(std::span<const T> a, MultiPoly* remainder) const {
        int k = -1;
        for (int i = dim_ - 1; i >= 0; --i)
            if (!coeff_is_zero(a[static_cast<std::size_t>(i)])) k = i;
        if (k < 0) throw InvalidArgument("division by the zero linear form");
        MultiPoly work(*this), q(dim_);
        const T ak = a[static_cast<std::size_t>(k)];
        // Repeatedly eliminate the term with the largest x_k exponent.
        while (true) {
            const Monomial* best = nullptr;
            int best_e = 0;
            for (const auto& [m, c] : work.terms_)
                if (m.exp(k) > best_e) {
                    best_e = m.exp(k);
                    best = &m;
                }
            if (!best) break;
            const Monomial bm = *best;
            Monomial mq = bm.with(k, best_e - 1);
            T cq = work.terms_.at(bm) / ak;
            work.terms_.erase(bm);
            q.add_term(mq, cq);
            for (int i = 0; i < dim_; ++i) {
                const T& ai = a[static_cast<std::size_t>(i)];
                if (i == k || coeff_is_zero(ai)) continue;
                work.add_term(mq.with(i, mq.exp(i) + 1), T(-cq * ai));
            }
        }
        if (remainder) *remainder = std::move(work);
        return q;
    }

    template <class U>
    U evaluate(std::span<const U> x) const {
        U s = U(0);
        for (const auto& [m, c] : terms_) {
            U v = convert<U>(c);
            for (int i = 0; i < dim_; ++i)
                for (int e = m.exp(i); e > 0; --e) v *= x[static_cast<std::size_t>(i)];
            s += v;
        }
        return s;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(to_double(c)));
        return m;
    }

    MultiPoly<double> to_float() const {
        MultiPoly<double> r(dim_);
        for (const auto& [m, c] : terms_) r.add_term(m, to_double(c));
        return r;
    }

    std::string str() const;

private:
    template <class U>
    static U convert(const T& c) {
        if constexpr (std::is_same_v<U, T>)
            return c;
        else
            return U(to_double(c));
    }
    void check_dim(const MultiPoly& o) const {
        if (o.dim_ != dim_) throw InvalidArgument("polynomial dimension mismatch");
    }

    int dim_ = 1;
    Terms terms_;
};

using RationalPoly = MultiPoly<Rational>;
using FloatPoly = MultiPoly<double>;

// Literal format: sum of terms `c * x1^a1 * ... * xd^ad`, e.g. "3/2*x1^2*x2 - x3".
RationalPoly parse_poly(std::string_view text, int dim);
std::string format_poly(const RationalPoly& p);
std::string format_poly(const FloatPoly& p);

template <class T>
std::string MultiPoly<T>::str() const {
    return format_poly(*this);
}

}  // namespace dunkl
