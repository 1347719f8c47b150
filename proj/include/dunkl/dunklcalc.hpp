#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dunkl/multipoly.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

constexpr int kMaxExactDegree = 12;

template <class T>
struct GammaValue {
    MultiPoly<T> gradient;    // <grad f, grad g>
    MultiPoly<T> difference;  // sum_a kappa_a (f - f r_a)(g - g r_a) / <a,x>^2
    MultiPoly<T> total;
};

// Dunkl calculus over a fixed root system. T = Rational needs RootSystem::exact();
// T = double works for every system and compares with relative tolerance 1e-10.
template <class T>
class DunklCalculus {
public:
    struct RootForm {
        std::vector<T> a;  // rational direction (exact) or normalized root (float)
        T kappa;
        T half_norm2;      // |a|^2 / 2
        SquareMatrix<T> reflection;
    };

    explicit DunklCalculus(const RootSystem& roots);

    int dim() const { return dim_; }
    const std::vector<RootForm>& root_forms() const { return forms_; }

    // (p - p o r_a) / <a,x>, where a is the stored root direction.
    MultiPoly<T> divided_difference(const MultiPoly<T>& p, std::size_t root) const;

    MultiPoly<T> dunkl_derivative(const MultiPoly<T>& p, std::span<const T> xi) const;
    MultiPoly<T> dunkl_partial(const MultiPoly<T>& p, int j) const;
    std::vector<MultiPoly<T>> dunkl_gradient(const MultiPoly<T>& p) const;

    MultiPoly<T> laplacian_composed(const MultiPoly<T>& p) const;
    MultiPoly<T> laplacian_expanded(const MultiPoly<T>& p) const;
    // Both routes; throws ConsistencyError when they disagree.
    MultiPoly<T> dunkl_laplacian(const MultiPoly<T>& p) const;

    GammaValue<T> gamma(const MultiPoly<T>& f, const MultiPoly<T>& g) const;
    // 1/2 [Delta(fg) - f Delta g - g Delta f]
    MultiPoly<T> gamma_defining(const MultiPoly<T>& f, const MultiPoly<T>& g) const;

    // e^{t Delta_kappa} p as the finite sum over t^m Delta^m p / m!.
    MultiPoly<T> heat_poly(const MultiPoly<T>& p, const T& t) const;

    // Average of p o g over the group (exact for rational systems).
    MultiPoly<T> reynolds(const MultiPoly<T>& p) const;

    // Pointwise |grad_kappa p|^2 and Gamma(p).
    T dunkl_grad_sq_at(const MultiPoly<T>& p, std::span<const T> x) const;
    T gamma_at(const MultiPoly<T>& p, std::span<const T> x) const;
    T chi() const { return chi_; }

    bool equal(const MultiPoly<T>& a, const MultiPoly<T>& b) const;

private:
    void check_degree(const MultiPoly<T>& p) const;

    int dim_;
    T chi_;
    std::vector<RootForm> forms_;
    std::vector<SquareMatrix<T>> group_;
};

extern template class DunklCalculus<Rational>;
extern template class DunklCalculus<double>;

// Random polynomial with coefficients p/q, |p| <= 9, q in 1..4, and total degree <= max_degree.
RationalPoly random_poly(int dim, int max_degree, std::mt19937_64& rng, int max_terms = 8);
// Random rational point with coordinates n/8, n in [-24,24], avoiding zero.
std::vector<Rational> random_rational_point(int dim, std::mt19937_64& rng);

}  // namespace dunkl
