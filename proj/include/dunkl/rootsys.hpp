#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dunkl/rational.hpp"

namespace dunkl {

using Vec = std::vector<double>;

template <class T>
struct SquareMatrix {
    int n = 0;
    std::vector<T> a;  // row-major

    static SquareMatrix identity(int n) {
        SquareMatrix m{n, std::vector<T>(static_cast<std::size_t>(n * n), T(0))};
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
    T& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
    const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

    SquareMatrix operator*(const SquareMatrix& o) const {
        SquareMatrix r{n, std::vector<T>(a.size(), T(0))};
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const T& v = (*this)(i, k);
                if (v == T(0)) continue;
                for (int j = 0; j < n; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }

    std::vector<T> apply(std::span<const T> x) const {
        std::vector<T> y(static_cast<std::size_t>(n), T(0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(i)] += (*this)(i, j) * x[static_cast<std::size_t>(j)];
        return y;
    }

    SquareMatrix transpose() const {
        SquareMatrix r{n, a};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
};

using Matrix = SquareMatrix<double>;
using RationalMatrix = SquareMatrix<Rational>;

double max_entry_distance(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);

// x - 2 <alpha,x>/|alpha|^2 alpha. Throws InvalidArgument for alpha = 0.
Vec reflect(std::span<const double> alpha, std::span<const double> x);

Matrix reflection_matrix(std::span<const double> alpha);
RationalMatrix reflection_matrix(std::span<const Rational> alpha);

struct Root {
    Vec vec;  // |vec|^2 == 2
    // Rational vector parallel to vec, present when the root direction is rational.
    std::optional<std::vector<Rational>> direction;
    double kappa = 0.0;
    std::optional<Rational> kappa_exact;
};

// A reduced root system given by its positive roots; negatives are implied.
class RootSystem {
public:
    RootSystem() = default;
    // Validates every invariant; throws InvalidArgument with the violated property.
    RootSystem(int dim, std::vector<Root> positive_roots, std::string name = "custom");

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    const std::vector<Root>& positive_roots() const { return positive_; }
    std::vector<Vec> roots() const;

    // True when every root has a rational direction and rational multiplicity.
    bool exact() const;
    // Sum of multiplicities over positive roots.
    double chi() const;
    bool kappa_is_zero() const;

    // Per-axis multiplicities when every root is a coordinate axis (Z_2^d type).
    std::optional<std::vector<double>> axis_kappas() const;

    // Returns the same roots with every multiplicity replaced (one value per G-orbit
    // is enforced by validation).
    RootSystem with_kappas(const std::vector<Rational>& kappas) const;

private:
    int dim_ = 0;
    std::vector<Root> positive_;
    std::string name_;
};

class ReflectionGroup {
public:
    static constexpr std::size_t kDefaultCap = 10000;
    static constexpr double kDedupTolerance = 1e-9;

    // Closure of the root reflections. Throws GroupNotFinite past `cap` elements.
    static ReflectionGroup generate(const RootSystem& roots, std::size_t cap = kDefaultCap,
                                    double tol = kDedupTolerance);

    int dim() const { return dim_; }
    std::size_t order() const { return elements_.size(); }
    const std::vector<Matrix>& elements() const { return elements_; }
    // Root indices (into positive_roots) whose reflections compose to each element.
    const std::vector<std::vector<int>>& words() const { return words_; }
    bool exact() const { return !exact_elements_.empty(); }
    const std::vector<RationalMatrix>& exact_elements() const { return exact_elements_; }

    Vec apply(std::size_t element, std::span<const double> x) const;
    std::vector<Vec> orbit(std::span<const double> x) const;

private:
    int dim_ = 0;
    std::vector<Matrix> elements_;
    std::vector<std::vector<int>> words_;
    std::vector<RationalMatrix> exact_elements_;
};

// Orbit distance: min over g of |x - g y|.
double rho(const ReflectionGroup& group, std::span<const double> x, std::span<const double> y);

// w(x) = prod_{alpha in R+} |<alpha,x>|^{2 kappa_alpha}.
class WeightedDensity {
public:
    WeightedDensity() = default;
    explicit WeightedDensity(RootSystem roots);

    const RootSystem& roots() const { return roots_; }
    int dim() const { return roots_.dim(); }
    double chi() const { return chi_; }
    double homogeneous_dim() const { return roots_.dim() + 2.0 * chi_; }

    double operator()(std::span<const double> x) const;

    // Present for product weights prod_j (sqrt2 |x_j|)^{2 kappa_j}.
    const std::optional<std::vector<double>>& axis_kappas() const { return axis_kappas_; }

    // Closed-form measure of [lo,hi] along axis j for a product weight.
    double axis_measure(int axis, double lo, double hi) const;
    // Closed-form measure of a box for a product weight; throws UnsupportedVariant otherwise.
    double box_measure(std::span<const double> lo, std::span<const double> hi) const;

private:
    RootSystem roots_;
    double chi_ = 0.0;
    std::optional<std::vector<double>> axis_kappas_;
};

// Root system, its group, and its weight, built together.
struct DunklSystem {
    RootSystem roots;
    ReflectionGroup group;
    WeightedDensity density;

    explicit DunklSystem(RootSystem r);
    int dim() const { return roots.dim(); }
};

// Presets: "trivial:d=N", "z2^N[:kappa=...]", "z2^d:d=N,kappa=...", "a:N[,kappa=k]",
// "b:N[,kappa=ks,kl]", "i2:M[,kappa=...]", "file:<path>". An explicit `kappa_override`
// replaces any kappa list in the string.
RootSystem parse_preset(std::string_view spec, std::optional<std::string> kappa_override = std::nullopt);

// Text format: "dim N" then one "root c1 ... cN kappa k" line per positive root.
RootSystem load_root_system(const std::string& path);
RootSystem parse_root_system_text(std::string_view text, std::string name = "custom");

std::vector<Rational> parse_rational_list(std::string_view text);

}  // namespace dunkl
