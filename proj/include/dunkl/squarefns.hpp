#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dunkl/heatkernel.hpp"
#include "dunkl/multipoly.hpp"

namespace dunkl {

// Test data: a finite linear combination of atoms.
//   spike(c, w)        exp(-1/(1-|u|^2)), u = (y-c)/w, scaled to unit mu_kappa mass
//   bump(c, s)         exp(-|y-c|^2/s^2)
//   poly_window(p, s)  p(y) exp(1 - 1/(1-|u|^2)), u = y/s
class TestFunction {
public:
    enum class Kind { spike, bump, poly_window };

    TestFunction() = default;
    explicit TestFunction(int dim) : dim_(dim) {}

    static TestFunction zero(int dim) { return TestFunction(dim); }
    static TestFunction spike(std::span<const double> center, double width, const WeightedDensity& W);
    static TestFunction bump(std::span<const double> center, double scale);
    static TestFunction poly_window(const FloatPoly& p, double scale);

    int dim() const { return dim_; }
    bool is_zero() const { return atoms_.empty(); }
    double operator()(std::span<const double> y) const;

    // Bounding box of the support (Gaussian bumps are cut where exp(-u^2) < 1e-35).
    Vec support_lo() const;
    Vec support_hi() const;
    // Per-axis points where the data is not analytic.
    AxisBreaks breaks() const;
    // Smallest length scale of the data.
    double feature_scale() const;

    TestFunction& operator+=(const TestFunction& o);
    TestFunction& operator*=(double c);
    friend TestFunction operator+(TestFunction a, const TestFunction& b) { return a += b; }
    friend TestFunction operator*(double c, TestFunction a) { return a *= c; }

private:
    struct Atom {
        Kind kind;
        Vec center;
        double scale = 1.0;
        double coeff = 1.0;
        FloatPoly poly;
    };
    int dim_ = 0;
    std::vector<Atom> atoms_;
};

// Parses "spike(1, 0.1)", "bump([0.5,0], 0.3)", "poly_window(x1^2 - 1, 2)", "zero",
// and sums of terms separated by " + " with optional "c*" prefixes.
TestFunction parse_test_function(std::string_view text, const WeightedDensity& W);

// Log-spaced composite Gauss rule in t. With extend_tail the upper end grows to
// tail_factor * D^2, D the distance from x to the far end of the support, so the
// heat flow has spread well past the data before the window ends.
struct TimeQuadrature {
    double t_min = 1e-6;
    double t_max = 1e4;
    int nodes_per_decade = 16;
    bool extend_tail = true;
    double tail_factor = 1e3;

    struct Node {
        double t;
        double weight;
    };
    std::vector<Node> nodes(double t_hi) const;
};

// y-quadrature controls: windows of half-width `window * sqrt(t)` around x and its
// reflections, cut into panels no wider than `panel * sqrt(t)` nor `feature / 4`.
struct SpatialOptions {
    double window = 12.0;
    double panel = 1.0;
    int order = 16;
    bool limit_mode = false;
    // Points within this distance of a reflection hyperplane count as on it.
    double collar = 1e-6;
};

// H_t f(x), d/dt H_t f(x), the gradient of H_t f, and Q_j = (H_t f(x) - H_t f(r_j x)) / x_j.
// Q_j carries no weight when kappa_j = 0 and is not resolved on such axes.
struct HeatFlowValues {
    double value = 0.0;
    double dt = 0.0;
    Vec grad;
    Vec quot;
};
HeatFlowValues heat_flow(const TestFunction& f, double t, std::span<const double> x, const KernelSpec& spec,
                         const SpatialOptions& opt = {});

enum class SquareMode { gamma, dunkl_grad, grad, horizontal };
const char* mode_name(SquareMode m);
SquareMode parse_mode(std::string_view s);

struct SquareFunctionSample {
    Vec x;
    SquareMode mode = SquareMode::gamma;
    double value = 0.0;
    double error = 0.0;
};

// All four square functions at x from one pass over the time nodes.
struct SquareFunctionValues {
    Vec x;
    double value[4] = {0, 0, 0, 0};
    double error[4] = {0, 0, 0, 0};
    SquareFunctionSample sample(SquareMode m) const {
        return {x, m, value[static_cast<int>(m)], error[static_cast<int>(m)]};
    }
};
SquareFunctionValues square_functions(const TestFunction& f, std::span<const double> x, const KernelSpec& spec,
                                      const TimeQuadrature& tq = {}, const SpatialOptions& opt = {});

SquareFunctionSample vertical_square_function(const TestFunction& f, std::span<const double> x, SquareMode mode,
                                              const KernelSpec& spec, const TimeQuadrature& tq = {},
                                              const SpatialOptions& opt = {});
SquareFunctionSample horizontal_square_function(const TestFunction& f, std::span<const double> x,
                                                const KernelSpec& spec, const TimeQuadrature& tq = {},
                                                const SpatialOptions& opt = {});

// Samples on a tensor grid (row-major, last axis fastest).
struct SampledField {
    std::vector<std::vector<double>> axes;
    std::vector<double> values;
    std::size_t size() const { return values.size(); }
    Vec point(std::size_t i) const;
};

struct LevelSetMeasure {
    double value = 0.0;  // corner-fraction (linear in 1-D) estimate
    double inner = 0.0;  // cells with every corner above lambda
    double outer = 0.0;  // cells with some corner above lambda
    bool resolved = true;
    std::string warning;
};

// mu_kappa({value > lambda}) over the grid cells. Unresolved when outer and inner differ by
// more than 20% of outer.
LevelSetMeasure superlevel_measure(const SampledField& field, double lambda, const WeightedDensity& W);

// Runs fn(i) for i in [0, n) on `threads` workers; results must go to per-index slots.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace dunkl
