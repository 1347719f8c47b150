#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dunkl/quadrature.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

using FnD = std::function<double(std::span<const double>)>;

enum class Scheme { tensor_gauss, monte_carlo };

struct QuadratureGrid {
    Scheme scheme = Scheme::tensor_gauss;
    AdaptiveOptions options{};
    std::size_t mc_samples = 400000;
    std::uint64_t seed = 1;

    // Same grid with tolerances tightened by `factor` (used for refinement checks).
    QuadratureGrid refined(double factor = 0.01) const;
};

using AxisBreaks = std::vector<std::vector<double>>;

// Integral of f dmu_kappa over the box [lo, hi]. Nested adaptive Gauss-Kronrod for d <= 3
// with hyperplane crossings and `breaks[j]` (per axis) as breakpoints; Monte Carlo otherwise
// (error = 3 sigma).
Estimate integrate_box(const FnD& f, std::span<const double> lo, std::span<const double> hi, const WeightedDensity& W,
                       const QuadratureGrid& grid = {}, const AxisBreaks& breaks = {});

// Integral over the Euclidean ball B(c, r). A null f integrates the constant 1, using the
// closed-form innermost integral when the weight is a product weight. `breaks[j]` adds
// breakpoints along axis j.
Estimate integrate_ball(const FnD* f, std::span<const double> c, double r, const WeightedDensity& W,
                        const QuadratureGrid& grid = {}, const AxisBreaks& breaks = {});

// Full-space integral of an integrand with Gaussian decay exp(-|x - c|^2 / (2 sigma^2)) or faster.
// Truncates at the radius where the decay factor drops below 1e-16 and adds the Gaussian tail
// bound (scaled by `peak`, a bound on |f| w at the center scale) to the error.
Estimate integrate_gaussian(const FnD& f, std::span<const double> c, double sigma, const WeightedDensity& W,
                            const QuadratureGrid& grid = {}, double peak = 1.0);

struct BallVolumeResult {
    Vec center;
    double radius = 0.0;
    double value = 0.0;
    double error = 0.0;
};

BallVolumeResult ball_volume(std::span<const double> x, double r, const WeightedDensity& W, const QuadratureGrid& grid = {});

struct DoublingResult {
    double ratio = 0.0;        // mu(B(x,R)) / mu(B(x,r))
    double ratio_error = 0.0;
    double secant_slope = 0.0; // ln(ratio) / ln(R/r)
    double local_slope = 0.0;  // d ln mu(B(x,s)) / d ln s at s = R
};

DoublingResult doubling_probe(std::span<const double> x, double r, double R, const WeightedDensity& W,
                              const QuadratureGrid& grid = {});

// A function with its Euclidean gradient, for pointwise Dunkl derivatives.
struct SmoothFunction {
    FnD value;
    std::function<Vec(std::span<const double>)> gradient;
};

// D_xi f(x) = d_xi f(x) + sum kappa <a,xi> (f(x) - f(r_a x)) / <a,x>, x off every hyperplane.
double dunkl_derivative_at(const SmoothFunction& f, std::span<const double> xi, const RootSystem& R,
                           std::span<const double> x);

struct IbpResult {
    double residual = 0.0;  // |int v D u + int u D v|
    double lhs = 0.0;       // int v D u dmu
    double rhs = 0.0;       // int u D v dmu
    double scale = 0.0;     // int |v D u| + int |u D v|
    double error = 0.0;     // combined quadrature error estimate
};

// Both integrals over the box [lo, hi], which must contain the G-orbit of supp v.
IbpResult integration_by_parts_residual(const SmoothFunction& u, const SmoothFunction& v, std::span<const double> xi,
                                        const WeightedDensity& W, std::span<const double> lo,
                                        std::span<const double> hi, const QuadratureGrid& grid = {});

}  // namespace dunkl
