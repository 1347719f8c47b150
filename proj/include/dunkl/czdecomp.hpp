#pragma once

#include <random>
#include <string>
#include <vector>

#include "dunkl/heatkernel.hpp"
#include "dunkl/squarefns.hpp"

namespace dunkl {

// Piecewise constant function on the dyadic grid of the cube [lo, lo + side)^d with
// 2^depth cells per axis (row-major values, last axis fastest). Zero outside.
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(Vec lo, double side, int depth, std::vector<double> values);

    // Samples f at cell centers.
    static StepFunction sample(const FnD& f, Vec lo, double side, int depth);
    // Sum of a few constant blocks on random dyadic cubes with random heights.
    static StepFunction random(int dim, Vec lo, double side, int depth, std::mt19937_64& rng);

    int dim() const { return static_cast<int>(lo_.size()); }
    int depth() const { return depth_; }
    long cells_per_axis() const { return 1L << depth_; }
    std::size_t cell_count() const { return values_.size(); }
    const Vec& lo() const { return lo_; }
    double side() const { return side_; }
    double cell_side() const { return side_ / static_cast<double>(cells_per_axis()); }
    const std::vector<double>& values() const { return values_; }
    double cell_value(std::size_t flat) const { return values_[flat]; }
    std::vector<long> cell_index(std::size_t flat) const;
    Vec cell_lo(std::size_t flat) const;

    double operator()(std::span<const double> y) const;
    double l1(const WeightedDensity& W) const;
    // Breakpoints per axis: every cell edge.
    AxisBreaks breaks() const;

private:
    Vec lo_;
    double side_ = 0.0;
    int depth_ = 0;
    std::vector<double> values_;
};

struct DyadicCube {
    int generation = 0;           // side = root side / 2^generation
    std::vector<long> index;      // lower corner = root lo + index * side
    double side = 0.0;
    Vec lo;
    double measure = 0.0;

    bool contains(std::span<const double> y) const;
    // Whether the finest cell with integer index `cell` (at generation `depth`) lies inside.
    bool contains_cell(const std::vector<long>& cell, int depth) const;
};

// mu of a box: closed form for product weights, quadrature otherwise.
double box_mu(std::span<const double> lo, std::span<const double> hi, const WeightedDensity& W);

enum class BadPartMode { plain, mean_zero };

struct CZOptions {
    BadPartMode mode = BadPartMode::plain;
    // Start from top cubes of side <= 2 (inradius <= 1) instead of the root cube.
    bool paper_strict = false;
};

struct BadPart {
    DyadicCube cube;
    double average = 0.0;      // signed mu-average of f on the cube
    double abs_average = 0.0;  // mu-average of |f|
    double parent_ratio = 1.0; // mu(parent) / mu(cube); 1 for top cubes
    double l1 = 0.0;           // ||b_i||_1
    double t = 0.0;            // (side / 2)^2
};

struct CZResult {
    double lambda = 0.0;
    BadPartMode mode = BadPartMode::plain;
    StepFunction f;
    StepFunction g;
    std::vector<BadPart> bad;
    double ess_sup_g = 0.0;
    double sum_mu = 0.0;
    double f_l1 = 0.0;
    int overlap = 0;
    double max_tree_ratio = 1.0;  // largest mu(parent)/mu(child) seen in the tree
    std::vector<std::string> warnings;

    // b_i(y)
    double bad_value(std::size_t i, std::span<const double> y) const;
};

// Stopping-time decomposition f = g + sum b_i at height lambda over the dyadic tree of the
// step function's root cube. Throws ThresholdTooSmall when lambda is below the root average.
CZResult cz_decompose(const StepFunction& f, double lambda, const WeightedDensity& W, const CZOptions& opt = {});

struct CZPropertyReport {
    bool a = false, b = false, c = false, d = false, reconstruction = false;
    double c_a = 0.0;  // ess sup |g| / lambda
    double c_b = 0.0;  // max ||b_i||_1 / (lambda mu(Q_i))
    double c_c = 0.0;  // sum mu(Q_i) lambda / ||f||_1
    double bound = 1.0;
    int overlap = 0;
    double reconstruction_residual = 0.0;
    bool all() const { return a && b && c && d && reconstruction; }
};

// Checks (a) |g| <= c lambda, (b) supp b_i in Q_i and ||b_i|| <= c lambda mu(Q_i),
// (c) sum mu(Q_i) <= lambda^{-1} ||f||_1, (d) pairwise disjoint cubes, and f = g + sum b_i
// on every grid cell. The allowed c is 1 for plain bad parts and the largest parent/child
// measure ratio of the selected cubes (twice that for (b)) in mean-zero mode.
CZPropertyReport verify_cz_properties(const CZResult& r, const WeightedDensity& W);

// Data for the maximal operator: |f| is integrated over balls.
struct MaximalData {
    FnD f;
    Vec lo, hi;
    AxisBreaks breaks;
};
MaximalData maximal_data(const TestFunction& f);
MaximalData maximal_data(const StepFunction& f);

struct RadiusGrid {
    int per_decade = 40;
    int decades = 6;
    bool critical = true;  // add radii where the sphere meets a breakpoint
};

struct MaximalValue {
    double value = 0.0;
    double radius = 0.0;
};

// max over the radius grid of mu(B(x,r))^{-1} int_B |v| dmu; a lower bound for M v(x).
MaximalValue hl_maximal(const MaximalData& v, std::span<const double> x, const WeightedDensity& W,
                        const RadiusGrid& grid = {});

struct Claim34Result {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    Vec argmax_y;
};

struct Claim34Options {
    int samples = 9;  // per axis, over the cube around x clipped to the ball
    RadiusGrid radii{};
};

// sup_{y in B(x, sqrt t)} H_t v(y) / sum_{g in G} inf_{z in B(x, sqrt t)} M v(g z), both over samples.
Claim34Result claim34_ratio(const TestFunction& v, double t, std::span<const double> x, const KernelSpec& spec,
                            const Claim34Options& opt = {});

// ||M v||_2 / ||v||_2 in one dimension (full line, mapped Gauss nodes).
double maximal_l2_ratio(const TestFunction& v, const WeightedDensity& W, const RadiusGrid& grid = {});

}  // namespace dunkl
