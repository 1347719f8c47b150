#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dunkl/czdecomp.hpp"
#include "dunkl/dunklcalc.hpp"
#include "dunkl/heatkernel.hpp"
#include "dunkl/report.hpp"
#include "dunkl/squarefns.hpp"

namespace dunkl {

// ---- exact calculus -------------------------------------------------------------

struct CalculusOptions {
    int polynomials = 100;
    int max_degree = 6;
    int points_per_poly = 4;
};

// Commutativity, Gamma >= 0, |grad_k f|^2 <= (1 + 2 chi) Gamma(f), Leibniz with a
// G-invariant factor, composed vs expanded Laplacian and the heat_poly semigroup law, in
// exact rational arithmetic. A failing check names the witness polynomial.
SuiteReport verify_calculus_identities(const RootSystem& R, std::uint64_t seed, const CalculusOptions& opt = {});

// ---- kernel ---------------------------------------------------------------------

// Unit mass at 20 random (t,x), symmetry, semigroup law at random (s,t,x,y) and the
// Gaussian limit, for the one-dimensional Z_2 kernel at each kappa.
SuiteReport kernel_calibration_suite(const std::vector<double>& kappas, std::uint64_t seed, int semigroup_probes = 10);

// semigroup_apply against heat_poly for random polynomials (relative tolerance 1e-6).
SuiteReport polynomial_flow_suite(const RootSystem& R, std::uint64_t seed, int polynomials = 10);

struct KernelSweep {
    std::vector<double> t;
    std::vector<Vec> points;  // x and y both range over these
    // More t values and points; the stability flag compares the two sweeps.
    KernelSweep densified() const;
    // t = 10^{-2 .. 2} by half decades; 12 points (1-D) or 36 seeded points (d > 1) near and far from the hyperplanes.
    static KernelSweep standard(int dim, std::uint64_t seed);
};

// FD-in-t against Delta_kappa^m h computed in x (m = 1 unless stated), relative 1e-5.
SuiteReport heat_equation_suite(const KernelSpec& spec, const KernelSweep& sweep, int max_order = 1,
                                double tolerance = 1e-5);

enum class KernelBound { upper, time_derivative, mixed, gamma };

// log of the bounded quantity of one pointwise kernel bound at (t,x,y):
//   upper           h V exp(c rho^2/t)                         (2.4)
//   time_derivative |d_t^m h| t^m V exp(c rho^2/t)             (2.5)
//   mixed           |D_j d_t^m h| t^{m+1/2} V exp(c rho^2/t)   (2.10)
//   gamma           sqrt(Gamma(Delta^m h)) t^{m+1/2} V exp(c rho^2/t)
// with V = V(x,y,sqrt t). -inf when the quantity vanishes exactly.
double log_kernel_bound_quantity(const KernelSpec& spec, KernelBound b, int m, int j, double c, double t,
                                 std::span<const double> x, std::span<const double> y);

// V(x,y,r) = max(mu(B(x,r)), mu(B(y,r))).
double two_point_volume(const WeightedDensity& W, std::span<const double> x, std::span<const double> y, double r);

struct KernelBoundOptions {
    double upper_exponent = 1.0 / 8.0;
    double derivative_exponent = 1.0 / 16.0;
    int max_halvings = 3;
    double stability = 0.25;
};

// One FitReport per bound (2.4), (2.5) m=1,2, (2.10) j, m=0,1, and the Gamma bound m=0,1.
// An unstable fit halves its exponent (recorded) up to max_halvings times. For kappa = 0
// the (2.4) constant is compared with omega_d / (4 pi)^{d/2} (5%).
SuiteReport verify_kernel_bounds(const KernelSpec& spec, const KernelSweep& sweep, const KernelBoundOptions& opt = {});

// ---- integral lemmas ----------------------------------------------------------------

struct LemmaSweep {
    std::vector<double> s{0.01, 0.1, 1.0, 10.0};
    std::vector<double> t_over_s{0.0, 1.0, 4.0, 16.0};
    std::vector<Vec> y;
    std::vector<int> m{0, 1};
    double epsilon = 1.0 / 32.0;
    double delta = 1.0 / 32.0;

    LemmaSweep densified() const;
    static LemmaSweep standard(int dim, std::uint64_t seed);
};

// int_{rho(x,y) >= r} F(x) dmu(x) over the box that reaches `reach` past every orbit point
// of y (r = 0 integrates everywhere). Nested adaptive quadrature, d <= 3.
Estimate exterior_integral(const FnD& F, const KernelSpec& spec, std::span<const double> y, double r, double reach,
                           double rel_tol = 1e-9);

// Lemma 2.2 with delta, (2.7) and (2.8) of Lemma 2.3 and Lemma 2.4 for each m, plus the
// decay slope of (2.8) in t/s (<= -0.9 epsilon) and, when kappa = 0, the exponent of the
// (2.7) integral in s (-(1 + d/2) within 2%).
SuiteReport verify_integral_lemmas(const KernelSpec& spec, const LemmaSweep& sweep, double stability = 0.25);

// ---- measure, CZ, maximal function --------------------------------------------------

struct DoublingSweep {
    std::vector<Vec> centers;
    std::vector<double> radii{0.01, 0.1, 1.0, 10.0};
    std::vector<double> factors{2.0, 4.0, 10.0};
    DoublingSweep densified() const;
    static DoublingSweep standard(int dim, std::uint64_t seed);
};

// Volume slopes within [d - 0.02, d_kappa + 0.02], fitted theta for both sides of the
// doubling inequality, G-invariance of ball volumes, and the closed form at the origin for
// one-dimensional Z_2 weights.
SuiteReport doubling_suite(const RootSystem& R, const DoublingSweep& sweep);

struct CZSuiteOptions {
    int random_functions = 50;
    int depth_1d = 7;
    int depth_2d = 4;
};

// Properties (a)-(d) and reconstruction on random step functions in both bad-part modes,
// the hand-computed example, and two opposite spikes straddling a dyadic boundary.
SuiteReport cz_suite(const RootSystem& R, std::uint64_t seed, const CZSuiteOptions& opt = {});

struct Claim34SuiteOptions {
    double center = 0.0;  // a G-fixed point; elsewhere the reflected term breaks scale invariance
    double width = 1e-3;
    std::vector<double> t{1e-3, 1e-2, 1e-1, 1.0};
    double tolerance = 0.2;
};

// claim34_ratio for a spike at x = center across t; every ratio within the tolerance of the median.
SuiteReport claim34_suite(const KernelSpec& spec, const Claim34SuiteOptions& opt = {});

// ---- square functions -----------------------------------------------------------------

struct Weak11Options {
    std::vector<double> widths{1.0, 0.1, 0.01};
    std::vector<SquareMode> modes{SquareMode::gamma, SquareMode::horizontal};
    double center = 1.0;
    double lambda_decades = 5.0;
    int lambda_per_decade = 10;
    int x_per_decade = 16;
    double x_near = 1e-3;  // closest grid distance to +-center, in units of the width
    double x_far = 1e3;    // farthest, in units of max(width, 1)
    int min_resolved = 10; // resolved lambda values needed per Q
    double stability = 4.0;
    int threads = 1;
};

// Q(w) = max over lambda of lambda mu{S f_w > lambda} / ||f_w||_1 for unit-mass spikes f_w
// (one dimension). x is log-graded around +-center; lambda spans lambda_decades around the
// median sampled value, and a level set counts only when resolved and inside the grid.
// Passes when max Q / min Q <= stability for each mode and every Q has min_resolved levels.
SuiteReport weak11_profile(const KernelSpec& spec, const Weak11Options& opt = {});

struct EnergyOptions {
    double tolerance = 0.01;
    int panels = 4;          // x panels across the support per side
    int order = 10;          // Gauss-Legendre nodes per x panel
    int time_nodes_per_decade = 8;
    int threads = 1;
};

// ||V_Gamma f||^2 / ||f||^2 = 1/2 and ||H f||^2 / ||f||^2 = 1/4 (one dimension).
SuiteReport l2_energy_identities(const KernelSpec& spec, const std::vector<TestFunction>& family,
                                 const EnergyOptions& opt = {});

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dunkl
