#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dunkl/jet.hpp"
#include "dunkl/measure.hpp"
#include "dunkl/rootsys.hpp"
#include "dunkl/specfun.hpp"

namespace dunkl {

// One-dimensional Z_2 heat kernel with multiplicity kappa (kappa = 0 is the Gaussian):
//   h_t(x,y) = c t^{-(kappa+1/2)} exp(-(x^2+y^2)/(4t)) E(xy/(2t)),
// with respect to the measure 2^kappa |y|^{2 kappa} dy. The constant c is fixed by
// requiring unit mass at (t,x) = (1,0) and then checked at 20 random (t,x).
class KernelFactor {
public:
    static constexpr double kMassTolerance = 1e-6;

    explicit KernelFactor(double kappa);

    double kappa() const { return F_.kappa(); }
    double c_norm() const { return std::exp(log_c_); }
    // Largest |mass - 1| seen over the validation probes.
    double validation_error() const { return validation_error_; }
    const DunklKernelFunctions& functions() const { return F_; }

    // Jets in t at t0 (coefficients of delta^k, t = t0 + delta). The true functions are
    // exp(log_scale) times the jets: h, g = dh/dx, q = (h(x) - h(-x)) / x.
    struct TJets {
        double log_scale = 0.0;
        Jet h, g, q;
    };
    TJets t_jets(double t, double x, double y, int order) const;

    // Jet of x -> h_t(x, y) around x0 (coefficients of delta^k, x = x0 + delta).
    struct XJet {
        double log_scale = 0.0;
        Jet h;
    };
    XJet x_jet(double t, double x0, double y, int order) const;

    double log_value(double t, double x, double y) const;
    double value(double t, double x, double y) const { return std::exp(log_value(t, x, y)); }

    // Mass of y -> h_t(x, y) by adaptive quadrature.
    double mass(double t, double x) const;

private:
    DunklKernelFunctions F_;
    double log_c_ = 0.0;
    double validation_error_ = 0.0;
};

enum class KernelVariant { gaussian, z2_rank1, z2_product };

// Heat kernel of a supported root system: any system with kappa = 0 (Gaussian), or a
// Z_2^d system (product of one-dimensional factors). Other systems are refused with
// UnsupportedVariant because no closed form exists.
class KernelSpec {
public:
    explicit KernelSpec(const RootSystem& R);

    KernelVariant variant() const { return variant_; }
    int dim() const { return static_cast<int>(kappas_.size()); }
    const std::vector<double>& kappas() const { return kappas_; }
    double c_norm(int axis) const { return factors_[static_cast<std::size_t>(axis)]->c_norm(); }
    const KernelFactor& factor(int axis) const { return *factors_[static_cast<std::size_t>(axis)]; }
    const DunklSystem& system() const { return *system_; }
    const WeightedDensity& density() const { return system_->density; }
    const ReflectionGroup& group() const { return system_->group; }
    double chi() const { return system_->density.chi(); }
    double homogeneous_dim() const { return system_->density.homogeneous_dim(); }

private:
    KernelVariant variant_;
    std::vector<double> kappas_;
    std::vector<std::shared_ptr<const KernelFactor>> factors_;
    std::shared_ptr<const DunklSystem> system_;
};

// Shared, calibrated factor for a multiplicity (calibration is cached per kappa).
std::shared_ptr<const KernelFactor> kernel_factor(double kappa);

// h_t(x,y); throws InvalidArgument for t <= 0.
double eval_kernel(const KernelSpec& spec, double t, std::span<const double> x, std::span<const double> y);
double log_eval_kernel(const KernelSpec& spec, double t, std::span<const double> x, std::span<const double> y);

// t-jets of h, of dh/dx_j, and of Q_j = (h(x) - h(r_j x)) / x_j for every axis j.
struct KernelJets {
    double log_scale = 0.0;
    Jet h;
    std::vector<Jet> grad;
    std::vector<Jet> quot;
};
KernelJets kernel_t_jets(const KernelSpec& spec, double t, std::span<const double> x, std::span<const double> y,
                         int order);

struct DerivativeOptions {
    bool cross_check = true;
    double tolerance = 1e-4;
};

struct KernelDerivatives {
    double value = 0.0;
    std::vector<double> dt;          // dt[k] = d^k h / dt^k, k = 0..m
    Vec grad;                        // Euclidean gradient in x
    Vec dunkl_grad;                  // Dunkl gradient in x
    Vec root_quotients;              // (h(x) - h(r_a x)) / <a,x> per positive root (normalized a)
    std::vector<double> dt_xroute;   // Delta_kappa^k h by differentiation in x (empty if unavailable)
    std::vector<double> dt_fd;       // Richardson central differences in t
    double max_route_deviation = 0.0;
};

// Time derivatives from exact differentiation of the kernel formula in t, cross-checked
// (optionally) against Delta_kappa^m h (x-route) and finite differences in t.
// Throws NumericalInstability when the routes disagree beyond the tolerance.
KernelDerivatives eval_kernel_derivatives(const KernelSpec& spec, double t, std::span<const double> x,
                                          std::span<const double> y, int m, const DerivativeOptions& opt = {});

// Delta_kappa^k h_t(., y)(x) for k = 0..m by differentiating the formula in x.
// Requires x_j != 0 on every axis with kappa_j > 0.
std::vector<double> laplacian_powers_x(const KernelSpec& spec, double t, std::span<const double> x,
                                       std::span<const double> y, int m);

// Gamma(Delta_kappa^m h_t(., y))(x). On a reflection hyperplane the difference quotient is
// replaced by its analytic limit when limit_mode is set; otherwise DomainError.
double gamma_of_kernel(const KernelSpec& spec, int m, double t, std::span<const double> x, std::span<const double> y,
                       bool limit_mode = false);

// log of gamma_of_kernel, safe where the kernel itself underflows (-inf for an exact zero).
double log_gamma_of_kernel(const KernelSpec& spec, int m, double t, std::span<const double> x,
                           std::span<const double> y, bool limit_mode = false);

// |grad_kappa Delta_kappa^m h_t(., y)|^2 at x (same hyperplane rules).
double dunkl_grad_sq_of_kernel(const KernelSpec& spec, int m, double t, std::span<const double> x,
                               std::span<const double> y, bool limit_mode = false);

// H_t f(x) = int h_t(x,y) f(y) dmu(y). `breaks` adds per-axis breakpoints for f.
Estimate semigroup_apply(const KernelSpec& spec, const FnD& f, double t, std::span<const double> x,
                         const QuadratureGrid& grid = {}, const AxisBreaks& breaks = {});

}  // namespace dunkl
