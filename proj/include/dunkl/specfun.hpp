#pragma once

#include <vector>

namespace dunkl {

// The rank-one Dunkl kernel E(z) = A(z) + B(z) with multiplicity kappa, where
// A(z) = Gamma(kappa+1/2) (z/2)^{1/2-kappa} I_{kappa-1/2}(z) (even) and
// B(z) = Gamma(kappa+1/2) (z/2)^{1/2-kappa} I_{kappa+1/2}(z) (odd), both extended as
// entire power series, together with S(z) = B(z)/z (even, S(0) = 1/(2 kappa + 1)).
//
// Values are returned scaled by exp(-s z) for a caller-chosen s in {-1, 0, 1}; the
// kernel code uses s = sign(z) when |z| >= 1 so that exp(-|z|) E(z) stays O(1).
class DunklKernelFunctions {
public:
    // Power series below this |z|, asymptotic expansion above.
    static constexpr double kAsymptoticThreshold = 25.0;

    explicit DunklKernelFunctions(double kappa);

    double kappa() const { return kappa_; }

    // Taylor coefficients (k = 0..order) at z0 of exp(-s z) E(z) and exp(-s z) S(z).
    void scaled_taylor(double z0, int s, int order, double* E, double* S) const;

    // exp(-|z|) E(z) and exp(-|z|) S(z).
    double scaled_E(double z) const;
    double scaled_S(double z) const;

    // Series coefficient e_m of E(z) = sum e_m z^m.
    double coefficient(int m) const { return e_[static_cast<std::size_t>(m)]; }

private:
    void series_taylor(double z0, int order, double* E, double* S) const;
    void asymptotic_values(double z, double& E, double& S) const;

    double kappa_;
    std::vector<double> e_;
};

}  // namespace dunkl
