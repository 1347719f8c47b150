#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace dunkl {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule, cached per n.
const GaussRule& gauss_legendre(int n);

struct AdaptiveOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_intervals = 2000;
};

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7-15 on [a,b]. Breakpoints inside (a,b) start as interval ends.
// Throws EvaluationError on a non-finite integrand value.
Estimate integrate_adaptive(const Fn1& f, double a, double b, const std::vector<double>& breakpoints = {},
                            const AdaptiveOptions& opt = {});

// Fixed composite Gauss-Legendre with `panels` equal panels per segment between sorted breaks.
double integrate_composite(const Fn1& f, const std::vector<double>& breaks, int panels, int order);

}  // namespace dunkl
