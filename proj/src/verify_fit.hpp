#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "dunkl/report.hpp"

namespace dunkl {

// Max of a log-quantity over a sweep, with where it happened.
struct SweepMax {
    double log_value = -INFINITY;
    std::string location;
    bool finite = true;

    void add(double v, const std::function<std::string()>& where) {
        if (std::isnan(v) || v == INFINITY) {
            if (finite) location = where();
            finite = false;
            return;
        }
        if (finite && v > log_value) {
            log_value = v;
            location = where();
        }
    }
};

// Evaluates the sweep at `exponent` on the base and densified grids; while the fit is not
// finite and stable, halves the exponent (at most max_halvings times).
inline FitReport fit_with_halving(std::string id, double exponent, int max_halvings, double stability,
                                  const std::function<SweepMax(double exponent, bool dense)>& eval) {
    FitReport r;
    r.id = std::move(id);
    r.requested_exponent = exponent;
    for (int h = 0;; ++h) {
        SweepMax base = eval(exponent, false);
        SweepMax dense = eval(exponent, true);
        r.exponent = exponent;
        r.halvings = h;
        r.finite = base.finite && dense.finite;
        r.constant = std::exp(base.log_value);
        r.refined_constant = std::exp(dense.log_value);
        r.location = base.finite ? base.location : "non-finite at " + base.location;
        if (r.finite) {
            double change = base.log_value == -INFINITY ? (dense.log_value == -INFINITY ? 0.0 : INFINITY)
                                                        : std::abs(std::expm1(dense.log_value - base.log_value));
            r.stable = change < stability;
        } else {
            r.stable = false;
        }
        if (r.ok() || h >= max_halvings) return r;
        exponent /= 2.0;
    }
}

}  // namespace dunkl
