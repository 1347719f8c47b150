#include "dunkl/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "dunkl/error.hpp"
#include "dunkl/jet.hpp"

namespace dunkl {

namespace {

constexpr int kSeriesTerms = 220;
constexpr int kMaxK = Jet::kMaxOrder + 1;

const std::array<std::array<double, kMaxK + 1>, kSeriesTerms>& binomials() {
    static const auto table = [] {
        std::array<std::array<double, kMaxK + 1>, kSeriesTerms> b{};
        for (int m = 0; m < kSeriesTerms; ++m) {
            b[static_cast<std::size_t>(m)][0] = 1.0;
            for (int k = 1; k <= kMaxK; ++k)
                b[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] =
                    k > m ? 0.0 : b[static_cast<std::size_t>(m)][static_cast<std::size_t>(k - 1)] * (m - k + 1) / k;
        }
        return b;
    }();
    return table;
}

}  // namespace

DunklKernelFunctions::DunklKernelFunctions(double kappa) : kappa_(kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InvalidArgument("multiplicity must be a finite nonnegative number");
    e_.resize(kSeriesTerms);
    e_[0] = 1.0;
    for (int m = 0; m + 1 < kSeriesTerms; ++m)
        e_[static_cast<std::size_t>(m + 1)] = e_[static_cast<std::size_t>(m)] / (m % 2 == 1 ? m + 1.0 : m + 2.0 * kappa + 1.0);
}

void DunklKernelFunctions::series_taylor(double z0, int order, double* E, double* S) const {
    const auto& C = binomials();
    for (int k = 0; k <= order; ++k) E[k] = S[k] = 0.0;
    double az = std::abs(z0);
    if (az < 1.0) {
        int M = order + 45;
        std::array<double, kMaxK + 47> pw{};
        pw[0] = 1.0;
        for (int m = 1; m <= M; ++m) pw[static_cast<std::size_t>(m)] = pw[static_cast<std::size_t>(m - 1)] * z0;
        for (int m = 0; m <= M; ++m) {
            double em = e_[static_cast<std::size_t>(m)];
            const auto& Cm = C[static_cast<std::size_t>(m)];
            for (int k = 0; k <= order && k <= m; ++k)
                E[k] += em * Cm[static_cast<std::size_t>(k)] * pw[static_cast<std::size_t>(m - k)];
            if (m % 2 == 0) {
                double sm = e_[static_cast<std::size_t>(m + 1)];
                for (int k = 0; k <= order && k <= m; ++k)
                    S[k] += sm * Cm[static_cast<std::size_t>(k)] * pw[static_cast<std::size_t>(m - k)];
            }
        }
        return;
    }
    int M = static_cast<int>(std::ceil(2.0 * az)) + order + 60;
    if (M + 2 >= kSeriesTerms) throw NumericalInstability("series argument too large for the power-series branch");
    // a_m = e_m z0^m, built incrementally to avoid overflow of z0^m
    double a = 1.0;
    double inv = 1.0 / z0;
    for (int m = 0; m <= M; ++m) {
        double zk = 1.0;
        for (int k = 0; k <= order && k <= m; ++k) {
            E[k] += a * C[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] * zk;
            zk *= inv;
        }
        double next = a * z0 / (m % 2 == 1 ? m + 1.0 : m + 2.0 * kappa_ + 1.0);
        if (m % 2 == 0) {
            // e_{m+1} z0^m = a_{m+1} / z0
            double b = next * inv;
            zk = 1.0;
            for (int k = 0; k <= order && k <= m; ++k) {
                S[k] += b * C[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] * zk;
                zk *= inv;
            }
        }
        a = next;
    }
}

void DunklKernelFunctions::asymptotic_values(double z, double& E, double& S) const {
    double u = std::abs(z);
    double nu = kappa_ - 0.5;
    double logP = std::lgamma(kappa_ + 0.5) - nu * std::log(u / 2.0) - 0.5 * std::log(2.0 * std::numbers::pi * u);
    double P = std::exp(logP);
    double ta = 1.0, tb = 1.0, sa = 1.0, sb = 1.0;
    double mu2a = 4.0 * nu * nu, mu2b = 4.0 * (nu + 1.0) * (nu + 1.0);
    double prev = INFINITY;
    for (int j = 1; j < 400; ++j) {
        double o = (2.0 * j - 1.0) * (2.0 * j - 1.0);
        double na = -ta * (mu2a - o) / (8.0 * j * u);
        double nb = -tb * (mu2b - o) / (8.0 * j * u);
        double mag = std::abs(na) + std::abs(nb);
        if (mag > prev) break;  // asymptotic series started to diverge
        ta = na;
        tb = nb;
        sa += ta;
        sb += tb;
        prev = mag;
        if (mag < 1e-18 * (std::abs(sa) + std::abs(sb))) break;
    }
    E = z > 0 ? P * (sa + sb) : P * (sa - sb);
    S = P * sb / u;
}

void DunklKernelFunctions::scaled_taylor(double z0, int s, int order, double* E, double* S) const {
    if (order < 0 || order > Jet::kMaxOrder) throw InvalidArgument("Taylor order out of range");
    std::array<double, kMaxK + 1> e{}, sv{};
    if (std::abs(z0) <= kAsymptoticThreshold) {
        series_taylor(z0, order, e.data(), sv.data());
        double f = std::exp(-s * z0);
        for (int k = 0; k <= order; ++k) {
            e[static_cast<std::size_t>(k)] *= f;
            sv[static_cast<std::size_t>(k)] *= f;
        }
    } else {
        double E0, S0;
        asymptotic_values(z0, E0, S0);
        double f = std::exp(std::abs(z0) - s * z0);
        e[0] = E0 * f;
        sv[0] = S0 * f;
        // Taylor recurrences from E' = E - 2 kappa S and z S' = E - z S - (2 kappa + 1) S
        for (int k = 0; k < order; ++k) {
            std::size_t K = static_cast<std::size_t>(k);
            double sm1 = k > 0 ? sv[K - 1] : 0.0;
            e[K + 1] = (e[K] - 2.0 * kappa_ * sv[K]) / (k + 1.0);
            sv[K + 1] = (e[K] - sm1 - (z0 + k + 2.0 * kappa_ + 1.0) * sv[K]) / (z0 * (k + 1.0));
        }
    }
    if (kappa_ == 0.0) {
        // E = exp(z) exactly; the asymptotic branch would drop the exp(-2|z|) part for z < 0
        double f = std::exp((1.0 - s) * z0);
        double c = 1.0;
        for (int k = 0; k <= order; ++k) {
            E[k] = f * c;
            c *= (1.0 - s) / (k + 1.0);
        }
    }
    // multiply by the series of exp(-s zeta)
    for (int k = 0; k <= order; ++k) {
        double se = 0.0, ss = 0.0, c = 1.0;
        for (int j = 0; j <= k; ++j) {
            se += e[static_cast<std::size_t>(k - j)] * c;
            ss += sv[static_cast<std::size_t>(k - j)] * c;
            c *= -static_cast<double>(s) / (j + 1.0);
        }
        if (kappa_ != 0.0) E[k] = se;
        S[k] = ss;
    }
}

double DunklKernelFunctions::scaled_E(double z) const {
    double E[1], S[1];
    int s = z > 0 ? 1 : (z < 0 ? -1 : 0);
    scaled_taylor(z, s, 0, E, S);
    return E[0];
}

double DunklKernelFunctions::scaled_S(double z) const {
    double E[1], S[1];
    int s = z > 0 ? 1 : (z < 0 ? -1 : 0);
    scaled_taylor(z, s, 0, E, S);
    return S[0];
}

}  // namespace dunkl
