#pragma once

#include <array>
#include <cmath>

#include "dunkl/error.hpp"

namespace dunkl {

// Truncated Taylor series c_0 + c_1 d + ... + c_n d^n.
class Jet {
public:
    static constexpr int kMaxOrder = 15;

    Jet() = default;
    explicit Jet(int order, double c0 = 0.0) : n_(order) {
        if (order < 0 || order > kMaxOrder) throw InvalidArgument("jet order out of range");
        c_.fill(0.0);
        c_[0] = c0;
    }
    static Jet variable(int order, double c0) {
        Jet j(order, c0);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return n_; }
    double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    // k-th derivative at the base point.
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c_[static_cast<std::size_t>(k)] * f;
    }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k <= n_; ++k) c_[static_cast<std::size_t>(k)] += o[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k <= n_; ++k) c_[static_cast<std::size_t>(k)] -= o[k];
        return *this;
    }
    Jet& operator*=(double s) {
        for (int k = 0; k <= n_; ++k) c_[static_cast<std::size_t>(k)] *= s;
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.n_);
        for (int i = 0; i <= a.n_; ++i) {
            if (a[i] == 0.0) continue;
            for (int j = 0; i + j <= a.n_; ++j) r[i + j] += a[i] * b[j];
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) {
        if (b[0] == 0.0) throw DomainError("jet division by a series with zero constant term");
        Jet r(a.n_);
        for (int k = 0; k <= a.n_; ++k) {
            double s = a[k];
            for (int j = 1; j <= k; ++j) s -= b[j] * r[k - j];
            r[k] = s / b[0];
        }
        return r;
    }

    // exp of a jet.
    friend Jet exp(const Jet& a) {
        Jet r(a.n_);
        r[0] = std::exp(a[0]);
        for (int k = 1; k <= a.n_; ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += j * a[j] * r[k - j];
            r[k] = s / k;
        }
        return r;
    }

    // f(base + inner) where taylor[k] = f^{(k)}(base)/k! and inner has zero constant term.
    static Jet compose(const double* taylor, const Jet& inner) {
        Jet r(inner.n_, taylor[inner.n_]);
        // Horner in the inner series
        for (int k = inner.n_ - 1; k >= 0; --k) {
            r = r * inner;
            r[0] += taylor[k];
        }
        return r;
    }

    // Series with d replaced by -d.
    Jet reflected() const {
        Jet r(*this);
        for (int k = 1; k <= n_; k += 2) r[k] = -r[k];
        return r;
    }

    Jet derivative_jet() const {
        Jet r(n_ > 0 ? n_ - 1 : 0);
        for (int k = 1; k <= n_; ++k) r[k - 1] = k * c_[static_cast<std::size_t>(k)];
        return r;
    }

    Jet truncated(int order) const {
        Jet r(order);
        for (int k = 0; k <= order && k <= n_; ++k) r[k] = c_[static_cast<std::size_t>(k)];
        return r;
    }

private:
    int n_ = 0;
    std::array<double, kMaxOrder + 1> c_{};
};

}  // namespace dunkl
