#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace qrtc {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_depth = 48;
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (positive half; node 0 is the interval midpoint).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void gk15(const F& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kKronrodNodes[i]);
        fv[14 - i] = f(c + h * kKronrodNodes[i]);
    }
    fv[7] = f(c);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 7; ++i) kron += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    kron += kKronrodWeights[7] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    gauss += kGaussWeights[3] * fv[7];
    value = kron * h;
    error = std::abs((kron - gauss) * h);
}

template <class F>
double integrate_rec(const F& f, double a, double b, const QuadratureOptions& opts,
                     double whole_abs, int depth) {
    double value, error;
    gk15(f, a, b, value, error);
    if (depth >= opts.max_depth ||
        error <= std::max(opts.abs_tol, opts.rel_tol * std::max(std::abs(value), whole_abs)))
        return value;
    const double c = 0.5 * (a + b);
    return integrate_rec(f, a, c, opts, whole_abs, depth + 1) +
           integrate_rec(f, c, b, opts, whole_abs, depth + 1);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
double integrate(F&& f, double a, double b, QuadratureOptions opts = {}) {
    if (!(a < b)) return 0.0;
    double value, error;
    detail::gk15(f, a, b, value, error);
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) return value;
    const double c = 0.5 * (a + b);
    return detail::integrate_rec(f, a, c, opts, std::abs(value), 1) +
           detail::integrate_rec(f, c, b, opts, std::abs(value), 1);
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [0, 1];
/// exact for polynomials of degree <= 2n-1.
std::span<const double> gauss_legendre01_nodes(int n);
std::span<const double> gauss_legendre01_weights(int n);

/// Fixed-order Gauss-Legendre quadrature of f over [0, 1].
template <class F>
double gauss_legendre01(F&& f, int n) {
    auto x = gauss_legendre01_nodes(n);
    auto w = gauss_legendre01_weights(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(x[i]);
    return acc;
}

} // namespace qrtc
