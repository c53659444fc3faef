#pragma once

// Grid-based memory operators: the L1 Caputo scheme, a product-integration
// convolution-type derivative for general Levy tails, and the logarithmic
// operators built from them. All operators define node 0 as 0 (the memory
// integral is empty at t=0) and require grids starting at t0 = 0.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fracou/gamma.hpp"
#include "fracou/grid.hpp"

namespace fracou {

namespace detail {

inline void require_memory_grid(const TimeGrid& grid, int min_nodes) {
    grid.validate();
    if (grid.t0 != 0.0)
        throw std::invalid_argument("fracops: memory operators need t0 = 0");
    if (grid.n_steps + 1 < min_nodes)
        throw std::invalid_argument("fracops: too few nodes for the scheme");
}

// First derivative by finite differences, 4th order away from the edges.
// Falls back to 2nd order when the grid is too short for the wide stencils.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> first_derivative(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u, double h) {
    const Eigen::Index n = u.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
    if (n >= 5) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i >= 2 && i <= n - 3) {
                out[i] = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) /
                         (12.0 * h);
            } else if (i < 2) {
                out[i] = (-25.0 * u[i] + 48.0 * u[i + 1] - 36.0 * u[i + 2] +
                          16.0 * u[i + 3] - 3.0 * u[i + 4]) /
                         (12.0 * h);
            } else {
                out[i] = (25.0 * u[i] - 48.0 * u[i - 1] + 36.0 * u[i - 2] -
                          16.0 * u[i - 3] + 3.0 * u[i - 4]) /
                         (12.0 * h);
            }
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == 0) {
                out[i] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
            } else if (i == n - 1) {
                out[i] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
            } else {
                out[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
            }
        }
    }
    return out;
}

}  // namespace detail

// Caputo derivative of order alpha in (0,1] by the L1 scheme (piecewise
// linear reconstruction inside the memory integral). At alpha = 1 the
// operator is the plain first derivative, computed by finite differences
// rather than as a scheme limit. Error order h^{2-alpha} for smooth u.
template <class Scalar>
GridFunctionT<Scalar> caputo_derivative(const GridFunctionT<Scalar>& u, double alpha) {
    u.validate();
    detail::require_memory_grid(u.grid, 3);
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("fracops: alpha must be in (0, 1]");
    const double h = u.grid.h();
    const Eigen::Index n = u.values.size();
    GridFunctionT<Scalar> out{u.grid, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n)};
    if (alpha == 1.0) {
        out.values = detail::first_derivative<Scalar>(u.values, h);
        out.values[0] = Scalar(0);
        return out;
    }
    // b_j = j^{1-a} - (j-1)^{1-a}, j = 1..n-1
    std::vector<double> b(static_cast<std::size_t>(n - 1));
    for (Eigen::Index j = 1; j < n; ++j)
        b[j - 1] = std::pow(double(j), 1.0 - alpha) - std::pow(double(j - 1), 1.0 - alpha);
    const double c = std::pow(h, -alpha) * rgamma(2.0 - alpha);
    for (Eigen::Index m = 1; m < n; ++m) {
        Scalar acc(0);
        for (Eigen::Index k = 0; k < m; ++k)
            acc += (u.values[k + 1] - u.values[k]) * b[m - 1 - k];
        out.values[m] = c * acc;
    }
    return out;
}

// 𝓛ᵅ u = u · D^α log u. Requires u strictly positive on the grid.
template <class Scalar>
GridFunctionT<Scalar> log_operator(const GridFunctionT<Scalar>& u, double alpha) {
    u.validate();
    for (Eigen::Index i = 0; i < u.values.size(); ++i)
        if (!(u.values[i] > Scalar(0)))
            throw std::invalid_argument("fracops: log operator needs positive values");
    GridFunctionT<Scalar> logu{u.grid, u.values.array().log().matrix()};
    GridFunctionT<Scalar> d = caputo_derivative(logu, alpha);
    d.values = (d.values.array() * u.values.array()).matrix();
    return d;
}

// Tail of a Levy measure with an optional closed-form cell integral
// I(a,b) = ∫_a^b tail(s) ds. When absent, cells are integrated by fixed
// Gauss panels, which requires the tail to be smooth on each cell.
struct ConvolutionKernel {
    std::function<double(double)> tail;
    std::function<double(double, double)> cell_integral;  // may be empty
};

// nu(s) = s^{-alpha}/Gamma(1-alpha): the convolution derivative with this
// tail is the Caputo derivative of order alpha.
inline ConvolutionKernel stable_tail(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("fracops: stable tail needs alpha in (0,1)");
    const double rg1 = rgamma(1.0 - alpha);
    const double rg2 = rgamma(2.0 - alpha);
    return {[alpha, rg1](double s) { return std::pow(s, -alpha) * rg1; },
            [alpha, rg2](double a, double b) {
                return (std::pow(b, 1.0 - alpha) - std::pow(a, 1.0 - alpha)) * rg2;
            }};
}

// nu(s) = e^{-a s}, the tail of a compound Poisson subordinator with
// exponential jumps (up to the jump rate, folded into the caller's scaling).
inline ConvolutionKernel exponential_tail(double a) {
    if (!(a >= 0.0)) throw std::invalid_argument("fracops: exponential tail needs a >= 0");
    if (a == 0.0)
        return {[](double) { return 1.0; }, [](double lo, double hi) { return hi - lo; }};
    return {[a](double s) { return std::exp(-a * s); },
            [a](double lo, double hi) {
                return (std::exp(-a * lo) - std::exp(-a * hi)) / a;
            }};
}

namespace detail {

// Fixed-panel fallback when no closed-form cell integral is supplied.
// Three-point Gauss on each probed subcell; refinement disagreement on the
// first cell flags tails too singular for blind quadrature.
inline double gauss3(const std::function<double(double)>& f, double a, double b) {
    static const double node = 0.7745966692414834;  // sqrt(3/5)
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    return half * ((5.0 / 9.0) * f(mid - half * node) + (8.0 / 9.0) * f(mid) +
                   (5.0 / 9.0) * f(mid + half * node));
}

inline double cell_by_quadrature(const std::function<double(double)>& f, double a,
                                 double b) {
    auto panels = [&](int n) {
        double acc = 0.0;
        const double w = (b - a) / n;
        for (int i = 0; i < n; ++i) acc += gauss3(f, a + i * w, a + (i + 1) * w);
        return acc;
    };
    const double i1 = panels(1), i2 = panels(2), i4 = panels(4);
    // smooth integrands gain ~6 orders per halving; a sticky correction
    // means an endpoint singularity the panels cannot resolve
    const double c1 = std::abs(i2 - i1), c2 = std::abs(i4 - i2);
    if (c2 > 0.05 * c1 && c2 > 1e-13 * std::abs(i4))
        throw std::invalid_argument(
            "fracops: tail too singular for cell quadrature; supply a closed-form "
            "cell integral");
    return i4;
}

}  // namespace detail

// D^g u(t_m) = ∫_0^{t_m} u'(t_m - s) nu(s) ds by product integration:
// u' is the per-cell finite difference, nu integrated exactly per cell.
inline GridFunction convolution_derivative(const GridFunction& u,
                                           const ConvolutionKernel& nu) {
    u.validate();
    detail::require_memory_grid(u.grid, 3);
    if (!nu.tail && !nu.cell_integral)
        throw std::invalid_argument("fracops: convolution kernel has no tail");
    const double h = u.grid.h();
    const Eigen::Index n = u.values.size();
    std::vector<double> cell(static_cast<std::size_t>(n - 1));
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double lo = k * h, hi = (k + 1) * h;
        cell[k] = nu.cell_integral ? nu.cell_integral(lo, hi)
                                   : detail::cell_by_quadrature(nu.tail, lo, hi);
        if (!std::isfinite(cell[k]))
            throw std::invalid_argument("fracops: tail not integrable over a cell");
    }
    GridFunction out{u.grid, Eigen::VectorXd::Zero(n)};
    for (Eigen::Index m = 1; m < n; ++m) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < m; ++k)
            acc += (u.values[m - k] - u.values[m - k - 1]) * cell[k];
        out.values[m] = acc / h;
    }
    return out;
}

// 𝓛ᵍ u = u · D^g log u.
inline GridFunction log_operator_g(const GridFunction& u, const ConvolutionKernel& nu) {
    u.validate();
    for (Eigen::Index i = 0; i < u.values.size(); ++i)
        if (!(u.values[i] > 0.0))
            throw std::invalid_argument("fracops: log operator needs positive values");
    GridFunction logu{u.grid, u.values.array().log().matrix()};
    GridFunction d = convolution_derivative(logu, nu);
    d.values = (d.values.array() * u.values.array()).matrix();
    return d;
}

}  // namespace fracou
