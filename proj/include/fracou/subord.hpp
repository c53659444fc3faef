#pragma once

// Bernstein functions of subordinators, the Laplace transform of the
// inverse-subordinator marginal, the generalized deterministic clock, and
// the covariance kernels driven by a general Bernstein family. The stable
// and compound-Poisson-exponential families have closed forms; anything
// else goes through numerical Laplace inversion.

#include <complex>
#include <functional>
#include <stdexcept>

#include "fracou/fit.hpp"

namespace fracou {

struct BernsteinSpec {
    enum class Family { stable, compound_poisson_exp, custom };

    Family family = Family::stable;
    double alpha = 0.5;  // stable index, in (0,1]
    double a = 1.0;      // jump rate of the compound Poisson family

    // custom triplet: killing rate, drift, and the Levy tail nu(s).
    // g(s) = kill + drift*s + integral of (1 - e^{-s x}) against the Levy
    // measure; the caller supplies g directly since the measure itself is
    // not needed anywhere else.
    double kill = 0.0;
    double drift = 0.0;
    std::function<std::complex<double>(std::complex<double>)> custom_g;

    static BernsteinSpec stable_family(double alpha) {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("subord: stable index must be in (0, 1]");
        BernsteinSpec s;
        s.family = Family::stable;
        s.alpha = alpha;
        return s;
    }

    static BernsteinSpec cpe_family(double a) {
        if (!(a > 0.0)) throw std::invalid_argument("subord: jump rate must be > 0");
        BernsteinSpec s;
        s.family = Family::compound_poisson_exp;
        s.a = a;
        return s;
    }

    static BernsteinSpec custom_family(
        std::function<std::complex<double>(std::complex<double>)> g) {
        if (!g) throw std::invalid_argument("subord: custom family needs g");
        BernsteinSpec s;
        s.family = Family::custom;
        s.custom_g = std::move(g);
        return s;
    }

    // Laplace exponent g(s) continued off the real axis (used by the
    // inversion contour).
    std::complex<double> g(std::complex<double> s) const;
};

// Two time conventions appear in the closed-form kernels: the started-at-0
// family carries the doubled time E(-gamma (2t)^a), the generalized family
// is usually written in plain t. The flag selects which one a kernel uses.
enum class TimeScale { two_t, plain_t };

// l~(gamma, t) = E exp(-gamma L(t)), the Laplace transform of the inverse
// subordinator at time t. Closed forms for the stable and CPE families;
// fixed-Talbot inversion of g(s)/(s (gamma + g(s))) otherwise.
double ltilde(double gamma, double t, const BernsteinSpec& spec);

// Density of the inverse CPE subordinator, e^{-x-at} W(x a t) with the
// modified-Bessel-type Wright profile.
double inverse_subordinator_density_cpe(double x, double t, double a);

// Generalized clock -log l~(gamma, t) / (2 gamma).
double time_change_g(double t, double gamma, const BernsteinSpec& spec);

struct GeneralizedKernelSpec {
    enum class Model { x_g, ybar_g, y_g };

    Model model = Model::ybar_g;
    BernsteinSpec bernstein;
    double gamma = 1.0;
    double theta = 1.0;
    TimeScale scale = TimeScale::two_t;

    void validate() const {
        if (!(gamma > 0.0)) throw std::invalid_argument("subord: gamma must be > 0");
        if (!(theta > 0.0)) throw std::invalid_argument("subord: theta must be > 0");
    }
};

// Covariance of the generalized time-changed OU process started at 0.
// Note the variance at t = 0+ is (theta/gamma)(1 - l~(gamma, 0)), nonzero
// whenever the subordinator can wait at zero (the CPE family): surfaced,
// not renormalized.
double cov_X_g(double s, double t, const GeneralizedKernelSpec& k);

// Stationary generalized kernel r(s) = (theta/gamma) l~(gamma, |s|).
double cov_Ybar_g(double s, const GeneralizedKernelSpec& k);

// Non-stationary long-memory analogue; vanishes at s = t = 0.
double cov_Y_g(double s, double t, const GeneralizedKernelSpec& k);

// Dispatch on the model tag; stationary kernels see the lag t - s.
double kernel_value_g(const GeneralizedKernelSpec& k, double s, double t);

// Fits log r(s) over the given range and reports the decay exponent with
// the power-law curvature flag. s_values must be positive and span at
// least two decades; r must stay positive over the range.
FitReport lrd_tail_check(const GeneralizedKernelSpec& k,
                         const Eigen::VectorXd& s_values);

namespace detail {

// Fixed-Talbot inversion of a Laplace transform at time t > 0 with M nodes.
double talbot(const std::function<std::complex<double>(std::complex<double>)>& F,
              double t, int M);

}  // namespace detail

}  // namespace fracou
