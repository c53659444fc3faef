#pragma once

// Closed forms for the fractional Ornstein-Uhlenbeck family: the
// deterministic time change, covariance kernels of the four process
// variants, characteristic function, cumulant generating function,
// variogram, and the spectral density of the stationary kernel.

#include <cmath>
#include <stdexcept>

namespace fracou {

struct ProcessParams {
    double alpha = 0.5;  // memory order, in (0,1]
    double gamma = 1.0;  // mean reversion rate
    double theta = 1.0;  // noise intensity

    void validate() const {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("kernels: alpha must be in (0, 1]");
        if (!(gamma > 0.0)) throw std::invalid_argument("kernels: gamma must be > 0");
        if (!(theta > 0.0)) throw std::invalid_argument("kernels: theta must be > 0");
    }

    // drift and diffusion coefficients of the associated evolution equation
    // for the characteristic function
    double fp_drift() const { return gamma * std::pow(2.0, alpha - 1.0); }
    double fp_diff() const { return theta * std::pow(2.0, alpha - 1.0); }
};

enum class Model {
    time_changed_ou,             // started at 0, Markovian
    time_changed_stationary_ou,  // stationary start, Markovian
    fractional_stationary_ou,    // stationary, long memory
    fractional_ou,               // started at 0, long memory
};

struct KernelSpec {
    Model model = Model::fractional_stationary_ou;
    ProcessParams params;
};

// 1 - E_{alpha,1}(-x) for x >= 0, with the leading-term cancellation
// avoided for small x by summing the series from the linear term.
double one_minus_ml(double alpha, double x);

// Deterministic clock T(t) = -log E_{alpha,1}(-gamma (2t)^alpha) / (2 gamma);
// strictly increasing, T(0) = 0, and T(t) = t exactly at alpha = 1.
double time_change_alpha(double t, const ProcessParams& p);

// Covariance of the OU process run on the clock above, started at 0.
double cov_time_changed_ou(double s, double t, const ProcessParams& p);

// Same clock, stationary initial condition: depends on (s,t) only through
// the relaxation ratio; equals theta/gamma on the diagonal.
double cov_time_changed_stationary_ou(double s, double t, const ProcessParams& p);

// Stationary kernel r(s) = (theta/gamma) E_{alpha,1}(-gamma |s|^alpha).
double cov_stationary(double s, const ProcessParams& p);

// Non-stationary long-memory kernel with zero variance at t = 0.
double cov_fractional_ou(double s, double t, const ProcessParams& p);

// Dispatch on the model enum; stationary models use |t - s|.
double kernel_value(const KernelSpec& spec, double s, double t);

// Characteristic function of the time-changed OU marginal,
// exp(-(theta xi^2 / 2 gamma) [1 - E_{alpha,1}(-gamma (2t)^alpha)]).
double char_function(double xi, double t, const ProcessParams& p);

// Cumulant generating function eta^2 Var(t) / 2 of the same marginal.
double cgf(double eta, double t, const ProcessParams& p);

// E [Ybar(t+tau) - Ybar(t)]^2 = 2 (theta/gamma)[1 - E_{alpha,1}(-gamma tau^alpha)].
double variogram_small_lag(double tau, const ProcessParams& p);

struct SpectrumPolicy {
    int n_panels = 48;   // oscillation half-periods integrated explicitly
    int n_euler = 24;    // width of the averaging window on the partial sums
    double rel_tol = 1e-6;
};

// S(omega) = (theta / pi gamma) Int_0^inf cos(|omega| s) E_{alpha,1}(-gamma s^alpha) ds
// by Gauss panels between consecutive cosine zeros with iterated averaging
// of the alternating partial sums. Diverges at omega = 0 for alpha < 1
// (long memory); alpha = 1 returns the finite limit there. Throws
// accuracy_error when the averaging window has not settled to rel_tol.
double spectral_density(double omega, const ProcessParams& p,
                        const SpectrumPolicy& policy = {});

}  // namespace fracou
