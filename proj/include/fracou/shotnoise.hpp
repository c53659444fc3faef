#pragma once

#include <cstdint>
#include <vector>

#include "fracou/grid.hpp"
#include "fracou/sampling.hpp"

namespace fracou {

// Poisson shot noise with the shifted power-law response. The driving
// process runs at rate n * lambda0 and the response is scaled by 1/sqrt(n);
// n = 1 is the unrescaled process.
struct ShotNoiseSpec {
    double lambda0 = 1.0;
    double alpha = 0.5;
    double gamma = 1.0;
    double xi0 = 0.1;
    int n = 1;

    void validate() const {
        if (!(lambda0 > 0.0))
            throw std::invalid_argument("shotnoise: lambda0 must be > 0");
        if (!(alpha > 0.0) || !(alpha <= 1.0))
            throw std::invalid_argument("shotnoise: alpha must lie in (0,1]");
        if (!(gamma > 0.0))
            throw std::invalid_argument("shotnoise: gamma must be > 0");
        if (!(xi0 >= 0.0))
            throw std::invalid_argument("shotnoise: xi0 must be >= 0");
        if (n < 1) throw std::invalid_argument("shotnoise: n must be >= 1");
    }
};

// Response sqrt((u+xi0)^(alpha-1) E_{a,a}(-gamma 2^a (u+xi0)^a)) for u > 0,
// zero for u <= 0. Positive, decreasing, tail ~ u^(-(alpha+1)/2).
double response_h0(double u, const ShotNoiseSpec& spec);

// Mean of the uncentered sum, mu_n(t) = n lambda0 int_0^t h0(u) du.
double mean_mu(const ShotNoiseSpec& spec, double t);

// Variance of the Gaussian limit at time t (Campbell second moment),
// (lambda0 / c)[E_{a,1}(-c xi0^a) - E_{a,1}(-c (t+xi0)^a)], c = gamma 2^a.
double limit_variance(const ShotNoiseSpec& spec, double t);

// Covariance of the Gaussian limit, lambda0 int_0^min h0(s-u) h0(t-u) du.
double limit_covariance(const ShotNoiseSpec& spec, double s, double t);

// Printed second/fourth moment formulas for the fresh-event increment
// overshoot W(s; rho); order is 2 or 4. Kept exactly as stated, including
// the n-scaling prefactors (they are not used by the convergence checks).
double w_moment(const ShotNoiseSpec& spec, double s, double rho, int order);

// Centered rescaled paths on the grid: per path, Poisson event count on
// [0, t_max], conditionally uniform event times, response accumulation,
// centering by mu_n / sqrt(n).
SamplePath simulate_un(const ShotNoiseSpec& spec, const TimeGrid& grid,
                       int n_paths, std::uint64_t seed, int n_threads = 1);

// Two-sided Kolmogorov-Smirnov distance of a sample against a N(0, sigma^2)
// marginal, and the Stephens asymptotic p-value approximation.
double ks_statistic_normal(const Eigen::VectorXd& sample, double sigma);
double ks_pvalue(double d, int n_samples);

struct ConvergenceEntry {
    int n = 1;
    double ks_stat = 0.0;
    double ks_p = 0.0;
    Eigen::Vector3d cov_z = Eigen::Vector3d::Zero();  // vs limit_covariance
};

struct ConvergenceReport {
    int reference_node = 0;  // always the last grid node
    std::vector<ConvergenceEntry> entries;
};

// Runs simulate_un for each n in n_values (ascending) with the same seed
// and reports the marginal KS distance at the last node plus covariance
// z-scores at three fixed node pairs.
ConvergenceReport convergence_report(const ShotNoiseSpec& base,
                                     const std::vector<int>& n_values,
                                     const TimeGrid& grid, int n_paths,
                                     std::uint64_t seed, int n_threads = 1);

}  // namespace fracou
