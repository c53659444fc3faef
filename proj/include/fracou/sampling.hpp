#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracou/fit.hpp"
#include "fracou/grid.hpp"
#include "fracou/kernels.hpp"
#include "fracou/subord.hpp"

namespace fracou {

// One batch of realized paths. Rows are paths, column j is grid node j.
// jitter records the ladder value eps whose diagonal shift eps*(trace/size)
// made the factorization succeed (0 when none was needed).
struct SamplePath {
    TimeGrid grid;
    Eigen::MatrixXd paths;
    std::uint64_t seed = 0;
    double jitter = 0.0;
};

struct EstimatorReport {
    Eigen::VectorXd estimate;
    Eigen::VectorXd std_error;
    int n_samples = 0;
};

struct PsdReport {
    double min_eigenvalue = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Symmetric kernel evaluated pointwise; arguments are absolute times.
using KernelFn = std::function<double(double, double)>;

Eigen::MatrixXd gram_matrix(const KernelFn& kernel, const Eigen::VectorXd& points);

// Minimum Gram eigenvalue against the tolerance -1e-8 * (trace / size).
// points need not be sorted or uniform; at most 512 of them.
PsdReport psd_check(const KernelFn& kernel, const Eigen::VectorXd& points);
PsdReport psd_check(const KernelSpec& k, const Eigen::VectorXd& points);
PsdReport psd_check(const GeneralizedKernelSpec& k, const Eigen::VectorXd& points);

// Exact Gaussian draws through a Cholesky factor of the Gram matrix.
// Reproducible: path i consumes the stream keyed by (seed xor i), so the
// result is independent of n_threads.
SamplePath sample_gaussian(const KernelFn& kernel, const TimeGrid& grid,
                           int n_paths, std::uint64_t seed, int n_threads = 1);
SamplePath sample_gaussian(const KernelSpec& k, const TimeGrid& grid,
                           int n_paths, std::uint64_t seed, int n_threads = 1);
SamplePath sample_gaussian(const GeneralizedKernelSpec& k, const TimeGrid& grid,
                           int n_paths, std::uint64_t seed, int n_threads = 1);

// Time-changed OU paths from a single Brownian path per draw, evaluated at
// the deterministic clock 1/E - 1 and scaled by sqrt((theta/gamma) E).
SamplePath sample_brownian_rep(const ProcessParams& p, const TimeGrid& grid,
                               int n_paths, std::uint64_t seed, int n_threads = 1);
SamplePath sample_brownian_rep(const GeneralizedKernelSpec& k, const TimeGrid& grid,
                               int n_paths, std::uint64_t seed, int n_threads = 1);

// W(t^alpha), the self-similar scaled Brownian motion.
SamplePath sample_scaled_bm(double alpha, const TimeGrid& grid, int n_paths,
                            std::uint64_t seed, int n_threads = 1);

// Unbiased cross moments (sample-mean centered) for the requested node
// pairs, with leave-one-out jackknife standard errors.
EstimatorReport empirical_cov(const SamplePath& sp,
                              const std::vector<std::pair<int, int>>& pairs);

// Log-log decay fit of r against s; the curvature z-score in the report
// flags departures from a pure power law.
FitReport memory_exponent(const Eigen::VectorXd& r_values,
                          const Eigen::VectorXd& s_values);

}  // namespace fracou
