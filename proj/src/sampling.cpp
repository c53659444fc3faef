#include "fracou/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fracou/errors.hpp"
#include "fracou/mlf.hpp"
#include "fracou/rng.hpp"

namespace fracou {

namespace {

void require_points(const Eigen::VectorXd& points) {
    if (points.size() < 1)
        throw std::invalid_argument("sampling: need at least one point");
    if (!points.allFinite())
        throw std::invalid_argument("sampling: points must be finite");
}

void require_paths(int n_paths) {
    if (n_paths < 1)
        throw std::invalid_argument("sampling: n_paths must be >= 1");
}

// Lower Cholesky factor after the jitter ladder; returns the ladder value.
std::pair<Eigen::MatrixXd, double> factorize(const Eigen::MatrixXd& c) {
    const double scale = c.trace() / static_cast<double>(c.rows());
    for (double eps : {0.0, 1e-12, 1e-10, 1e-8}) {
        Eigen::MatrixXd shifted = c;
        shifted.diagonal().array() += eps * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success)
            return {Eigen::MatrixXd(llt.matrixL()), eps};
    }
    throw accuracy_error(
        "sampling: covariance factorization failed after maximum jitter");
}

void parallel_rows(int n_rows, int n_threads,
                   const std::function<void(int, int)>& body) {
    if (n_threads <= 1 || n_rows < 2) {
        body(0, n_rows);
        return;
    }
    const int block = (n_rows + n_threads - 1) / n_threads;
    std::vector<std::thread> workers;
    for (int th = 0; th < n_threads; ++th) {
        const int lo = th * block;
        const int hi = std::min(n_rows, lo + block);
        if (lo >= hi) break;
        workers.emplace_back(body, lo, hi);
    }
    for (auto& w : workers) w.join();
}

// Common body of the clock representations: one Brownian path per draw,
// read off at the given clock values and scaled per node.
SamplePath clock_paths(const TimeGrid& grid, const Eigen::VectorXd& clock,
                       const Eigen::VectorXd& amplitude, int n_paths,
                       std::uint64_t seed, int n_threads) {
    const auto n = static_cast<int>(clock.size());
    Eigen::VectorXd dclock(n);
    double prev = 0.0;
    for (int j = 0; j < n; ++j) {
        dclock[j] = clock[j] - prev;
        if (dclock[j] < 0.0)
            throw accuracy_error("sampling: clock is not non-decreasing");
        prev = clock[j];
    }
    SamplePath sp{grid, Eigen::MatrixXd(n_paths, n), seed, 0.0};
    parallel_rows(n_paths, n_threads, [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            CounterRng rng(seed, static_cast<std::uint64_t>(i));
            double w = 0.0;
            for (int j = 0; j < n; ++j) {
                w += rng.normal() * std::sqrt(dclock[j]);
                sp.paths(i, j) = amplitude[j] * w;
            }
        }
    });
    return sp;
}

double ltilde_clock(const GeneralizedKernelSpec& k, double t) {
    const double arg = k.scale == TimeScale::two_t ? 2.0 * t : t;
    return ltilde(k.gamma, arg, k.bernstein);
}

}  // namespace

Eigen::MatrixXd gram_matrix(const KernelFn& kernel, const Eigen::VectorXd& points) {
    require_points(points);
    const auto n = points.size();
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            c(i, j) = kernel(points[i], points[j]);
            c(j, i) = c(i, j);
        }
    if (!c.allFinite())
        throw std::invalid_argument("sampling: kernel produced non-finite values");
    return c;
}

PsdReport psd_check(const KernelFn& kernel, const Eigen::VectorXd& points) {
    if (points.size() > 512)
        throw std::invalid_argument("sampling: PSD check limited to 512 points");
    const Eigen::MatrixXd c = gram_matrix(kernel, points);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c,
                                                      Eigen::EigenvaluesOnly);
    PsdReport report;
    report.min_eigenvalue = es.eigenvalues().minCoeff();
    report.threshold = -1e-8 * c.trace() / static_cast<double>(c.rows());
    report.pass = report.min_eigenvalue >= report.threshold;
    return report;
}

PsdReport psd_check(const KernelSpec& k, const Eigen::VectorXd& points) {
    k.params.validate();
    return psd_check(
        [&k](double s, double t) { return kernel_value(k, s, t); }, points);
}

PsdReport psd_check(const GeneralizedKernelSpec& k, const Eigen::VectorXd& points) {
    k.validate();
    return psd_check(
        [&k](double s, double t) { return kernel_value_g(k, s, t); }, points);
}

SamplePath sample_gaussian(const KernelFn& kernel, const TimeGrid& grid,
                           int n_paths, std::uint64_t seed, int n_threads) {
    grid.validate();
    require_paths(n_paths);
    const Eigen::VectorXd pts = grid.nodes();
    const auto [l, eps] = factorize(gram_matrix(kernel, pts));
    const auto n = pts.size();
    SamplePath sp{grid, Eigen::MatrixXd(n_paths, n), seed, eps};
    parallel_rows(n_paths, n_threads, [&](int lo, int hi) {
        Eigen::RowVectorXd z(n);
        for (int i = lo; i < hi; ++i) {
            CounterRng rng(seed, static_cast<std::uint64_t>(i));
            for (Eigen::Index j = 0; j < n; ++j) z[j] = rng.normal();
            sp.paths.row(i).noalias() = z * l.transpose();
        }
    });
    return sp;
}

SamplePath sample_gaussian(const KernelSpec& k, const TimeGrid& grid,
                           int n_paths, std::uint64_t seed, int n_threads) {
    k.params.validate();
    return sample_gaussian(
        [&k](double s, double t) { return kernel_value(k, s, t); }, grid,
        n_paths, seed, n_threads);
}

SamplePath sample_gaussian(const GeneralizedKernelSpec& k, const TimeGrid& grid,
                           int n_paths, std::uint64_t seed, int n_threads) {
    k.validate();
    return sample_gaussian(
        [&k](double s, double t) { return kernel_value_g(k, s, t); }, grid,
        n_paths, seed, n_threads);
}

SamplePath sample_brownian_rep(const ProcessParams& p, const TimeGrid& grid,
                               int n_paths, std::uint64_t seed, int n_threads) {
    p.validate();
    grid.validate();
    require_paths(n_paths);
    const auto n = grid.n_steps + 1;
    Eigen::VectorXd clock(n), amplitude(n);
    for (int j = 0; j < n; ++j) {
        const double e = mlf(p.alpha, 1.0,
                             -p.gamma * std::pow(2.0 * grid.node(j), p.alpha));
        clock[j] = 1.0 / e - 1.0;
        amplitude[j] = std::sqrt(p.theta / p.gamma * e);
    }
    return clock_paths(grid, clock, amplitude, n_paths, seed, n_threads);
}

SamplePath sample_brownian_rep(const GeneralizedKernelSpec& k, const TimeGrid& grid,
                               int n_paths, std::uint64_t seed, int n_threads) {
    k.validate();
    if (k.model != GeneralizedKernelSpec::Model::x_g)
        throw std::invalid_argument(
            "sampling: Brownian representation exists for the started-at-0 model only");
    grid.validate();
    require_paths(n_paths);
    const auto n = grid.n_steps + 1;
    Eigen::VectorXd clock(n), amplitude(n);
    for (int j = 0; j < n; ++j) {
        const double e = ltilde_clock(k, grid.node(j));
        clock[j] = 1.0 / e - 1.0;
        amplitude[j] = std::sqrt(k.theta / k.gamma * e);
    }
    return clock_paths(grid, clock, amplitude, n_paths, seed, n_threads);
}

SamplePath sample_scaled_bm(double alpha, const TimeGrid& grid, int n_paths,
                            std::uint64_t seed, int n_threads) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::invalid_argument("sampling: alpha must lie in (0,1]");
    grid.validate();
    require_paths(n_paths);
    const auto n = grid.n_steps + 1;
    Eigen::VectorXd clock(n);
    for (int j = 0; j < n; ++j) clock[j] = std::pow(grid.node(j), alpha);
    return clock_paths(grid, clock, Eigen::VectorXd::Ones(n), n_paths, seed,
                       n_threads);
}

EstimatorReport empirical_cov(const SamplePath& sp,
                              const std::vector<std::pair<int, int>>& pairs) {
    const auto m = sp.paths.rows();
    if (m < 2)
        throw std::invalid_argument("sampling: need at least 2 paths");
    EstimatorReport report;
    report.estimate.resize(static_cast<Eigen::Index>(pairs.size()));
    report.std_error.resize(static_cast<Eigen::Index>(pairs.size()));
    report.n_samples = static_cast<int>(m);
    const double md = static_cast<double>(m);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [a, b] = pairs[k];
        if (a < 0 || b < 0 || a >= sp.paths.cols() || b >= sp.paths.cols())
            throw std::invalid_argument("sampling: pair index out of range");
        const auto xa = sp.paths.col(a), xb = sp.paths.col(b);
        const double sa = xa.sum(), sb = xb.sum(), sab = xa.dot(xb);
        report.estimate[static_cast<Eigen::Index>(k)] =
            (sab - sa * sb / md) / (md - 1.0);
        // leave-one-out replicates from the same running sums
        double mean = 0.0;
        Eigen::VectorXd rep(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double ra = sa - xa[i], rb = sb - xb[i];
            rep[i] = (sab - xa[i] * xb[i] - ra * rb / (md - 1.0)) / (md - 2.0);
            mean += rep[i];
        }
        mean /= md;
        report.std_error[static_cast<Eigen::Index>(k)] =
            std::sqrt((md - 1.0) / md *
                      (rep.array() - mean).square().sum());
    }
    return report;
}

FitReport memory_exponent(const Eigen::VectorXd& r_values,
                          const Eigen::VectorXd& s_values) {
    return loglog_fit(s_values, r_values);
}

}  // namespace fracou
