#include "fracou/shotnoise.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fracou/errors.hpp"
#include "fracou/mlf.hpp"
#include "fracou/rng.hpp"

namespace fracou {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1], positive half (symmetric)
constexpr double kGlNode[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

template <typename F>
double gl16(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i)
        acc += kGlWeight[i] * (f(c - h * kGlNode[i]) + f(c + h * kGlNode[i]));
    return acc * h;
}

template <typename F>
double adaptive(const F& f, double a, double b, double tol, int depth) {
    const double whole = gl16(f, a, b);
    const double mid = 0.5 * (a + b);
    const double halves = gl16(f, a, mid) + gl16(f, mid, b);
    if (std::abs(whole - halves) <= tol * std::max(1.0, std::abs(halves)))
        return halves;
    if (depth <= 0)
        throw accuracy_error("shotnoise: quadrature did not converge", halves,
                             std::abs(whole - halves));
    return adaptive(f, a, mid, 0.5 * tol, depth - 1) +
           adaptive(f, mid, b, 0.5 * tol, depth - 1);
}

// response without the u > 0 indicator, defined for u >= 0
double h0_profile(double u, const ShotNoiseSpec& spec) {
    const double c = spec.gamma * std::pow(2.0, spec.alpha);
    const double w = u + spec.xi0;
    if (spec.alpha == 1.0) return std::exp(-spec.gamma * (u + spec.xi0));
    return std::sqrt(std::pow(w, spec.alpha - 1.0) *
                     mlf(spec.alpha, spec.alpha, -c * std::pow(w, spec.alpha)));
}

// int_0^t h0(u)^k du with the endpoint weakness removed by u = v^2
double h0_power_integral(const ShotNoiseSpec& spec, double t, int k) {
    if (t <= 0.0) return 0.0;
    const auto f = [&](double v) {
        return 2.0 * v * std::pow(h0_profile(v * v, spec), k);
    };
    return adaptive(f, 0.0, std::sqrt(t), 1e-11, 24);
}

}  // namespace

double response_h0(double u, const ShotNoiseSpec& spec) {
    spec.validate();
    if (u == 0.0 && spec.xi0 == 0.0 && spec.alpha < 1.0)
        throw std::invalid_argument(
            "shotnoise: response is singular at u = 0 when xi0 = 0");
    if (u <= 0.0) return 0.0;
    return h0_profile(u, spec);
}

double mean_mu(const ShotNoiseSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("shotnoise: time must be >= 0");
    return spec.n * spec.lambda0 * h0_power_integral(spec, t, 1);
}

double limit_variance(const ShotNoiseSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("shotnoise: time must be >= 0");
    const double c = spec.gamma * std::pow(2.0, spec.alpha);
    const double head = mlf(spec.alpha, 1.0, -c * std::pow(spec.xi0, spec.alpha));
    const double tail =
        mlf(spec.alpha, 1.0, -c * std::pow(t + spec.xi0, spec.alpha));
    return spec.lambda0 / c * (head - tail);
}

double limit_covariance(const ShotNoiseSpec& spec, double s, double t) {
    spec.validate();
    if (!(s >= 0.0) || !(t >= 0.0))
        throw std::invalid_argument("shotnoise: times must be >= 0");
    const double lo = std::min(s, t), hi = std::max(s, t);
    if (lo == 0.0) return 0.0;
    const double gap = hi - lo;
    // int_0^lo h0(w) h0(w + gap) dw, then w = v^2
    const auto f = [&](double v) {
        const double w = v * v;
        return 2.0 * v * h0_profile(w, spec) * h0_profile(w + gap, spec);
    };
    return spec.lambda0 * adaptive(f, 0.0, std::sqrt(lo), 1e-11, 24);
}

double w_moment(const ShotNoiseSpec& spec, double s, double rho, int order) {
    spec.validate();
    if (!(s > 0.0) || !(rho >= 0.0))
        throw std::invalid_argument("shotnoise: need s > 0 and rho >= 0");
    if (order != 2 && order != 4)
        throw std::invalid_argument("shotnoise: order must be 2 or 4");
    if (rho == 0.0) return 0.0;
    const double lambda = spec.n * spec.lambda0;
    const auto diff_pow = [&](double v, int k) {
        const double w = v * v;
        return 2.0 * v *
               std::pow(h0_profile(w, spec) - h0_profile(w + rho, spec), k);
    };
    const double i2 =
        adaptive([&](double v) { return diff_pow(v, 2); }, 0.0, std::sqrt(s),
                 1e-11, 24);
    if (order == 2) return lambda / std::sqrt(static_cast<double>(spec.n)) * i2;
    const double i4 =
        adaptive([&](double v) { return diff_pow(v, 4); }, 0.0, std::sqrt(s),
                 1e-11, 24);
    const double n = static_cast<double>(spec.n);
    return lambda / (n * n) * i4 + 3.0 * lambda * lambda / n * i2 * i2;
}

SamplePath simulate_un(const ShotNoiseSpec& spec, const TimeGrid& grid,
                       int n_paths, std::uint64_t seed, int n_threads) {
    spec.validate();
    grid.validate();
    if (!(spec.xi0 > 0.0))
        throw std::invalid_argument("shotnoise: simulation requires xi0 > 0");
    if (n_paths < 1)
        throw std::invalid_argument("shotnoise: n_paths must be >= 1");
    const double rate = spec.n * spec.lambda0 * grid.t_max;
    if (rate > 1e9)
        throw std::invalid_argument(
            "shotnoise: expected event count exceeds 1e9");

    // response values tabulated once; event sums interpolate linearly
    const int n_table = 20000;
    const double u_max = 1.05 * grid.t_max;
    const double du = u_max / n_table;
    Eigen::VectorXd table(n_table + 1);
    for (int i = 0; i <= n_table; ++i) table[i] = h0_profile(i * du, spec);
    const auto h0_interp = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = u / du;
        const auto i = static_cast<int>(x);
        if (i >= n_table) return table[n_table];
        const double frac = x - i;
        return (1.0 - frac) * table[i] + frac * table[i + 1];
    };

    const double root_n = std::sqrt(static_cast<double>(spec.n));
    const auto n_nodes = grid.n_steps + 1;
    Eigen::VectorXd centering(n_nodes);
    for (int j = 0; j < n_nodes; ++j)
        centering[j] = mean_mu(spec, grid.node(j)) / root_n;

    SamplePath sp{grid, Eigen::MatrixXd(n_paths, n_nodes), seed, 0.0};
    const auto body = [&](int lo, int hi) {
        std::vector<double> events;
        for (int i = lo; i < hi; ++i) {
            CounterRng rng(seed, static_cast<std::uint64_t>(i));
            const auto count = poisson(rng, rate);
            events.resize(count);
            for (auto& e : events) e = rng.u01() * grid.t_max;
            std::sort(events.begin(), events.end());
            for (int j = 0; j < n_nodes; ++j) {
                const double t = grid.node(j);
                double acc = 0.0;
                for (const double e : events) {
                    if (e >= t) break;
                    acc += h0_interp(t - e);
                }
                sp.paths(i, j) = acc / root_n - centering[j];
            }
        }
    };
    if (n_threads <= 1 || n_paths < 2) {
        body(0, n_paths);
    } else {
        const int block = (n_paths + n_threads - 1) / n_threads;
        std::vector<std::thread> workers;
        for (int th = 0; th < n_threads; ++th) {
            const int lo = th * block;
            const int hi = std::min(n_paths, lo + block);
            if (lo >= hi) break;
            workers.emplace_back(body, lo, hi);
        }
        for (auto& w : workers) w.join();
    }
    return sp;
}

double ks_statistic_normal(const Eigen::VectorXd& sample, double sigma) {
    if (sample.size() < 1)
        throw std::invalid_argument("shotnoise: KS needs a nonempty sample");
    if (!(sigma > 0.0))
        throw std::invalid_argument("shotnoise: KS sigma must be > 0");
    std::vector<double> x(sample.data(), sample.data() + sample.size());
    std::sort(x.begin(), x.end());
    const double m = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = 0.5 * std::erfc(-x[i] / (sigma * std::sqrt(2.0)));
        d = std::max(d, std::max((i + 1.0) / m - f, f - i / m));
    }
    return d;
}

double ks_pvalue(double d, int n_samples) {
    if (!(d >= 0.0) || n_samples < 1)
        throw std::invalid_argument("shotnoise: bad KS inputs");
    const double rn = std::sqrt(static_cast<double>(n_samples));
    const double lam = (rn + 0.12 + 0.11 / rn) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lam * lam);
        p += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

ConvergenceReport convergence_report(const ShotNoiseSpec& base,
                                     const std::vector<int>& n_values,
                                     const TimeGrid& grid, int n_paths,
                                     std::uint64_t seed, int n_threads) {
    base.validate();
    if (n_values.empty())
        throw std::invalid_argument("shotnoise: need at least one n value");
    for (std::size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] <= n_values[i - 1])
            throw std::invalid_argument("shotnoise: n values must increase");

    const int last = grid.n_steps;
    const std::vector<std::pair<int, int>> pairs = {
        {last / 3, 2 * last / 3}, {last / 2, last}, {last, last}};

    ConvergenceReport report;
    report.reference_node = last;
    for (const int n : n_values) {
        ShotNoiseSpec spec = base;
        spec.n = n;
        const auto sp = simulate_un(spec, grid, n_paths, seed, n_threads);
        ConvergenceEntry entry;
        entry.n = n;
        const double sigma = std::sqrt(limit_variance(spec, grid.node(last)));
        entry.ks_stat = ks_statistic_normal(sp.paths.col(last), sigma);
        entry.ks_p = ks_pvalue(entry.ks_stat, n_paths);
        const auto est = empirical_cov(sp, pairs);
        for (int k = 0; k < 3; ++k) {
            const double target = limit_covariance(
                spec, grid.node(pairs[k].first), grid.node(pairs[k].second));
            entry.cov_z[k] =
                std::abs(est.estimate[k] - target) / est.std_error[k];
        }
        report.entries.push_back(entry);
    }
    return report;
}

}  // namespace fracou
