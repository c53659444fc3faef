#include "fracou/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fracou/errors.hpp"
#include "fracou/gamma.hpp"
#include "fracou/mlf.hpp"

namespace fracou {

namespace {

constexpr double kPi = 3.14159265358979323846;

// relaxation profile of the started-at-0 variants
double relax2t(const ProcessParams& p, double t) {
    return mlf(p.alpha, 1.0, -p.gamma * std::pow(2.0 * t, p.alpha));
}

void require_nonnegative_time(double s, double t) {
    if (!(s >= 0.0) || !(t >= 0.0))
        throw std::invalid_argument("kernels: times must be >= 0");
}

constexpr double kGlNode[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

double gl16(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i)
        acc += kGlWeight[i] *
               (f(mid - half * kGlNode[i]) + f(mid + half * kGlNode[i]));
    return half * acc;
}

}  // namespace

double one_minus_ml(double alpha, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("kernels: one_minus_ml needs x >= 0");
    if (x >= 1e-4) return 1.0 - mlf(alpha, 1.0, -x);
    // series from the linear term keeps full relative accuracy
    double sum = 0.0, term = 0.0;
    int sign = 1;
    for (int j = 1; j <= 8; ++j) {
        term = sign * std::pow(x, double(j)) * rgamma(alpha * j + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        sign = -sign;
    }
    return sum;
}

double time_change_alpha(double t, const ProcessParams& p) {
    p.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("kernels: time must be >= 0");
    if (t == 0.0) return 0.0;
    if (p.alpha == 1.0) return t;  // exponential cancels exactly
    return -std::log(relax2t(p, t)) / (2.0 * p.gamma);
}

double cov_time_changed_ou(double s, double t, const ProcessParams& p) {
    p.validate();
    require_nonnegative_time(s, t);
    const double lo = std::min(s, t), hi = std::max(s, t);
    if (lo == 0.0) return 0.0;
    const double e_lo = relax2t(p, lo), e_hi = relax2t(p, hi);
    return (p.theta / p.gamma) * std::sqrt(e_hi / e_lo) *
           one_minus_ml(p.alpha, p.gamma * std::pow(2.0 * lo, p.alpha));
}

double cov_time_changed_stationary_ou(double s, double t, const ProcessParams& p) {
    p.validate();
    require_nonnegative_time(s, t);
    const double lo = std::min(s, t), hi = std::max(s, t);
    return (p.theta / p.gamma) * std::sqrt(relax2t(p, hi) / relax2t(p, lo));
}

double cov_stationary(double s, const ProcessParams& p) {
    p.validate();
    return (p.theta / p.gamma) *
           mlf(p.alpha, 1.0, -p.gamma * std::pow(std::abs(s), p.alpha));
}

double cov_fractional_ou(double s, double t, const ProcessParams& p) {
    p.validate();
    require_nonnegative_time(s, t);
    const double lag = std::abs(t - s);
    return (p.theta / p.gamma) *
           (mlf(p.alpha, 1.0, -p.gamma * std::pow(lag, p.alpha)) -
            std::sqrt(relax2t(p, s) * relax2t(p, t)));
}

double kernel_value(const KernelSpec& spec, double s, double t) {
    switch (spec.model) {
        case Model::time_changed_ou:
            return cov_time_changed_ou(s, t, spec.params);
        case Model::time_changed_stationary_ou:
            return cov_time_changed_stationary_ou(s, t, spec.params);
        case Model::fractional_stationary_ou:
            return cov_stationary(t - s, spec.params);
        case Model::fractional_ou:
            return cov_fractional_ou(s, t, spec.params);
    }
    throw std::invalid_argument("kernels: unknown model");
}

double char_function(double xi, double t, const ProcessParams& p) {
    p.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("kernels: time must be >= 0");
    const double v =
        one_minus_ml(p.alpha, p.gamma * std::pow(2.0 * t, p.alpha));
    return std::exp(-(p.theta * xi * xi / (2.0 * p.gamma)) * v);
}

double cgf(double eta, double t, const ProcessParams& p) {
    p.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("kernels: time must be >= 0");
    return (eta * eta * p.theta / (2.0 * p.gamma)) *
           one_minus_ml(p.alpha, p.gamma * std::pow(2.0 * t, p.alpha));
}

double variogram_small_lag(double tau, const ProcessParams& p) {
    p.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("kernels: tau must be > 0");
    return 2.0 * (p.theta / p.gamma) *
           one_minus_ml(p.alpha, p.gamma * std::pow(tau, p.alpha));
}

double spectral_density(double omega, const ProcessParams& p,
                        const SpectrumPolicy& policy) {
    p.validate();
    const double w = std::abs(omega);
    if (w == 0.0) {
        if (p.alpha < 1.0)
            throw std::invalid_argument(
                "kernels: spectral density diverges at omega = 0 for alpha < 1");
        // alpha = 1: integral of the exponential profile is 1/gamma
        return p.theta / (kPi * p.gamma * p.gamma);
    }

    const auto f = [&](double s) {
        return std::cos(w * s) * mlf(p.alpha, 1.0, -p.gamma * std::pow(s, p.alpha));
    };
    const double z1 = 0.5 * kPi / w;

    // the profile has an s^alpha cusp at 0; geometric subdivision pushes the
    // lowest panel (the only one seeing the cusp) below 1e-9, where its
    // panel^(1+alpha) quadrature error is negligible
    const int n_geo = std::max(
        8, int(std::ceil(std::log2(std::max(z1, 1e-8) / 1e-9))));
    double head = 0.0, prev = 0.0;
    for (int k = n_geo; k >= 0; --k) {
        const double b = z1 * std::pow(2.0, -double(k));
        head += gl16(f, prev, b);
        prev = b;
    }

    // alternating between-zeros panels; partial sums enter an averaging
    // window so slowly decaying envelopes (alpha < 1) still settle
    std::vector<double> partial;
    partial.reserve(policy.n_panels + 1);
    partial.push_back(head);
    double acc = head;
    for (int k = 1; k <= policy.n_panels; ++k) {
        const double a = (2.0 * k - 1.0) * z1, b = (2.0 * k + 1.0) * z1;
        // once the envelope is far below the accumulated value the panels
        // no longer move the sum (exponential decay at alpha = 1)
        if (std::abs(mlf(p.alpha, 1.0, -p.gamma * std::pow(a, p.alpha))) * (b - a) <
            1e-18 * std::abs(acc)) {
            partial.push_back(acc);
            continue;
        }
        acc += gl16(f, a, b);
        partial.push_back(acc);
    }

    const auto averaged = [&](int last) {
        const int lo = std::max(0, last - policy.n_euler);
        std::vector<double> rows(partial.begin() + lo, partial.begin() + last + 1);
        while (rows.size() > 1) {
            for (std::size_t i = 0; i + 1 < rows.size(); ++i)
                rows[i] = 0.5 * (rows[i] + rows[i + 1]);
            rows.pop_back();
        }
        return rows[0];
    };
    const int last = int(partial.size()) - 1;
    const double v = averaged(last);
    const double v_shift = averaged(last - 1);
    const double scale = p.theta / (kPi * p.gamma);
    const double est = std::abs(v - v_shift);
    if (est > policy.rel_tol * std::abs(v) + 1e-12)
        throw accuracy_error("kernels: spectral density quadrature did not settle",
                             scale * v, scale * est);
    return scale * v;
}

}  // namespace fracou
