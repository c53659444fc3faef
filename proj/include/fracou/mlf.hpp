#pragma once

#include <functional>
#include <vector>

namespace fracou {

// Argument bundle for the two-parameter Mittag-Leffler function
// E_{beta,gam}(x) = sum_j x^j / Gamma(beta*j + gam).
struct MLSpec {
    double beta;  // order, > 0
    double gam;   // second parameter, > 0
    double x;     // real argument

    void validate() const;  // throws std::invalid_argument
};

enum class EvalMethod { series, asymptotic, integral };

struct EvalReport {
    double value;
    EvalMethod method;
    int terms_used;    // >= 1
    double est_error;  // >= 0, absolute
};

// Evaluate E_{beta,gam}(x) with a reported method and error estimate.
// Strategy: defended power series for x >= 0 or beta >= 1; for negative
// arguments with beta in (0,1) it tries, in order, the power-law expansion
// (when the windowed remainder bound certifies it), the series (when the
// roundoff estimate certifies it), and otherwise an integral representation,
// with parameter reduction for gam > 1 + beta.
// Throws std::invalid_argument on bad parameters and accuracy_error
// (carrying the partial value) when no branch can meet its bound.
EvalReport mittag_leffler(const MLSpec& spec);

// Value-only convenience wrapper.
double mlf(double beta, double gam, double x);

// d/dw E_{alpha,1}(-k w^alpha) = -k w^{alpha-1} E_{alpha,alpha}(-k w^alpha).
// Preconditions: alpha in (0,1], k >= 0, w > 0.
double mlf_kernel_derivative(double alpha, double k, double w);

// Wright function W_{beta,gam}(x) = sum_j x^{beta j} / (j! Gamma(beta*j + gam)).
// Series evaluation; x < 0 is supported only when beta is an integer
// (fractional powers of a negative base are undefined over the reals).
double wright(double beta, double gam, double x);

// Spot check of complete monotonicity: (-1)^n f^(n)(x) >= 0 for
// n = 0..max_order at every point, with f^(n) estimated by central
// differences. A sign violation counts only if it exceeds 3x the combined
// truncation + roundoff estimate of the stencil, to avoid false negatives
// from numerical noise. Points must be positive and strictly increasing,
// max_order <= 6.
bool cm_spot_check(const std::function<double(double)>& f,
                   const std::vector<double>& points, int max_order);

}  // namespace fracou
