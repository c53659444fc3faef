#pragma once

#include <stdexcept>
#include <string>

namespace fracou {

// Signals that a computation finished but could not meet its accuracy
// contract (series non-convergence, quadrature failure, factorization
// failure). Carries the partial value so callers can decide what to do
// with it. Distinct from std::invalid_argument, which is reserved for
// precondition violations.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& msg, double partial_value = 0.0,
                   double est_error = 0.0)
        : std::runtime_error(msg), partial(partial_value), est(est_error) {}

    double partial;  // best available value
    double est;      // estimated error of the partial value
};

}  // namespace fracou
