#pragma once

namespace fracou {

// Gamma function by a Lanczos approximation (g = 7, 9 coefficients),
// accurate to well below 1e-13 relative on the real line away from poles.
// Overflows to +/-inf for large arguments instead of throwing.
double gamma_fn(double x);

// log |Gamma(x)| for x > 0; avoids overflow for large x.
double log_gamma(double x);

// 1/Gamma(x) for any real x. Exactly 0 at the poles x = 0, -1, -2, ...
// (pole detection snaps |x - round(x)| < 1e-13) and 0 when Gamma overflows.
// This exactness matters: asymptotic-expansion terms with a Gamma pole in
// the denominator must vanish, not blow up.
double rgamma(double x);

}  // namespace fracou
