#pragma once

namespace causal {

// Log of the gamma function for x > 0 (Lanczos approximation, g = 7, 9
// terms; relative error around 1e-15). Implemented here rather than taken
// from the platform libm so scores and p-values are reproducible bit-for-bit
// across toolchains.
double log_gamma(double x);

// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a), for a > 0,
// x >= 0. Series expansion below a + 1, Lentz continued fraction above.
double regularized_gamma_q(double a, double x);

// Chi-squared upper tail: P(X >= x) with k degrees of freedom.
double chi2_sf(double x, double k);

// Standard normal upper tail: P(Z >= x).
double normal_sf(double x);

} // namespace causal
