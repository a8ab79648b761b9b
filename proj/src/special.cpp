#include "causal/special.hpp"

#include <cmath>

#include "causal/common.hpp"

namespace causal {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLnSqrt2Pi = 0.91893853320467274178;  // ln(sqrt(2*pi))

// Lanczos coefficients for g = 7.
constexpr double kLanczos[9] = {
    0.99999999999980993,   676.5203681218851,     -1259.1392167224028,
    771.32342877765313,    -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7,
};

} // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw Error(ErrorKind::Precondition, "log_gamma: x must be positive");
    if (x < 0.5) {
        // Reflection: ln Γ(x) = ln(π / sin(πx)) − ln Γ(1 − x).
        return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + static_cast<double>(i));
    const double t = z + 7.5;
    return kLnSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(a);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw Error(ErrorKind::Precondition, "regularized_gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    const double log_prefix = -x + a * std::log(x) - log_gamma(a);
    if (x < a + 1.0) {
        // Series for P(a, x); Q = 1 - P.
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 10000; ++n) {
            term *= x / (a + static_cast<double>(n));
            sum += term;
            if (term < sum * 1e-16) break;
        }
        const double p = sum * std::exp(log_prefix);
        return p >= 1.0 ? 0.0 : 1.0 - p;
    }
    // Modified Lentz continued fraction for Q(a, x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(log_prefix) * h;
    return q > 1.0 ? 1.0 : (q < 0.0 ? 0.0 : q);
}

double chi2_sf(double x, double k) {
    if (!(k > 0.0)) throw Error(ErrorKind::Precondition, "chi2_sf: dof must be positive");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(k / 2.0, x / 2.0);
}

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

} // namespace causal
