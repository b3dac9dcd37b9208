#include "sfflab/specfun.hpp"

#include <cmath>
#include <string>

#include "sfflab/error.hpp"
#include "sfflab/numeric.hpp"

namespace sfflab::specfun {

void SeriesControl::validate() const {
    require(max_terms >= 1, "SeriesControl: max_terms must be >= 1");
    require(abs_tol >= 0.0 && rel_tol >= 0.0, "SeriesControl: tolerances must be non-negative");
    require(abs_tol > 0.0 || rel_tol > 0.0, "SeriesControl: one tolerance must be positive");
}

double log_gamma(double x) {
    if (!(x > 0.0)) fail(ErrorCode::Domain, "log_gamma: argument must be positive");
    return std::lgamma(x);
}

double pochhammer(double a, int n) {
    require(n >= 0, "pochhammer: n must be non-negative");
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= a + i;
    return p;
}

namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

// Sums term_0 * prod ratio(n) until the tail is negligible. `ratio(n)` maps
// term_n to term_{n+1}.
template <class Ratio>
SeriesValue sum_series(double term0, Ratio ratio, const SeriesControl& ctrl, const char* name) {
    ctrl.validate();
    CompensatedSum acc;
    SeriesValue out;
    double term = term0;
    for (int n = 0; n < ctrl.max_terms; ++n) {
        acc.add(term);
        out.max_term = std::max(out.max_term, std::abs(term));
        out.terms = n + 1;
        const double r = ratio(n);
        const double next = term * r;
        if (next == 0.0) {
            out.value = acc.value();
            out.precision_loss = out.max_term > kCancellationRatio * std::abs(out.value);
            return out;
        }
        const double s = std::abs(acc.value());
        const double tol = std::max(ctrl.abs_tol * std::max(1.0, s), ctrl.rel_tol * s);
        // Only stop once the terms are shrinking for good.
        if (std::abs(next) < tol && std::abs(r) < 1.0 && std::abs(ratio(n + 1)) < 1.0) {
            acc.add(next);
            out.terms = n + 2;
            out.value = acc.value();
            out.precision_loss = out.max_term > kCancellationRatio * std::abs(out.value);
            return out;
        }
        term = next;
    }
    fail(ErrorCode::NonConvergence,
         std::string(name) + ": series did not converge within " + std::to_string(ctrl.max_terms) + " terms");
}

}  // namespace

SeriesValue hyp1f1_series(double a, double b, double z, const SeriesControl& ctrl) {
    if (is_nonpositive_integer(b)) fail(ErrorCode::Domain, "hyp1f1: b must not be a non-positive integer");
    if (z == 0.0) {
        ctrl.validate();
        return {1.0, 1.0, 1, false};
    }
    auto ratio = [=](int n) { return (a + n) * z / ((b + n) * (n + 1.0)); };
    return sum_series(1.0, ratio, ctrl, "hyp1f1");
}

double hyp1f1(double a, double b, double z, const SeriesControl& ctrl) {
    return hyp1f1_series(a, b, z, ctrl).value;
}

SeriesValue laguerre_fn_series(double mu, double a, double z, const SeriesControl& ctrl) {
    if (!(mu >= 0.0)) fail(ErrorCode::Domain, "laguerre_fn: degree must be >= 0");
    if (!(a > -1.0)) fail(ErrorCode::Domain, "laguerre_fn: order must be > -1");
    if (!(z >= 0.0)) fail(ErrorCode::Domain, "laguerre_fn: argument must be >= 0");
    // Leading coefficient binom(mu + a, mu); successive terms follow from the
    // Gamma-function recurrence of binom(mu + a, mu - n).
    const double term0 = std::exp(std::lgamma(mu + a + 1.0) - std::lgamma(mu + 1.0) - std::lgamma(a + 1.0));
    auto ratio = [=](int n) { return (mu - n) / (a + n + 1.0) * (-z) / (n + 1.0); };
    return sum_series(term0, ratio, ctrl, "laguerre_fn");
}

double laguerre_fn(double mu, double a, double z, const SeriesControl& ctrl) {
    return laguerre_fn_series(mu, a, z, ctrl).value;
}

double laguerre_theta(double a, double n, double x) {
    return 2.0 * std::sqrt(n * x) - a * kPi / 2.0 - kPi / 4.0;
}

double laguerre_b(double a, double x) {
    if (!(x > 0.0)) fail(ErrorCode::Domain, "laguerre_b: x must be positive");
    return (4.0 * x * x - 12.0 * a * a - 24.0 * a * x - 24.0 * x + 3.0) / (48.0 * std::sqrt(x));
}

double laguerre_asymptotic(double n, double a, double x) {
    if (!(x > 0.0)) fail(ErrorCode::Domain, "laguerre_asymptotic: x must be positive");
    require(n >= 5.0, "laguerre_asymptotic: degree must be >= 5");
    const double theta = laguerre_theta(a, n, x);
    const double amplitude = std::pow(n, a / 2.0 - 0.25) / (std::sqrt(kPi) * std::pow(x, a / 2.0 + 0.25)) * std::exp(x / 2.0);
    return amplitude * (std::cos(theta) + std::sin(theta) * laguerre_b(a, x) / std::sqrt(n));
}

}  // namespace sfflab::specfun
