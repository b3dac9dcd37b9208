#pragma once

// Special-function kernel: log-Gamma, Pochhammer symbol, Kummer's 1F1 and
// the generalized Laguerre function of non-integer degree.

namespace sfflab::specfun {

/// Truncation policy for the infinite series below.
struct SeriesControl {
    int max_terms = 10000;
    double abs_tol = 1e-15;
    double rel_tol = 0.0;

    void validate() const;
};

/// A series value together with the diagnostics needed to judge it.
struct SeriesValue {
    double value = 0.0;
    double max_term = 0.0;  // largest |term| seen while summing
    int terms = 0;
    bool precision_loss = false;  // max_term > kCancellationRatio * |value|
};

inline constexpr double kCancellationRatio = 1e12;

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// (a)_n = a (a+1) ... (a+n-1), evaluated as a direct product.
double pochhammer(double a, int n);

SeriesValue hyp1f1_series(double a, double b, double z, const SeriesControl& ctrl = {});

/// Kummer's confluent hypergeometric function 1F1(a; b; z).
double hyp1f1(double a, double b, double z, const SeriesControl& ctrl = {});

/// L_mu^a(z) from the binomial series; diagnostics are reported rather than thrown.
SeriesValue laguerre_fn_series(double mu, double a, double z, const SeriesControl& ctrl = {});

double laguerre_fn(double mu, double a, double z, const SeriesControl& ctrl = {});

/// Phase theta_{a,n}(x) = 2 sqrt(n x) - a pi/2 - pi/4 of the large-degree form.
double laguerre_theta(double a, double n, double x);

/// Sine coefficient b_a(x) = (4x^2 - 12a^2 - 24ax - 24x + 3) / (48 sqrt(x)).
double laguerre_b(double a, double x);

/// Two-term oscillatory approximation of L_n^a(x) for large n.
double laguerre_asymptotic(double n, double a, double x);

}  // namespace sfflab::specfun
