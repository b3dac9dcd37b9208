#include "sfflab/spacings.hpp"

#include <algorithm>
#include <cmath>

#include "sfflab/error.hpp"
#include "sfflab/specfun.hpp"

namespace sfflab {

SpacingSeries extract_spacings(std::span<const double> levels, int k) {
    const auto n = static_cast<int>(levels.size());
    require(k >= 1 && k <= n - 1, "extract_spacings: k must be in [1, N-1]");
    SpacingSeries out{k, std::vector<double>(n - k)};
    for (int i = 0; i + k < n; ++i) out.values[i] = levels[i + k] - levels[i];
    return out;
}

double surmise_alpha(int k, int beta) {
    return 0.5 * k * (k + 1.0) * beta + k - 1.0;
}

SurmiseParams surmise_params(int k, int beta) {
    require(k >= 1, "surmise_params: k must be >= 1");
    require(beta == 1 || beta == 2 || beta == 4, "surmise_params: beta must be 1, 2 or 4");
    SurmiseParams p;
    p.k = k;
    p.beta = beta;
    p.alpha = surmise_alpha(k, beta);
    const double lg_half = specfun::log_gamma((p.alpha + 1.0) / 2.0);
    const double log_a = 2.0 * (specfun::log_gamma(p.alpha / 2.0 + 1.0) - std::log(static_cast<double>(k)) - lg_half);
    p.log_c = std::log(2.0) - lg_half + (p.alpha + 1.0) / 2.0 * log_a;
    p.a_alpha = std::exp(log_a);
    p.c_alpha = std::exp(p.log_c);
    if (!std::isfinite(p.a_alpha) || !std::isfinite(p.c_alpha) || p.a_alpha <= 0.0)
        fail(ErrorCode::Numerical, "surmise_params: constants out of representable range");
    p.omega = std::sqrt(p.alpha / (2.0 * p.a_alpha));
    return p;
}

double surmise_pdf(const SurmiseParams& p, double s) {
    require(s >= 0.0, "surmise_pdf: s must be >= 0");
    if (s == 0.0) return p.alpha > 0.0 ? 0.0 : p.c_alpha;
    return std::exp(p.log_c + p.alpha * std::log(s) - p.a_alpha * s * s);
}

double poisson_knls_pdf(int k, double s) {
    require(k >= 1, "poisson_knls_pdf: k must be >= 1");
    require(s >= 0.0, "poisson_knls_pdf: s must be >= 0");
    if (s == 0.0) return k == 1 ? 1.0 : 0.0;
    return std::exp((k - 1.0) * std::log(s) - s - std::lgamma(static_cast<double>(k)));
}

Histogram empirical_hist(const SpacingSeries& series, int n_bins, std::optional<std::pair<double, double>> range) {
    require(n_bins >= 1, "empirical_hist: n_bins must be >= 1");
    require(!series.values.empty(), "empirical_hist: empty series");
    double lo, hi;
    if (range) {
        std::tie(lo, hi) = *range;
        require(hi > lo, "empirical_hist: empty range");
    } else {
        const auto [mn, mx] = std::minmax_element(series.values.begin(), series.values.end());
        lo = *mn;
        hi = *mx;
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
    Histogram h;
    h.edges.resize(n_bins + 1);
    const double width = (hi - lo) / n_bins;
    for (int i = 0; i <= n_bins; ++i) h.edges[i] = lo + width * i;
    h.edges.back() = hi;

    std::vector<double> counts(n_bins, 0.0);
    double inside = 0.0;
    for (double v : series.values) {
        if (v < lo || v > hi) continue;
        const int bin = std::min(static_cast<int>((v - lo) / width), n_bins - 1);
        counts[bin] += 1.0;
        inside += 1.0;
    }
    require(inside > 0.0, "empirical_hist: no values inside the range");
    h.densities.resize(n_bins);
    for (int i = 0; i < n_bins; ++i) h.densities[i] = counts[i] / (inside * width);
    return h;
}

}  // namespace sfflab
