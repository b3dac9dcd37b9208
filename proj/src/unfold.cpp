#include "sfflab/unfold.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sfflab/error.hpp"
#include "sfflab/numeric.hpp"

namespace sfflab {

void UnfoldingMethod::validate() const {
    if (tag != Tag::PolynomialFit) return;
    require(eta >= 1 && eta <= 12, "unfolding: polynomial degree must be in [1, 12]");
    require(n_bins >= 2, "unfolding: n_bins must be >= 2");
}

std::string_view to_string(UnfoldingMethod::Tag tag) noexcept {
    switch (tag) {
        case UnfoldingMethod::Tag::AnalyticSemicircle: return "analytic";
        case UnfoldingMethod::Tag::PolynomialFit: return "polynomial";
        case UnfoldingMethod::Tag::Identity: return "identity";
    }
    return "?";
}

double UnfoldedSpectrum::mean_spacing() const {
    if (energies.size() < 2) return 0.0;
    return (energies.back() - energies.front()) / static_cast<double>(energies.size() - 1);
}

double semicircle_cdf(double energy, int dim, int beta) {
    require(beta == 1 || beta == 2 || beta == 4, "semicircle_cdf: beta must be 1, 2 or 4");
    const double n = dim;
    const double r2 = 2.0 * n * beta;
    const double r = std::sqrt(r2);
    if (energy <= -r) return 0.0;
    if (energy >= r) return n;
    const double value =
        n / 2.0 + (n * beta * std::asin(energy / r) + 0.5 * energy * std::sqrt(r2 - energy * energy)) / (kPi * beta);
    return std::clamp(value, 0.0, n);
}

UnfoldedSpectrum unfold_analytic(const SpectrumSample& spec, int beta) {
    if (beta == 0) fail(ErrorCode::Domain, "unfold_analytic: Poisson spectra have no semicircle; use identity unfolding");
    require(beta == 1 || beta == 2 || beta == 4, "unfold_analytic: beta must be 1, 2 or 4");
    UnfoldedSpectrum out{{}, UnfoldingMethod::analytic(), spec.kind, spec.dim, spec.seed, false};
    out.energies.reserve(spec.energies.size());
    for (double e : spec.energies) out.energies.push_back(semicircle_cdf(e, spec.dim, beta));
    return out;
}

std::vector<double> unfold_polynomial_levels(std::span<const double> energies, int eta, bool* reordered) {
    require(eta >= 1 && eta <= 12, "unfold_polynomial: degree must be in [1, 12]");
    const auto n = static_cast<Eigen::Index>(energies.size());
    require(n >= 10 * eta, "unfold_polynomial: need at least 10*eta levels");
    const auto [lo_it, hi_it] = std::minmax_element(energies.begin(), energies.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) fail(ErrorCode::Numerical, "unfold_polynomial: degenerate spectrum (all levels equal)");

    // Fit on u in [-1, 1] to keep the Vandermonde system well conditioned.
    const double center = 0.5 * (hi + lo);
    const double half = 0.5 * (hi - lo);
    Eigen::MatrixXd design(n, eta + 1);
    Eigen::VectorXd staircase(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = (energies[i] - center) / half;
        double p = 1.0;
        for (int d = 0; d <= eta; ++d) {
            design(i, d) = p;
            p *= u;
        }
        staircase(i) = static_cast<double>(i) + 0.5;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < eta + 1) fail(ErrorCode::Numerical, "unfold_polynomial: rank-deficient fit");
    const Eigen::VectorXd coef = qr.solve(staircase);

    std::vector<double> out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = (energies[i] - center) / half;
        double acc = 0.0;
        for (int d = eta; d >= 0; --d) acc = acc * u + coef(d);
        out[i] = acc;
    }
    const bool sorted = std::is_sorted(out.begin(), out.end());
    if (!sorted) std::sort(out.begin(), out.end());
    if (reordered != nullptr) *reordered = !sorted;
    return out;
}

UnfoldedSpectrum unfold_polynomial(const SpectrumSample& spec, int eta, int n_bins) {
    const auto method = UnfoldingMethod::polynomial(eta, n_bins);
    method.validate();
    UnfoldedSpectrum out{{}, method, spec.kind, spec.dim, spec.seed, false};
    out.energies = unfold_polynomial_levels(spec.energies, eta, &out.reordered);
    return out;
}

UnfoldedSpectrum unfold_identity(const SpectrumSample& spec) {
    return {spec.energies, UnfoldingMethod::identity(), spec.kind, spec.dim, spec.seed, false};
}

UnfoldedSpectrum unfold(const SpectrumSample& spec, const UnfoldingMethod& method) {
    method.validate();
    switch (method.tag) {
        case UnfoldingMethod::Tag::AnalyticSemicircle: return unfold_analytic(spec, dyson_beta(spec.kind));
        case UnfoldingMethod::Tag::PolynomialFit: return unfold_polynomial(spec, method.eta, method.n_bins);
        case UnfoldingMethod::Tag::Identity: return unfold_identity(spec);
    }
    fail(ErrorCode::Precondition, "unknown unfolding method");
}

double histogram_distance(std::span<const double> a, std::span<const double> b, int n_bins) {
    require(n_bins >= 2, "histogram_distance: n_bins must be >= 2");
    require(!a.empty() && !b.empty(), "histogram_distance: empty input");
    double lo = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
    double hi = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
    if (!(hi > lo)) return 0.0;
    auto fill = [&](std::span<const double> v) {
        std::vector<double> h(n_bins, 0.0);
        const double w = (hi - lo) / n_bins;
        for (double x : v) {
            auto bin = static_cast<int>((x - lo) / w);
            h[std::clamp(bin, 0, n_bins - 1)] += 1.0 / static_cast<double>(v.size());
        }
        return h;
    };
    const auto ha = fill(a);
    const auto hb = fill(b);
    double q = 0.0;
    for (int i = 0; i < n_bins; ++i) q += (ha[i] - hb[i]) * (ha[i] - hb[i]);
    return q;
}

double unfold_quality(const SpectrumSample& spec, int beta, int eta, int n_bins) {
    const auto analytic = unfold_analytic(spec, beta);
    const auto numeric = unfold_polynomial(spec, eta, n_bins);
    return histogram_distance(analytic.energies, numeric.energies, n_bins);
}

}  // namespace sfflab
