#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sfflab/ensembles.hpp"

namespace sfflab {

struct UnfoldingMethod {
    enum class Tag { AnalyticSemicircle, PolynomialFit, Identity };
    Tag tag = Tag::AnalyticSemicircle;
    int eta = 3;      // polynomial degree (PolynomialFit only)
    int n_bins = 50;  // histogram bins for the quality metric

    static UnfoldingMethod analytic() { return {Tag::AnalyticSemicircle, 3, 50}; }
    static UnfoldingMethod polynomial(int eta = 3, int n_bins = 50) { return {Tag::PolynomialFit, eta, n_bins}; }
    static UnfoldingMethod identity() { return {Tag::Identity, 3, 50}; }

    void validate() const;
};

std::string_view to_string(UnfoldingMethod::Tag tag) noexcept;

struct UnfoldedSpectrum {
    std::vector<double> energies;  // nondecreasing, unit mean spacing
    UnfoldingMethod method;
    EnsembleKind kind = EnsembleKind::GOE;
    int dim = 0;
    std::uint64_t seed = 0;
    bool reordered = false;  // polynomial fit was non-monotone and the levels were re-sorted

    double mean_spacing() const;
};

/// Semicircle cumulative f(E), clipped to [0, N] outside the support.
double semicircle_cdf(double energy, int dim, int beta);

UnfoldedSpectrum unfold_analytic(const SpectrumSample& spec, int beta);

/// Least-squares fit of a degree-eta polynomial to the staircase E_i -> i + 1/2.
UnfoldedSpectrum unfold_polynomial(const SpectrumSample& spec, int eta, int n_bins = 50);

/// Levels on a raw energy list (used for physical spectra without sample metadata).
std::vector<double> unfold_polynomial_levels(std::span<const double> energies, int eta, bool* reordered = nullptr);

UnfoldedSpectrum unfold_identity(const SpectrumSample& spec);

UnfoldedSpectrum unfold(const SpectrumSample& spec, const UnfoldingMethod& method);

/// Sum over bins of the squared difference between the level histograms of
/// two unfolded spectra, binned on their common range. Histograms hold the
/// fraction of levels per bin.
double histogram_distance(std::span<const double> a, std::span<const double> b, int n_bins);

/// Quality Q of the numerical polynomial unfolding relative to the analytic one.
double unfold_quality(const SpectrumSample& spec, int beta, int eta, int n_bins);

}  // namespace sfflab
