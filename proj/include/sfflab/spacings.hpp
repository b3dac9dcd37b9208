#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sfflab/unfold.hpp"

namespace sfflab {

/// k-th neighbour spacings s_i = E_{i+k} - E_i of a sorted spectrum.
struct SpacingSeries {
    int k = 1;
    std::vector<double> values;
};

/// Parameters of the generalized Wigner surmise P(s) = C s^alpha exp(-A s^2).
struct SurmiseParams {
    int k = 1;
    int beta = 1;
    double alpha = 0.0;
    double a_alpha = 0.0;  // A_alpha
    double c_alpha = 0.0;  // C_alpha
    double omega = 0.0;    // omega_k, with omega^2 = alpha / (2 A_alpha)
    double log_c = 0.0;    // ln C_alpha, kept to evaluate the pdf without overflow
};

SpacingSeries extract_spacings(std::span<const double> levels, int k);
inline SpacingSeries extract_spacings(const UnfoldedSpectrum& u, int k) { return extract_spacings(u.energies, k); }

/// alpha = k(k+1) beta / 2 + k - 1.
double surmise_alpha(int k, int beta);
SurmiseParams surmise_params(int k, int beta);
double surmise_pdf(const SurmiseParams& p, double s);

/// s^{k-1} e^{-s} / (k-1)!
double poisson_knls_pdf(int k, double s);

struct Histogram {
    std::vector<double> edges;      // n_bins + 1
    std::vector<double> densities;  // n_bins, integrating to one
};

Histogram empirical_hist(const SpacingSeries& series, int n_bins,
                         std::optional<std::pair<double, double>> range = std::nullopt);

}  // namespace sfflab
