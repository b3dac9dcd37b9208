#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sfflab/curve.hpp"
#include "sfflab/ensembles.hpp"
#include "sfflab/spacings.hpp"
#include "sfflab/unfold.hpp"

namespace sfflab {

/// C_N^(k) = 2 (N - k) / N^2, the number-of-pairs prefactor.
double knsff_prefactor(int k, int dim);

/// out[j] += sum_i cos(times[j] * values[i]) and, when `sin_out` is given,
/// sin_out[j] += sum_i sin(times[j] * values[i]). Uniform time grids use a
/// phase-rotation recurrence re-anchored every few hundred steps.
void accumulate_phase_sums(std::span<const double> values, std::span<const double> times, bool uniform,
                           std::span<double> cos_out, std::span<double> sin_out = {});

/// Ensemble-averaged (2/N^2) sum_i cos(t s_i^(k)).
Curve knsff_numeric(std::span<const UnfoldedSpectrum> spectra, int k, const TimeGrid& grid);

/// Several k at once; result[j] belongs to ks[j].
std::vector<Curve> knsff_numeric(std::span<const UnfoldedSpectrum> spectra, std::span<const int> ks,
                                 const TimeGrid& grid);

/// Fourier transform  int_0^inf P(s) e^{-i t s} ds  of the surmise, by
/// panelled Gauss-Legendre quadrature, or by the endpoint asymptotic series
/// once the Gaussian bulk is negligible.
std::complex<double> surmise_fourier(const SurmiseParams& p, double t);

/// Laguerre-function form of the cosine transform of the surmise.
double f_exact(int k, int beta, double t);
double f_exact(const SurmiseParams& p, double t);

/// Gaussian envelope times cosine plus the leading non-Gaussian sine term.
double f_approx(int k, int beta, double t);
double f_approx(const SurmiseParams& p, double t);

enum class KnsffMode { Exact, Approx, Auto };

/// k <= kAutoExactMaxK uses the exact form in Auto mode.
inline constexpr int kAutoExactMaxK = 5;

/// f_t^(k) for a Gaussian ensemble in the requested mode.
double knsff_shape(const SurmiseParams& p, double t, KnsffMode mode);

Curve knsff_analytic(int k, int beta, int dim, const TimeGrid& grid, KnsffMode mode = KnsffMode::Auto);

/// (2(N-k)/N^2) cos(k atan t) / (1 + t^2)^{k/2}.
double knsff_poisson_value(int k, int dim, double t);
Curve knsff_poisson(int k, int dim, const TimeGrid& grid);

/// Analytic knSFF for any ensemble kind.
Curve knsff_ensemble(EnsembleKind kind, int k, int dim, const TimeGrid& grid, KnsffMode mode = KnsffMode::Auto);

/// pi / omega_k for Gaussian ensembles, tan(pi / (1 + k)) for Poisson.
double min_time(int k, EnsembleKind kind);

struct Extremum {
    double t = 0.0;
    double value = 0.0;
};

/// Grid argmin refined by a parabola through the bracketing samples.
Extremum locate_minimum(const Curve& curve);
double min_time_numeric(const Curve& curve);

double min_value(int k, EnsembleKind kind, int dim);

enum class KStarMethod { AnalyticExpansion, CubicRoot, NumericArgmin };

/// Unrounded large-N expansion of the deepest neighbour.
double kstar_expansion(EnsembleKind kind, int dim);
/// Unrounded root of the cubic stationarity condition.
double kstar_cubic(EnsembleKind kind, int dim);
int deepest_k(EnsembleKind kind, int dim, KStarMethod method);

/// sqrt(2 alpha) / omega_k
double envelope_width(int k, int beta);
/// sqrt(2 alpha) / (2 pi)
double oscillation_count(int k, int beta);

/// Monte-Carlo minimum of each knSFF, k = 1..k_max, searched on
/// t in [pi/(2k), 1.6 pi/k].
struct KnsffMinimum {
    int k = 0;
    double t = 0.0;
    double value = 0.0;
    bool interior = false;  // false when the minimum sits on the search-window edge
};
std::vector<KnsffMinimum> knsff_minima(std::span<const UnfoldedSpectrum> spectra, int k_max, int n_points = 48);

/// k with the most negative interior minimum; ties toward smaller k.
int deepest_k_numeric(std::span<const KnsffMinimum> minima);

}  // namespace sfflab
