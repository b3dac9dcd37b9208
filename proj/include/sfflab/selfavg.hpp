#pragma once

#include <span>
#include <vector>

#include "sfflab/curve.hpp"
#include "sfflab/unfold.hpp"

namespace sfflab {

/// Offset S-bar = 1/(N(N-1)) that keeps the relative variance finite at nodes of S.
double relvar_offset(int dim);

/// Pointwise running moments of S + S-bar over realizations.
class RelVarAccumulator {
public:
    RelVarAccumulator(std::size_t n_points, int dim);

    void add(std::span<const double> sample);
    std::size_t count() const noexcept { return count_; }
    /// (<X^2> - <X>^2) / <X>^2 with X = S + S-bar; NaN where <X> vanishes.
    std::vector<double> relative_variance() const;

private:
    std::vector<double> mean_;
    std::vector<double> m2_;
    double offset_;
    std::size_t count_ = 0;
};

/// R_k(t) from stored per-realization curves.
Curve relative_variance(std::span<const Curve> samples, int k, int dim);

/// R_k(t) of the single-realization knSFF, accumulated over the spectra.
Curve knsff_relative_variance(std::span<const UnfoldedSpectrum> spectra, int k, const TimeGrid& grid);

/// Trapezoidal mean over [t_start, t_start + T]; NaN samples are skipped.
double plateau_average(const Curve& curve, double t_start, double T);

/// (N - k)(N - 1) / (2N)
double relvar_plateau_formula(int k, int dim);

struct RelVarReport {
    int k = 0;
    Curve curve;
    double plateau_avg = 0.0;
    int dim = 0;
    int n_realizations = 0;
    double t_start = 0.0;
    double T_window = 0.0;
};

inline constexpr double kPlateauStart = 6.283185307179586;
inline constexpr double kPlateauWindow = 20.0 * 3.141592653589793;

RelVarReport relvar_report(std::span<const UnfoldedSpectrum> spectra, int k, const TimeGrid& grid,
                           double t_start = kPlateauStart, double T = kPlateauWindow);

}  // namespace sfflab
