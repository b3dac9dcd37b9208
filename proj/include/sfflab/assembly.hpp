#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "sfflab/curve.hpp"
#include "sfflab/knsff.hpp"

namespace sfflab {

/// Ensemble average of |sum_i e^{-i E_i t}|^2 / N^2, so S(0) = 1 and the plateau is 1/N.
Curve full_sff_numeric(std::span<const UnfoldedSpectrum> spectra, const TimeGrid& grid);

/// 1/N + sum_{k=1}^{N-1} C_N^(k) f_t^(k).
Curve full_sff_analytic(int beta, int dim, const TimeGrid& grid, KnsffMode mode = KnsffMode::Auto);
Curve full_sff_poisson(int dim, const TimeGrid& grid);

/// 1/N + sum_{k=1}^{K} components[k-1]; components must hold at least K curves.
Curve partial_sff(std::span<const Curve> components, int dim, int K);
Curve partial_sff_analytic(EnsembleKind kind, int dim, int K, const TimeGrid& grid, KnsffMode mode = KnsffMode::Auto);
Curve partial_sff_numeric(std::span<const UnfoldedSpectrum> spectra, int K, const TimeGrid& grid);

struct EvenOdd {
    Curve even;  // 1/(2N) + sum over even k
    Curve odd;   // 1/(2N) + sum over odd k
};
EvenOdd even_odd_sums(std::span<const Curve> components, int dim);
EvenOdd even_odd_sums_analytic(EnsembleKind kind, int dim, const TimeGrid& grid, KnsffMode mode = KnsffMode::Auto);
/// Uses the split into even- and odd-indexed levels, so the cost is O(N) per time.
EvenOdd even_odd_sums_numeric(std::span<const UnfoldedSpectrum> spectra, const TimeGrid& grid);

enum class ConnectedKind { GOE, GUE, GSE };
ConnectedKind connected_kind(EnsembleKind kind);

/// Value reported for the GSE connected SFF at t = 2 pi, times 1/N.
inline constexpr double kGseSpikeCap = 1e6;

/// Connected SFF b(t), normalized to the 1/N plateau.
double connected_sff(ConnectedKind kind, int dim, double t);
Curve connected_curve(ConnectedKind kind, int dim, const TimeGrid& grid);

/// |log10(S / b)|; NaN where S <= 0 or b <= 0.
Curve delta_sff(const Curve& curve, ConnectedKind kind, int dim);

/// Time of the smallest interior relative maximum.
double dip_time(const Curve& curve);

/// Start of the final stretch where delta stays below epsilon, interpolated linearly.
double thouless_time(const Curve& delta, double epsilon);

struct PartialSffResult {
    int K = 0;
    Curve curve;
    std::optional<double> t_dip;
    std::optional<double> t_thouless;
    double epsilon = 0.1;
};

/// Dip and Thouless times of a partial SFF; absent when they do not exist.
PartialSffResult partial_timescales(const Curve& partial, int K, ConnectedKind kind, int dim, double epsilon);

/// Default epsilon: 0.1 for GOE and GUE, 0.25 for GSE.
double default_epsilon(ConnectedKind kind);

/// Fourier transform of the nearest-neighbour surmise, 1F1 form with a quadrature fallback.
std::complex<double> toy_transform(int beta, double t);

/// 1/N + sum_k C_N^(k) Re(F^k): independent nearest-neighbour spacings.
Curve toy_sff(int beta, int dim, const TimeGrid& grid);

struct AutocorrResult {
    double diag_term = 0.0;
    std::vector<double> coefficients;  // O_N^(k), k = 1..N-1
    std::vector<Curve> curves;         // per-k contributions
    Curve total;
};

/// Spectrum mode: exact per-k decomposition averaged over the given spectra.
AutocorrResult autocorr_decompose(const Eigen::MatrixXcd& op, std::span<const UnfoldedSpectrum> spectra,
                                  const TimeGrid& grid);

/// Ensemble mode: O_N^(k) times the analytic shape of the given ensemble.
AutocorrResult autocorr_decompose(const Eigen::MatrixXcd& op, EnsembleKind kind, const TimeGrid& grid,
                                  KnsffMode mode = KnsffMode::Auto);

/// (1/norm^2) sum_ij |O_ij|^2 cos(t (E_i - E_j)) evaluated directly.
double autocorr_direct(const Eigen::MatrixXcd& op, std::span<const double> energies, double t);

}  // namespace sfflab
