#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sfflab/assembly.hpp"
#include "sfflab/curve.hpp"
#include "sfflab/knsff.hpp"
#include "sfflab/unfold.hpp"

namespace sfflab::xxz {

struct XxzParams {
    int length = 12;
    double jz = 1.0;
    double disorder = 1.0;  // W: fields drawn from U[-W/2, W/2]
    bool periodic = true;

    void validate() const;
};

/// Half-filling sector, states as ascending bit patterns (bit n = spin n up).
struct SectorBasis {
    int length = 0;
    int n_up = 0;
    std::vector<std::uint32_t> states;

    /// Position of a state, or -1 when it lies outside the sector.
    std::ptrdiff_t index_of(std::uint32_t state) const;
};

struct DisorderRealization {
    std::vector<double> fields;
    std::uint64_t seed = 0;
};

SectorBasis build_basis(int length);

DisorderRealization sample_disorder(const XxzParams& p, std::uint64_t seed);

/// H = sum_bonds (S^x S^x + S^y S^y + Jz S^z S^z) + sum_n h_n S^z_n in the sector.
Eigen::MatrixXd build_hamiltonian(const XxzParams& p, const DisorderRealization& d, const SectorBasis& basis);

std::vector<double> eigenvalues(const Eigen::MatrixXd& h);

/// n_window consecutive levels starting at floor(D/2) - floor(n_window/2).
std::vector<double> spectrum_window(std::span<const double> sorted, int n_window);

struct RStatistic {
    double mean = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;  // ratios touching a spacing below kDegenerateSpacing
};

inline constexpr double kDegenerateSpacing = 1e-12;

RStatistic r_statistic(std::span<const double> spacings);

struct PipelineConfig {
    XxzParams params;
    int n_window = 200;
    int realizations = 150;
    std::uint64_t master_seed = 0;
    TimeGrid grid = TimeGrid::display_default();
    std::vector<int> k_list = {1, 10, 30};
    double epsilon = 0.2;
    int edge_discard = 50;  // levels dropped per edge after unfolding
    int eta = 3;

    void validate() const;
};

struct PipelineResult {
    std::vector<UnfoldedSpectrum> spectra;  // windowed, unfolded, one per realization
    std::vector<Curve> knsff;               // one per k_list entry
    Curve full_sff;
    RStatistic r;
    std::vector<KnsffMinimum> minima;
    std::optional<int> k_star;
    std::optional<double> t_dip;
    std::optional<double> t_thouless;
    std::size_t reordered = 0;  // realizations whose polynomial unfolding needed re-sorting
};

/// Unfolded window of one disorder realization, plus its raw windowed levels.
struct WindowedLevels {
    std::vector<double> raw;
    UnfoldedSpectrum unfolded;
};
WindowedLevels realization_levels(const PipelineConfig& cfg, const SectorBasis& basis, std::size_t index);

PipelineResult disorder_pipeline(const PipelineConfig& cfg);

}  // namespace sfflab::xxz
