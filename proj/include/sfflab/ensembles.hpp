#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sfflab {

enum class EnsembleKind { Poisson, GOE, GUE, GSE };

/// Dyson index: 0 (Poisson), 1 (GOE), 2 (GUE), 4 (GSE).
int dyson_beta(EnsembleKind kind) noexcept;
std::string_view to_string(EnsembleKind kind) noexcept;
/// Case-insensitive parse of "poisson", "goe", "gue", "gse".
std::optional<EnsembleKind> parse_ensemble(std::string_view name);
EnsembleKind ensemble_from_beta(int beta);
inline bool is_gaussian(EnsembleKind kind) noexcept { return kind != EnsembleKind::Poisson; }

struct SpectrumSample {
    EnsembleKind kind = EnsembleKind::GOE;
    int dim = 0;
    std::uint64_t seed = 0;
    std::vector<double> energies;  // sorted ascending
};

struct SamplerConfig {
    EnsembleKind kind = EnsembleKind::GOE;
    int dim = 2;
    int realizations = 1;
    std::uint64_t master_seed = 0;

    void validate() const;
};

/// One realization of the ensemble. Gaussian kinds diagonalize
/// H = (G + G^dagger)/2 with unit-variance real components; GSE works on the
/// 2N x 2N complex embedding and returns one level per Kramers pair.
/// Poisson draws N uniform levels on [0, N].
SpectrumSample sample_spectrum(EnsembleKind kind, int dim, std::uint64_t seed);

/// Realizations 0..R-1 seeded by derive_seed(master_seed, i), sampled in parallel.
std::vector<SpectrumSample> sample_ensemble(const SamplerConfig& cfg);

/// Wigner semicircle density rho(E) = sqrt(2 N beta - E^2) / (pi beta N).
double semicircle_density(double energy, int dim, int beta);

/// splitmix64-style avalanche of (master, index).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

}  // namespace sfflab
