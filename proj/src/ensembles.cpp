#include "sfflab/ensembles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <random>

#include "sfflab/error.hpp"
#include "sfflab/numeric.hpp"
#include "sfflab/parallel.hpp"

namespace sfflab {

int dyson_beta(EnsembleKind kind) noexcept {
    switch (kind) {
        case EnsembleKind::Poisson: return 0;
        case EnsembleKind::GOE: return 1;
        case EnsembleKind::GUE: return 2;
        case EnsembleKind::GSE: return 4;
    }
    return 0;
}

std::string_view to_string(EnsembleKind kind) noexcept {
    switch (kind) {
        case EnsembleKind::Poisson: return "poisson";
        case EnsembleKind::GOE: return "goe";
        case EnsembleKind::GUE: return "gue";
        case EnsembleKind::GSE: return "gse";
    }
    return "?";
}

std::optional<EnsembleKind> parse_ensemble(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "poisson") return EnsembleKind::Poisson;
    if (lower == "goe") return EnsembleKind::GOE;
    if (lower == "gue") return EnsembleKind::GUE;
    if (lower == "gse") return EnsembleKind::GSE;
    return std::nullopt;
}

EnsembleKind ensemble_from_beta(int beta) {
    switch (beta) {
        case 0: return EnsembleKind::Poisson;
        case 1: return EnsembleKind::GOE;
        case 2: return EnsembleKind::GUE;
        case 4: return EnsembleKind::GSE;
        default: fail(ErrorCode::Domain, "Dyson index must be one of 0, 1, 2, 4");
    }
}

void SamplerConfig::validate() const {
    require(dim >= 2, "sampler: dimension must be >= 2");
    require(realizations >= 1, "sampler: realizations must be >= 1");
}

namespace {

template <class Solver>
std::vector<double> eigenvalues_of(const typename Solver::MatrixType& h) {
    Solver solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) fail(ErrorCode::Numerical, "eigensolver failed to converge");
    const auto& ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> sample_goe(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
    Eigen::MatrixXd h = 0.5 * (g + g.transpose());
    return eigenvalues_of<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>>(h);
}

std::vector<double> sample_gue(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = {re, im};
        }
    Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
    return eigenvalues_of<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>>(h);
}

// The exact twofold degeneracy occasionally stalls the implicit QR sweep. A basis permutation
// (interleaving the two quaternion components) is a unitary similarity and usually unsticks it.
std::vector<double> kramers_eigenvalues(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        const auto n = h.rows() / 2;
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(h.rows());
        for (Eigen::Index i = 0; i < n; ++i) {
            perm.indices()[i] = 2 * i;
            perm.indices()[n + i] = 2 * i + 1;
        }
        const Eigen::MatrixXcd hp = perm * h * perm.transpose();
        return eigenvalues_of<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>>(hp);
    }
    const auto& ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end());
    return out;
}

// Quaternion entries q = a + b j are embedded as the 2x2 block [[a, b], [-conj(b), conj(a)]].
std::vector<double> sample_gse(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd g(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a_re = normal(rng);
            const double a_im = normal(rng);
            const double b_re = normal(rng);
            const double b_im = normal(rng);
            const std::complex<double> a{a_re, a_im};
            const std::complex<double> b{b_re, b_im};
            g(i, j) = a;
            g(i, n + j) = b;
            g(n + i, j) = -std::conj(b);
            g(n + i, n + j) = std::conj(a);
        }
    Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
    const auto all = kramers_eigenvalues(h);

    const double width = all.back() - all.front();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double gap = all[2 * i + 1] - all[2 * i];
        if (gap > 1e-6 * width)
            fail(ErrorCode::Structural, "GSE sample violates Kramers pairing (pair gap " + std::to_string(gap) + ")");
        out[i] = all[2 * i];
    }
    return out;
}

std::vector<double> sample_poisson(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, static_cast<double>(n));
    std::vector<double> out(n);
    for (auto& e : out) e = uniform(rng);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

SpectrumSample sample_spectrum(EnsembleKind kind, int dim, std::uint64_t seed) {
    require(dim >= 2, "sample_spectrum: dimension must be >= 2");
    std::mt19937_64 rng(seed);
    SpectrumSample s{kind, dim, seed, {}};
    switch (kind) {
        case EnsembleKind::Poisson: s.energies = sample_poisson(dim, rng); break;
        case EnsembleKind::GOE: s.energies = sample_goe(dim, rng); break;
        case EnsembleKind::GUE: s.energies = sample_gue(dim, rng); break;
        case EnsembleKind::GSE: s.energies = sample_gse(dim, rng); break;
    }
    return s;
}

std::vector<SpectrumSample> sample_ensemble(const SamplerConfig& cfg) {
    cfg.validate();
    std::vector<SpectrumSample> out(cfg.realizations);
    parallel_for(out.size(), [&](std::size_t i) {
        out[i] = sample_spectrum(cfg.kind, cfg.dim, derive_seed(cfg.master_seed, i));
    });
    return out;
}

double semicircle_density(double energy, int dim, int beta) {
    require(beta == 1 || beta == 2 || beta == 4, "semicircle_density: beta must be 1, 2 or 4");
    require(dim >= 1, "semicircle_density: dimension must be positive");
    const double r2 = 2.0 * dim * beta;
    const double d = r2 - energy * energy;
    if (d <= 0.0) return 0.0;
    return std::sqrt(d) / (kPi * beta * dim);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master_seed) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace sfflab
