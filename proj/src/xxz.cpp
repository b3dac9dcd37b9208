#include "sfflab/xxz.hpp"

#include <algorithm>
#include <bit>
#include <random>

#include "sfflab/ensembles.hpp"
#include "sfflab/error.hpp"
#include "sfflab/parallel.hpp"

namespace sfflab::xxz {

void XxzParams::validate() const {
    if (length % 2 != 0) fail(ErrorCode::Precondition, "xxz: L must be even");
    require(length >= 2 && length <= 20, "xxz: L must be in [2, 20]");
    require(!periodic || length >= 4, "xxz: periodic chains need L >= 4");
    require(disorder >= 0.0, "xxz: disorder width W must be >= 0");
}

std::ptrdiff_t SectorBasis::index_of(std::uint32_t state) const {
    const auto it = std::lower_bound(states.begin(), states.end(), state);
    if (it == states.end() || *it != state) return -1;
    return it - states.begin();
}

SectorBasis build_basis(int length) {
    if (length % 2 != 0) fail(ErrorCode::Precondition, "build_basis: L must be even");
    require(length >= 2 && length <= 20, "build_basis: L must be in [2, 20]");
    SectorBasis b{length, length / 2, {}};
    const std::uint32_t limit = 1u << length;
    for (std::uint32_t s = 0; s < limit; ++s)
        if (std::popcount(s) == b.n_up) b.states.push_back(s);
    return b;
}

DisorderRealization sample_disorder(const XxzParams& p, std::uint64_t seed) {
    p.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> field(-p.disorder / 2.0, p.disorder / 2.0);
    DisorderRealization d{std::vector<double>(p.length), seed};
    for (auto& h : d.fields) h = p.disorder > 0.0 ? field(rng) : 0.0;
    return d;
}

Eigen::MatrixXd build_hamiltonian(const XxzParams& p, const DisorderRealization& d, const SectorBasis& basis) {
    p.validate();
    require(basis.length == p.length, "build_hamiltonian: basis and parameters differ in L");
    require(static_cast<int>(d.fields.size()) == p.length, "build_hamiltonian: need one field per site");
    const auto dim = static_cast<Eigen::Index>(basis.states.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const int bonds = p.periodic ? p.length : p.length - 1;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const std::uint32_t s = basis.states[i];
        double diag = 0.0;
        for (int n = 0; n < p.length; ++n) diag += d.fields[n] * (((s >> n) & 1u) ? 0.5 : -0.5);
        for (int n = 0; n < bonds; ++n) {
            const int m = (n + 1) % p.length;
            const bool up_n = (s >> n) & 1u;
            const bool up_m = (s >> m) & 1u;
            if (up_n == up_m) {
                diag += 0.25 * p.jz;
                continue;
            }
            diag -= 0.25 * p.jz;
            const std::uint32_t flipped = s ^ ((1u << n) | (1u << m));
            const auto j = basis.index_of(flipped);
            if (j < 0) fail(ErrorCode::Structural, "build_hamiltonian: spin flip left the sector");
            h(j, i) += 0.5;
        }
        h(i, i) = diag;
    }
    return h;
}

std::vector<double> eigenvalues(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) fail(ErrorCode::Numerical, "xxz: eigensolver failed");
    const auto& ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> spectrum_window(std::span<const double> sorted, int n_window) {
    const auto d = static_cast<int>(sorted.size());
    require(n_window >= 1, "spectrum_window: window must be >= 1");
    if (n_window > d) fail(ErrorCode::Precondition, "spectrum_window: window larger than the spectrum");
    const int start = d / 2 - n_window / 2;
    return {sorted.begin() + start, sorted.begin() + start + n_window};
}

RStatistic r_statistic(std::span<const double> spacings) {
    require(spacings.size() >= 2, "r_statistic: need at least two spacings");
    RStatistic r;
    double sum = 0.0;
    for (std::size_t n = 0; n + 1 < spacings.size(); ++n) {
        const double a = spacings[n], b = spacings[n + 1];
        if (a < kDegenerateSpacing || b < kDegenerateSpacing) {
            ++r.excluded;
            continue;
        }
        sum += std::min(a, b) / std::max(a, b);
        ++r.used;
    }
    if (r.used == 0) fail(ErrorCode::Numerical, "r_statistic: every spacing is degenerate");
    r.mean = sum / static_cast<double>(r.used);
    return r;
}

void PipelineConfig::validate() const {
    params.validate();
    require(n_window >= 10, "xxz pipeline: window must be >= 10");
    require(realizations >= 1, "xxz pipeline: need at least one realization");
    require(edge_discard >= 0, "xxz pipeline: edge discard must be >= 0");
    require(epsilon > 0.0, "xxz pipeline: epsilon must be > 0");
    grid.validate();
    for (int k : k_list) require(k >= 1 && k <= n_window - 1, "xxz pipeline: k must be in [1, window-1]");
}

WindowedLevels realization_levels(const PipelineConfig& cfg, const SectorBasis& basis, std::size_t index) {
    const auto seed = derive_seed(cfg.master_seed, index);
    const auto disorder = sample_disorder(cfg.params, seed);
    const auto levels = eigenvalues(build_hamiltonian(cfg.params, disorder, basis));
    const int d = static_cast<int>(levels.size());
    if (cfg.n_window > d) fail(ErrorCode::Precondition, "xxz pipeline: window larger than the sector dimension");
    const int fit = std::min(d, cfg.n_window + 2 * cfg.edge_discard);
    const auto fit_levels = spectrum_window(levels, fit);
    bool reordered = false;
    const auto unfolded = unfold_polynomial_levels(fit_levels, cfg.eta, &reordered);
    const int lo = (fit - cfg.n_window) / 2;

    WindowedLevels out;
    out.raw.assign(fit_levels.begin() + lo, fit_levels.begin() + lo + cfg.n_window);
    out.unfolded.energies.assign(unfolded.begin() + lo, unfolded.begin() + lo + cfg.n_window);
    out.unfolded.method = UnfoldingMethod::polynomial(cfg.eta);
    out.unfolded.kind = EnsembleKind::GOE;
    out.unfolded.dim = cfg.n_window;
    out.unfolded.seed = seed;
    out.unfolded.reordered = reordered;
    return out;
}

PipelineResult disorder_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    const auto basis = build_basis(cfg.params.length);
    const auto r_count = static_cast<std::size_t>(cfg.realizations);
    std::vector<WindowedLevels> levels(r_count);
    parallel_for(r_count, [&](std::size_t i) { levels[i] = realization_levels(cfg, basis, i); });

    PipelineResult out;
    out.spectra.reserve(r_count);
    double r_sum = 0.0;
    for (auto& w : levels) {
        std::vector<double> spacings(w.raw.size() - 1);
        for (std::size_t n = 0; n + 1 < w.raw.size(); ++n) spacings[n] = w.raw[n + 1] - w.raw[n];
        const auto r = r_statistic(spacings);
        r_sum += r.mean * static_cast<double>(r.used);
        out.r.used += r.used;
        out.r.excluded += r.excluded;
        if (w.unfolded.reordered) ++out.reordered;
        out.spectra.push_back(std::move(w.unfolded));
    }
    out.r.mean = r_sum / static_cast<double>(out.r.used);

    out.knsff = knsff_numeric(out.spectra, cfg.k_list, cfg.grid);
    out.full_sff = full_sff_numeric(out.spectra, cfg.grid);
    out.minima = knsff_minima(out.spectra, cfg.n_window - 1);
    try {
        out.k_star = deepest_k_numeric(out.minima);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoMinimum) throw;
    }
    const auto ts = partial_timescales(out.full_sff, cfg.n_window - 1, ConnectedKind::GOE, cfg.n_window, cfg.epsilon);
    out.t_dip = ts.t_dip;
    out.t_thouless = ts.t_thouless;
    return out;
}

}  // namespace sfflab::xxz
