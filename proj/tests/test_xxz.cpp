#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>

#include "sfflab/error.hpp"
#include "sfflab/xxz.hpp"

using namespace sfflab;
using namespace sfflab::xxz;

namespace {

double mean_r(EnsembleKind kind, int n, int r, std::uint64_t seed) {
    double sum = 0.0;
    for (const auto& s : sample_ensemble({kind, n, r, seed})) {
        std::vector<double> sp;
        for (std::size_t i = 1; i < s.energies.size(); ++i) sp.push_back(s.energies[i] - s.energies[i - 1]);
        sum += r_statistic(sp).mean;
    }
    return sum / r;
}

}  // namespace

TEST_CASE("sector basis") {
    CHECK(build_basis(2).states.size() == 2);
    CHECK(build_basis(4).states.size() == 6);
    const auto b16 = build_basis(16);
    CHECK(b16.states.size() == 12870);
    CHECK(std::is_sorted(b16.states.begin(), b16.states.end()));
    for (auto s : b16.states) CHECK(std::popcount(s) == 8);
    CHECK(b16.index_of(b16.states[777]) == 777);
    CHECK(b16.index_of(0b111u) == -1);
    CHECK_THROWS_AS(build_basis(5), Error);
    CHECK_THROWS_AS(build_basis(22), Error);
}

TEST_CASE("params validation") {
    CHECK_THROWS_AS((XxzParams{13, 1.0, 1.0, true}.validate()), Error);
    CHECK_THROWS_AS((XxzParams{2, 1.0, 1.0, true}.validate()), Error);
    CHECK_NOTHROW((XxzParams{2, 1.0, 1.0, false}.validate()));
    CHECK_THROWS_AS((XxzParams{8, 1.0, -1.0, true}.validate()), Error);
}

TEST_CASE("hamiltonian structure") {
    const XxzParams clean{4, 1.0, 0.0, true};
    const auto basis = build_basis(4);
    const auto h = build_hamiltonian(clean, sample_disorder(clean, 1), basis);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const auto ev = eigenvalues(h);
    CHECK(ev.front() == doctest::Approx(-2.0).epsilon(1e-12));

    const XxzParams p{10, 1.0, 3.0, true};
    const auto b10 = build_basis(10);
    const auto d = sample_disorder(p, 42);
    REQUIRE(d.fields.size() == 10);
    for (double f : d.fields) CHECK((f >= -1.5 && f <= 1.5));
    const auto h10 = build_hamiltonian(p, d, b10);
    CHECK((h10 - h10.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < h10.rows(); ++i)
        for (Eigen::Index j = 0; j < h10.cols(); ++j)
            if (i != j && h10(i, j) != 0.0) CHECK(h10(i, j) == 0.5);

    // Cyclic relabeling of sites on a ring: the spectrum only depends on the fields up to rotation.
    auto rotated = d;
    std::rotate(rotated.fields.begin(), rotated.fields.begin() + 3, rotated.fields.end());
    const auto e1 = eigenvalues(h10);
    const auto e2 = eigenvalues(build_hamiltonian(p, rotated, b10));
    for (std::size_t i = 0; i < e1.size(); ++i) CHECK(std::abs(e1[i] - e2[i]) < 1e-10);

    // Eigenvalue-only path against the full decomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(h10, Eigen::ComputeEigenvectors);
    for (std::size_t i = 0; i < e1.size(); ++i) CHECK(std::abs(e1[i] - full.eigenvalues()[i]) < 1e-10);
    CHECK(std::is_sorted(e1.begin(), e1.end()));
}

TEST_CASE("open chains drop the wrap bond") {
    const XxzParams open{2, 1.0, 0.0, false};
    const auto h = build_hamiltonian(open, sample_disorder(open, 0), build_basis(2));
    const auto ev = eigenvalues(h);
    // Two spins, one bond: singlet -3/4, triplet m=0 at +1/4.
    CHECK(ev[0] == doctest::Approx(-0.75));
    CHECK(ev[1] == doctest::Approx(0.25));
}

TEST_CASE("spectrum window") {
    std::vector<double> levels(924);
    for (int i = 0; i < 924; ++i) levels[i] = i;
    const auto w = spectrum_window(levels, 200);
    REQUIRE(w.size() == 200);
    CHECK(w.front() == 362.0);
    CHECK(w.back() == 561.0);
    CHECK(spectrum_window(levels, 924) == levels);
    CHECK_THROWS_AS(spectrum_window(levels, 925), Error);
}

TEST_CASE("r statistic") {
    const std::vector<double> equal{0.7, 0.7, 0.7, 0.7};
    CHECK(r_statistic(equal).mean == 1.0);
    const std::vector<double> two{1.0, 2.0};
    CHECK(r_statistic(two).mean == 0.5);
    const std::vector<double> degenerate{1.0, 0.0, 2.0, 1.0};
    const auto r = r_statistic(degenerate);
    CHECK(r.excluded == 2);
    CHECK(r.used == 1);
    CHECK(r.mean == 0.5);
    CHECK_THROWS_AS(r_statistic(std::vector<double>{1.0}), Error);
}

TEST_CASE("r statistic references") {
    CHECK(std::abs(mean_r(EnsembleKind::GOE, 200, 500, 31) - 0.5307) < 0.005);
    CHECK(std::abs(mean_r(EnsembleKind::Poisson, 200, 500, 32) - 0.3863) < 0.005);
}

TEST_CASE("small disorder pipeline") {
    PipelineConfig cfg;
    cfg.params = {10, 1.0, 1.0, true};
    cfg.n_window = 100;
    cfg.realizations = 24;
    cfg.master_seed = 5;
    cfg.k_list = {1, 5};
    cfg.grid = TimeGrid::linear(0.0, 4.0 * M_PI, 400);
    const auto chaotic = disorder_pipeline(cfg);
    CHECK(chaotic.spectra.size() == 24);
    CHECK(chaotic.knsff.size() == 2);
    CHECK(chaotic.full_sff.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(chaotic.minima.size() == 99);
    CHECK((chaotic.r.mean > 0.45 && chaotic.r.mean < 0.6));
    for (const auto& s : chaotic.spectra) {
        CHECK(s.energies.size() == 100);
        CHECK((s.mean_spacing() > 0.8 && s.mean_spacing() < 1.2));
    }

    cfg.params.disorder = 20.0;
    const auto localized = disorder_pipeline(cfg);
    CHECK(localized.r.mean < 0.45);

    const auto again = disorder_pipeline(cfg);
    for (std::size_t i = 0; i < again.spectra.size(); ++i) CHECK(again.spectra[i].energies == localized.spectra[i].energies);

    cfg.k_list = {100};
    CHECK_THROWS_AS(disorder_pipeline(cfg), Error);
}
