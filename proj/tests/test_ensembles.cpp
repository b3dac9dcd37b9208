#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <unordered_set>

#include "sfflab/ensembles.hpp"
#include "sfflab/error.hpp"
#include "sfflab/parallel.hpp"

using namespace sfflab;

TEST_CASE("ensemble kinds") {
    CHECK(dyson_beta(EnsembleKind::Poisson) == 0);
    CHECK(dyson_beta(EnsembleKind::GOE) == 1);
    CHECK(dyson_beta(EnsembleKind::GUE) == 2);
    CHECK(dyson_beta(EnsembleKind::GSE) == 4);
    CHECK(parse_ensemble("GuE") == EnsembleKind::GUE);
    CHECK(parse_ensemble("poisson") == EnsembleKind::Poisson);
    CHECK_FALSE(parse_ensemble("gin").has_value());
    for (int b : {0, 1, 2, 4}) CHECK(dyson_beta(ensemble_from_beta(b)) == b);
    CHECK_THROWS_AS(ensemble_from_beta(3), Error);
}

TEST_CASE("poisson levels lie in [0, N] and are sorted") {
    const auto s = sample_spectrum(EnsembleKind::Poisson, 5, 11);
    REQUIRE(s.energies.size() == 5);
    CHECK(std::is_sorted(s.energies.begin(), s.energies.end()));
    for (double e : s.energies) CHECK((e >= 0.0 && e <= 5.0));
}

TEST_CASE("GSE returns one level per Kramers pair") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = sample_spectrum(EnsembleKind::GSE, 4, seed);
        REQUIRE(s.energies.size() == 4);
        for (std::size_t i = 1; i < 4; ++i) CHECK(s.energies[i] - s.energies[i - 1] > 0.0);
    }
    const auto big = sample_spectrum(EnsembleKind::GSE, 100, 3);
    double min_gap = 1e300;
    for (std::size_t i = 1; i < big.energies.size(); ++i) min_gap = std::min(min_gap, big.energies[i] - big.energies[i - 1]);
    CHECK(min_gap > 1e-6);
}

TEST_CASE("GOE spectra stay inside the semicircle support") {
    const auto spectra = sample_ensemble({EnsembleKind::GOE, 200, 100, 5});
    const double edge = std::sqrt(2.0 * 200) * 1.1;
    for (const auto& s : spectra) CHECK(std::max(-s.energies.front(), s.energies.back()) <= edge);
}

TEST_CASE("semicircle density") {
    CHECK(semicircle_density(std::sqrt(400.0), 100, 2) == 0.0);
    CHECK(semicircle_density(-std::sqrt(400.0), 100, 2) == 0.0);
    CHECK(semicircle_density(0.0, 100, 2) == doctest::Approx(20.0 / (200.0 * M_PI)).epsilon(1e-12));
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (int beta : {1, 2, 4}) {
        const double r = std::sqrt(2.0 * 100 * beta);
        const double total = integrator.integrate([&](double e) { return semicircle_density(e, 100, beta); }, -r, r);
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("eigenvalue histograms follow the semicircle") {
    const int n = 200, bins = 50;
    for (auto kind : {EnsembleKind::GOE, EnsembleKind::GUE, EnsembleKind::GSE}) {
        const int beta = dyson_beta(kind);
        const auto spectra = sample_ensemble({kind, n, 200, 17});
        const double r = std::sqrt(2.0 * n * beta);
        std::vector<double> counts(bins, 0.0);
        double total = 0.0;
        for (const auto& s : spectra)
            for (double e : s.energies) {
                const int b = std::clamp(static_cast<int>((e + r) / (2.0 * r) * bins), 0, bins - 1);
                counts[b] += 1.0;
                total += 1.0;
            }
        // Expected counts from the closed-form semicircle CDF.
        auto cdf = [&](double e) {
            const double x = std::clamp(e / r, -1.0, 1.0);
            return 0.5 + (std::asin(x) + x * std::sqrt(1.0 - x * x)) / M_PI;
        };
        double chi2 = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double lo = -r + 2.0 * r * b / bins, hi = lo + 2.0 * r / bins;
            const double expected = total * (cdf(hi) - cdf(lo));
            chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
        }
        INFO("beta = " << beta << ", chi2 per bin = " << chi2 / bins);
        CHECK(chi2 / bins < 3.0);
    }
}

TEST_CASE("poisson mean spacing") {
    // Sorted uniform draws on [0, N]: E[(E_N - E_1)/(N - 1)] = N/(N + 1).
    const int n = 100, r = 1000;
    const auto spectra = sample_ensemble({EnsembleKind::Poisson, n, r, 23});
    std::vector<double> means;
    for (const auto& s : spectra) means.push_back((s.energies.back() - s.energies.front()) / (n - 1));
    double mean = 0.0, var = 0.0;
    for (double m : means) mean += m / r;
    for (double m : means) var += (m - mean) * (m - mean) / (r - 1);
    const double se = std::sqrt(var / r);
    CHECK(std::abs(mean - n / (n + 1.0)) < 3.0 * se);
}

TEST_CASE("sampling is reproducible") {
    for (auto kind : {EnsembleKind::Poisson, EnsembleKind::GOE, EnsembleKind::GUE, EnsembleKind::GSE}) {
        const auto a = sample_spectrum(kind, 30, 99);
        const auto b = sample_spectrum(kind, 30, 99);
        CHECK(a.energies == b.energies);
        CHECK(sample_spectrum(kind, 30, 100).energies != a.energies);
    }
}

TEST_CASE("ensemble sampling is independent of the worker count") {
    const SamplerConfig cfg{EnsembleKind::GUE, 20, 40, 8};
    setenv("SFFLAB_WORKERS", "1", 1);
    const auto one = sample_ensemble(cfg);
    setenv("SFFLAB_WORKERS", "4", 1);
    const auto four = sample_ensemble(cfg);
    unsetenv("SFFLAB_WORKERS");
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].energies == four[i].energies);

    auto fold = [](double& acc, std::size_t i) { acc += std::sin(static_cast<double>(i)) * 1e-3; };
    auto merge = [](double& a, double b) { a += b; };
    const double r1 = chunked_reduce(1000, 0.0, fold, merge, 1);
    const double r7 = chunked_reduce(1000, 0.0, fold, merge, 7);
    CHECK(r1 == r7);
}

TEST_CASE("derive_seed mixes master and index") {
    CHECK(derive_seed(42, 7) == derive_seed(42, 7));
    std::mt19937_64 rng(1);
    std::unordered_set<std::uint64_t> by_master;
    int index_collisions = 0;
    for (int i = 0; i < 1000000; ++i) {
        const std::uint64_t m = rng();
        index_collisions += derive_seed(m, 0) == derive_seed(m, 1);
        by_master.insert(derive_seed(m, 3));
    }
    CHECK(index_collisions == 0);
    CHECK(by_master.size() == 1000000);
}

TEST_CASE("sampler config validation") {
    CHECK_THROWS_AS((SamplerConfig{EnsembleKind::GOE, 1, 1, 0}.validate()), Error);
    CHECK_THROWS_AS((SamplerConfig{EnsembleKind::GOE, 4, 0, 0}.validate()), Error);
    CHECK_THROWS_AS(sample_spectrum(EnsembleKind::GUE, 1, 0), Error);
}

TEST_CASE("gse sample that stalls the plain QR sweep") {
    const auto s = sample_spectrum(EnsembleKind::GSE, 100, 7354938989385480146ULL);
    CHECK(s.energies.size() == 100);
    CHECK(std::is_sorted(s.energies.begin(), s.energies.end()));
}
