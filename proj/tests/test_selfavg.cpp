#include <doctest.h>

#include <cmath>

#include "sfflab/error.hpp"
#include "sfflab/knsff.hpp"
#include "sfflab/selfavg.hpp"

using namespace sfflab;

namespace {

std::vector<UnfoldedSpectrum> gue_spectra(int n, int r, std::uint64_t seed) {
    std::vector<UnfoldedSpectrum> out;
    for (const auto& s : sample_ensemble({EnsembleKind::GUE, n, r, seed})) out.push_back(unfold_analytic(s, 2));
    return out;
}

}  // namespace

TEST_CASE("relative variance of fixed samples") {
    const auto grid = TimeGrid::linear(0.0, 1.0, 5);
    const Curve a(grid, {0.1, 0.2, -0.3, 0.0, 0.5}, "a");
    const std::vector<Curve> same{a, a, a};
    for (double v : relative_variance(same, 1, 10).values) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));

    const double sbar = relvar_offset(10);
    CHECK(sbar == doctest::Approx(1.0 / 90.0));
    const double c = 3.0;
    const std::vector<Curve> pm{Curve(grid, std::vector<double>(5, c), "p"), Curve(grid, std::vector<double>(5, -c), "m")};
    for (double v : relative_variance(pm, 1, 10).values) CHECK(v == doctest::Approx(c * c / (sbar * sbar)).epsilon(1e-10));

    const std::vector<Curve> one{a};
    CHECK_THROWS_AS(relative_variance(one, 1, 10), Error);

    // Mean of S + S-bar vanishes: the point is undefined.
    const std::vector<Curve> zero{Curve(grid, std::vector<double>(5, -sbar), "z"), Curve(grid, std::vector<double>(5, -sbar), "z")};
    for (double v : relative_variance(zero, 1, 10).values) CHECK(std::isnan(v));
}

TEST_CASE("accumulator matches two-pass moments") {
    RelVarAccumulator acc(1, 20);
    const std::vector<double> xs{0.01, -0.02, 0.005, 0.03, -0.001};
    for (double x : xs) acc.add(std::span<const double>(&x, 1));
    const double off = relvar_offset(20);
    double m = 0.0, m2 = 0.0;
    for (double x : xs) m += (x + off) / xs.size();
    for (double x : xs) m2 += (x + off - m) * (x + off - m) / xs.size();
    CHECK(acc.count() == 5);
    CHECK(acc.relative_variance()[0] == doctest::Approx(m2 / (m * m)).epsilon(1e-12));
}

TEST_CASE("plateau average") {
    const auto grid = TimeGrid::linear(0.0, 10.0, 101);
    const Curve flat(grid, std::vector<double>(101, 2.5), "c");
    CHECK(plateau_average(flat, 1.0, 5.0) == doctest::Approx(2.5));
    std::vector<double> lin;
    for (double t : grid.times()) lin.push_back(0.7 * t);
    const Curve line(grid, lin, "l");
    CHECK(plateau_average(line, 0.0, 10.0) == doctest::Approx(0.7 * 10.0 / 2.0).epsilon(1e-13));
    CHECK(plateau_average(line, 1.234, 3.3) == doctest::Approx(0.7 * (1.234 + 1.65)).epsilon(1e-13));
    CHECK_THROWS_AS(plateau_average(line, 5.0, 6.0), Error);
    CHECK_THROWS_AS(plateau_average(line, -1.0, 2.0), Error);
    auto holed = flat;
    holed.values[50] = std::nan("");
    CHECK(plateau_average(holed, 0.0, 10.0) == doctest::Approx(2.5));
}

TEST_CASE("plateau formula") {
    CHECK(relvar_plateau_formula(1, 100) == doctest::Approx(49.005));
    CHECK(relvar_plateau_formula(100, 100) == 0.0);
    CHECK(relvar_plateau_formula(10, 50) - relvar_plateau_formula(11, 50) == doctest::Approx(49.0 / 100.0));
}

TEST_CASE("monte-carlo relative variance") {
    const auto grid = TimeGrid::linear(0.0, 24.0 * M_PI, 2400);
    const auto s50 = gue_spectra(50, 400, 61);
    const auto s100 = gue_spectra(100, 400, 62);
    const auto r50 = relvar_report(s50, 1, grid);
    const auto r100 = relvar_report(s100, 1, grid);
    CHECK(r50.n_realizations == 400);
    CHECK(r50.dim == 50);
    CHECK(r50.T_window == doctest::Approx(20.0 * M_PI));
    for (double v : r50.curve.values)
        if (!std::isnan(v)) CHECK(v >= 0.0);
    // No self-averaging: the plateau grows with N.
    CHECK(r100.plateau_avg > r50.plateau_avg);
    CHECK(r50.curve.values[0] == doctest::Approx(0.0).epsilon(1e-20));

    // Random phases on the plateau: Var S^(k) = 2(N-k)/N^4 for one realization.
    const auto plateau = TimeGrid::linear(kPlateauStart, kPlateauStart + kPlateauWindow, 400);
    for (int k : {1, 5, 20}) {
        std::vector<Curve> per;
        for (const auto& s : s50) per.push_back(knsff_numeric(std::span(&s, 1), k, plateau));
        double var = 0.0;
        for (std::size_t j = 0; j < plateau.n_points; ++j) {
            double m = 0.0, m2 = 0.0;
            for (const auto& c : per) {
                m += c.values[j] / per.size();
                m2 += c.values[j] * c.values[j] / per.size();
            }
            var += (m2 - m * m) / plateau.n_points;
        }
        const double oracle = 2.0 * (50 - k) / std::pow(50.0, 4);
        INFO("k = " << k << " variance " << var << " oracle " << oracle);
        CHECK(std::abs(var / oracle - 1.0) < 0.1);

        const auto direct = relative_variance(per, k, 50);
        const auto streamed = knsff_relative_variance(s50, k, plateau);
        for (std::size_t j = 0; j < plateau.n_points; ++j)
            CHECK(streamed.values[j] == doctest::Approx(direct.values[j]).epsilon(1e-8));
    }

    CHECK(knsff_relative_variance(s50, 3, grid).values.size() == grid.n_points);
}
