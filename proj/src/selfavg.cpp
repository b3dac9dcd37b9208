#include "sfflab/selfavg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfflab/error.hpp"
#include "sfflab/knsff.hpp"
#include "sfflab/numeric.hpp"
#include "sfflab/parallel.hpp"

namespace sfflab {

double relvar_offset(int dim) {
    require(dim >= 2, "relvar_offset: N must be >= 2");
    return 1.0 / (static_cast<double>(dim) * (dim - 1.0));
}

RelVarAccumulator::RelVarAccumulator(std::size_t n_points, int dim)
    : mean_(n_points, 0.0), m2_(n_points, 0.0), offset_(relvar_offset(dim)) {}

void RelVarAccumulator::add(std::span<const double> sample) {
    if (sample.size() != mean_.size()) fail(ErrorCode::Mismatch, "RelVarAccumulator: sample length mismatch");
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t j = 0; j < mean_.size(); ++j) {
        const double x = sample[j] + offset_;
        const double d = x - mean_[j];
        mean_[j] += d * inv;
        m2_[j] += d * (x - mean_[j]);
    }
}

std::vector<double> RelVarAccumulator::relative_variance() const {
    require(count_ >= 2, "relative_variance: need at least two realizations");
    std::vector<double> out(mean_.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double var = m2_[j] / static_cast<double>(count_);
        const double m2 = mean_[j] * mean_[j];
        out[j] = m2 > 0.0 ? var / m2 : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

Curve relative_variance(std::span<const Curve> samples, int k, int dim) {
    require(samples.size() >= 2, "relative_variance: need at least two realizations");
    RelVarAccumulator acc(samples.front().size(), dim);
    for (const auto& s : samples) {
        if (s.t != samples.front().t) fail(ErrorCode::Mismatch, "relative_variance: samples on different grids");
        acc.add(s.values);
    }
    return Curve(samples.front().grid, acc.relative_variance(), "R_k" + std::to_string(k));
}

Curve knsff_relative_variance(std::span<const UnfoldedSpectrum> spectra, int k, const TimeGrid& grid) {
    require(spectra.size() >= 2, "relative_variance: need at least two realizations");
    const int dim = static_cast<int>(spectra.front().energies.size());
    require(k >= 1 && k <= dim - 1, "relative_variance: k must be in [1, N-1]");
    const auto times = grid.times();
    const std::size_t m = times.size();
    const double norm = 2.0 / (static_cast<double>(dim) * dim);

    // Per-realization curves are computed in parallel, then folded in index order.
    RelVarAccumulator acc(m, dim);
    const std::size_t batch = 64;
    std::vector<std::vector<double>> buf;
    for (std::size_t b0 = 0; b0 < spectra.size(); b0 += batch) {
        const std::size_t nb = std::min(batch, spectra.size() - b0);
        buf.assign(nb, std::vector<double>(m, 0.0));
        parallel_for(nb, [&](std::size_t i) {
            const auto& e = spectra[b0 + i].energies;
            if (static_cast<int>(e.size()) != dim) fail(ErrorCode::Mismatch, "relative_variance: spectra differ in dimension");
            std::vector<double> sp(dim - k);
            for (int n = 0; n + k < dim; ++n) sp[n] = e[n + k] - e[n];
            accumulate_phase_sums(sp, times, grid.kind == TimeGrid::Kind::Linear, buf[i]);
            for (auto& v : buf[i]) v *= norm;
        });
        for (const auto& s : buf) acc.add(s);
    }
    return Curve(grid, acc.relative_variance(), "R_k" + std::to_string(k));
}

double plateau_average(const Curve& curve, double t_start, double T) {
    curve.check();
    require(T > 0.0, "plateau_average: T must be > 0");
    const double t_end = t_start + T;
    const double slack = 1e-12 * std::max(1.0, std::abs(t_end));
    if (curve.size() < 2 || t_start < curve.t.front() - slack || t_end > curve.t.back() + slack)
        fail(ErrorCode::Precondition, "plateau_average: window outside the grid");

    auto value_at = [&](double t) {
        auto it = std::upper_bound(curve.t.begin(), curve.t.end(), t);
        std::size_t j = it == curve.t.begin() ? 1 : static_cast<std::size_t>(it - curve.t.begin());
        j = std::min(j, curve.size() - 1);
        const double t0 = curve.t[j - 1], t1 = curve.t[j];
        const double w = (t - t0) / (t1 - t0);
        return (1.0 - w) * curve.values[j - 1] + w * curve.values[j];
    };

    std::vector<double> ts{t_start}, vs{value_at(t_start)};
    for (std::size_t j = 0; j < curve.size(); ++j)
        if (curve.t[j] > t_start && curve.t[j] < t_end) {
            ts.push_back(curve.t[j]);
            vs.push_back(curve.values[j]);
        }
    ts.push_back(t_end);
    vs.push_back(value_at(t_end));

    CompensatedSum area, length;
    for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
        if (!std::isfinite(vs[j]) || !std::isfinite(vs[j + 1])) continue;
        const double dt = ts[j + 1] - ts[j];
        area.add(0.5 * dt * (vs[j] + vs[j + 1]));
        length.add(dt);
    }
    if (!(length.value() > 0.0)) fail(ErrorCode::Numerical, "plateau_average: no defined samples in the window");
    return area.value() / length.value();
}

double relvar_plateau_formula(int k, int dim) {
    require(dim >= 2, "relvar_plateau_formula: N must be >= 2");
    return (dim - k) * (dim - 1.0) / (2.0 * dim);
}

RelVarReport relvar_report(std::span<const UnfoldedSpectrum> spectra, int k, const TimeGrid& grid, double t_start,
                           double T) {
    RelVarReport r;
    r.k = k;
    r.curve = knsff_relative_variance(spectra, k, grid);
    r.plateau_avg = plateau_average(r.curve, t_start, T);
    r.dim = static_cast<int>(spectra.front().energies.size());
    r.n_realizations = static_cast<int>(spectra.size());
    r.t_start = t_start;
    r.T_window = T;
    return r;
}

}  // namespace sfflab
