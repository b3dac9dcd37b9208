#include "sfflab/assembly.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

#include "sfflab/error.hpp"
#include "sfflab/numeric.hpp"
#include "sfflab/parallel.hpp"
#include "sfflab/specfun.hpp"

namespace sfflab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int common_dim(std::span<const UnfoldedSpectrum> spectra) {
    require(!spectra.empty(), "no spectra");
    const auto dim = spectra.front().energies.size();
    for (const auto& s : spectra)
        if (s.energies.size() != dim) fail(ErrorCode::Mismatch, "spectra differ in dimension");
    require(dim >= 2, "N must be >= 2");
    return static_cast<int>(dim);
}

bool uniform_grid(const TimeGrid& g) { return g.kind == TimeGrid::Kind::Linear; }

void add_into(std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

// Normalized k-th shape without the C_N^(k) prefactor.
double shape(EnsembleKind kind, const SurmiseParams* p, int k, double t, KnsffMode mode) {
    if (kind == EnsembleKind::Poisson) return std::cos(k * std::atan(t)) / std::pow(1.0 + t * t, 0.5 * k);
    return knsff_shape(*p, t, mode);
}

// sum_{k=k_lo}^{k_hi} step-wise C_N^(k) shape_k(t) on the grid.
std::vector<double> analytic_sum(EnsembleKind kind, int dim, int k_lo, int k_hi, int step,
                                 const std::vector<double>& times, KnsffMode mode) {
    std::vector<double> acc(times.size(), 0.0);
    for (int k = k_lo; k <= k_hi; k += step) {
        const double c = knsff_prefactor(k, dim);
        SurmiseParams p;
        if (kind != EnsembleKind::Poisson) p = surmise_params(k, dyson_beta(kind));
        for (std::size_t j = 0; j < times.size(); ++j) acc[j] += c * shape(kind, &p, k, times[j], mode);
    }
    return acc;
}

}  // namespace

Curve full_sff_numeric(std::span<const UnfoldedSpectrum> spectra, const TimeGrid& grid) {
    const int dim = common_dim(spectra);
    const auto times = grid.times();
    const std::size_t m = times.size();
    auto total = chunked_reduce(
        spectra.size(), std::vector<double>(m, 0.0),
        [&](std::vector<double>& acc, std::size_t r) {
            std::vector<double> re(m, 0.0), im(m, 0.0);
            accumulate_phase_sums(spectra[r].energies, times, uniform_grid(grid), re, im);
            for (std::size_t j = 0; j < m; ++j) acc[j] += re[j] * re[j] + im[j] * im[j];
        },
        add_into);
    const double denom = static_cast<double>(dim) * dim * static_cast<double>(spectra.size());
    for (auto& v : total) v /= denom;
    return Curve(grid, std::move(total), "S");
}

Curve full_sff_analytic(int beta, int dim, const TimeGrid& grid, KnsffMode mode) {
    return partial_sff_analytic(ensemble_from_beta(beta), dim, dim - 1, grid, mode);
}

Curve full_sff_poisson(int dim, const TimeGrid& grid) {
    return partial_sff_analytic(EnsembleKind::Poisson, dim, dim - 1, grid);
}

Curve partial_sff(std::span<const Curve> components, int dim, int K) {
    require(dim >= 2, "partial_sff: N must be >= 2");
    require(K >= 0 && K <= dim - 1, "partial_sff: K must be in [0, N-1]");
    require(static_cast<int>(components.size()) >= K, "partial_sff: fewer components than K");
    require(!components.empty(), "partial_sff: need at least one component to fix the grid");
    Curve out = components.front();
    out.label = "S_K" + std::to_string(K);
    std::fill(out.values.begin(), out.values.end(), 1.0 / dim);
    for (int k = 1; k <= K; ++k) out = add(out, components[k - 1], out.label);
    return out;
}

Curve partial_sff_analytic(EnsembleKind kind, int dim, int K, const TimeGrid& grid, KnsffMode mode) {
    require(dim >= 2, "partial_sff: N must be >= 2");
    require(K >= 0 && K <= dim - 1, "partial_sff: K must be in [0, N-1]");
    const auto times = grid.times();
    auto vals = analytic_sum(kind, dim, 1, K, 1, times, mode);
    for (auto& v : vals) v += 1.0 / dim;
    return Curve(grid, std::move(vals), K == dim - 1 ? "S" : "S_K" + std::to_string(K));
}

Curve partial_sff_numeric(std::span<const UnfoldedSpectrum> spectra, int K, const TimeGrid& grid) {
    const int dim = common_dim(spectra);
    require(K >= 0 && K <= dim - 1, "partial_sff: K must be in [0, N-1]");
    if (K == 0) return Curve(grid, std::vector<double>(grid.times().size(), 1.0 / dim), "S_K0");
    std::vector<int> ks(K);
    for (int k = 1; k <= K; ++k) ks[k - 1] = k;
    const auto comps = knsff_numeric(spectra, ks, grid);
    return partial_sff(comps, dim, K);
}

EvenOdd even_odd_sums(std::span<const Curve> components, int dim) {
    require(dim >= 3, "even_odd_sums: N must be >= 3");
    require(static_cast<int>(components.size()) == dim - 1, "even_odd_sums: need N-1 components");
    EvenOdd out{components.front(), components.front()};
    std::fill(out.even.values.begin(), out.even.values.end(), 0.5 / dim);
    std::fill(out.odd.values.begin(), out.odd.values.end(), 0.5 / dim);
    out.even.label = "even";
    out.odd.label = "odd";
    for (int k = 1; k <= dim - 1; ++k) {
        auto& target = (k % 2 == 0) ? out.even : out.odd;
        target = add(target, components[k - 1], target.label);
    }
    return out;
}

EvenOdd even_odd_sums_analytic(EnsembleKind kind, int dim, const TimeGrid& grid, KnsffMode mode) {
    require(dim >= 3, "even_odd_sums: N must be >= 3");
    const auto times = grid.times();
    auto even = analytic_sum(kind, dim, 2, dim - 1, 2, times, mode);
    auto odd = analytic_sum(kind, dim, 1, dim - 1, 2, times, mode);
    for (auto& v : even) v += 0.5 / dim;
    for (auto& v : odd) v += 0.5 / dim;
    return {Curve(grid, std::move(even), "even"), Curve(grid, std::move(odd), "odd")};
}

EvenOdd even_odd_sums_numeric(std::span<const UnfoldedSpectrum> spectra, const TimeGrid& grid) {
    const int dim = common_dim(spectra);
    require(dim >= 3, "even_odd_sums: N must be >= 3");
    const auto times = grid.times();
    const std::size_t m = times.size();
    // Pairs at even distance lie within one index-parity class:
    // sum_{even pairs} cos = (|Z_A|^2 + |Z_B|^2 - N)/2, sum_{odd pairs} cos = Re(Z_A conj(Z_B)).
    auto total = chunked_reduce(
        spectra.size(), std::vector<double>(2 * m, 0.0),
        [&](std::vector<double>& acc, std::size_t r) {
            const auto& e = spectra[r].energies;
            std::vector<double> ea, eb;
            for (int i = 0; i < dim; ++i) (i % 2 == 0 ? ea : eb).push_back(e[i]);
            std::vector<double> ra(m, 0.0), ia(m, 0.0), rb(m, 0.0), ib(m, 0.0);
            accumulate_phase_sums(ea, times, uniform_grid(grid), ra, ia);
            accumulate_phase_sums(eb, times, uniform_grid(grid), rb, ib);
            for (std::size_t j = 0; j < m; ++j) {
                acc[j] += ra[j] * ra[j] + ia[j] * ia[j] + rb[j] * rb[j] + ib[j] * ib[j] - dim;
                acc[m + j] += 2.0 * (ra[j] * rb[j] + ia[j] * ib[j]);
            }
        },
        add_into);
    const double norm = 1.0 / (static_cast<double>(dim) * dim * static_cast<double>(spectra.size()));
    std::vector<double> even(m), odd(m);
    for (std::size_t j = 0; j < m; ++j) {
        even[j] = 0.5 / dim + norm * total[j];
        odd[j] = 0.5 / dim + norm * total[m + j];
    }
    return {Curve(grid, std::move(even), "even"), Curve(grid, std::move(odd), "odd")};
}

ConnectedKind connected_kind(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::GOE: return ConnectedKind::GOE;
        case EnsembleKind::GUE: return ConnectedKind::GUE;
        case EnsembleKind::GSE: return ConnectedKind::GSE;
        case EnsembleKind::Poisson: break;
    }
    fail(ErrorCode::Domain, "connected SFF is defined for Gaussian ensembles only");
}

double connected_sff(ConnectedKind kind, int dim, double t) {
    require(t >= 0.0, "connected_sff: t must be >= 0");
    require(dim >= 1, "connected_sff: N must be >= 1");
    const double n = dim;
    switch (kind) {
        case ConnectedKind::GUE: return t <= kTwoPi ? t / (kTwoPi * n) : 1.0 / n;
        case ConnectedKind::GOE:
            if (t <= kTwoPi) return t / (kPi * n) - t / (kTwoPi * n) * std::log1p(t / kPi);
            return 2.0 / n - t / (kTwoPi * n) * std::log((t + kPi) / (t - kPi));
        case ConnectedKind::GSE: {
            if (t > 2.0 * kTwoPi) return 1.0 / n;
            const double v = t / (2.0 * kTwoPi * n) - t / (4.0 * kTwoPi * n) * std::log(std::abs(1.0 - t / kTwoPi));
            const double cap = kGseSpikeCap / n;
            return (std::isfinite(v) && v < cap) ? v : cap;
        }
    }
    return kNaN;
}

Curve connected_curve(ConnectedKind kind, int dim, const TimeGrid& grid) {
    Curve out(grid, "b");
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] = connected_sff(kind, dim, out.t[j]);
    return out;
}

Curve delta_sff(const Curve& curve, ConnectedKind kind, int dim) {
    curve.check();
    Curve out = curve;
    out.label = "delta";
    bool any = false;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double s = curve.values[j];
        const double b = connected_sff(kind, dim, curve.t[j]);
        if (s > 0.0 && b > 0.0 && std::isfinite(s)) {
            out.values[j] = std::abs(std::log10(s / b));
            any = true;
        } else {
            out.values[j] = kNaN;
        }
    }
    if (!any) fail(ErrorCode::Numerical, "delta_sff: no point with positive SFF");
    return out;
}

double dip_time(const Curve& curve) {
    curve.check();
    const auto& v = curve.values;
    const std::size_t n = v.size();
    std::size_t best = n;
    for (std::size_t i = 1; i + 1 < n;) {
        std::size_t j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        if (j + 1 < n && v[i - 1] < v[i] && v[j + 1] < v[i] && (best == n || v[i] < v[best])) best = i;
        i = j + 1;
    }
    if (best == n) fail(ErrorCode::NoRelativeMax, "dip_time: curve has no interior relative maximum");
    return curve.t[best];
}

double thouless_time(const Curve& delta, double epsilon) {
    require(epsilon > 0.0, "thouless_time: epsilon must be > 0");
    delta.check();
    const auto& d = delta.values;
    std::ptrdiff_t last_above = -1, first_defined = -1, last_defined = -1;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (!std::isfinite(d[j])) continue;
        if (first_defined < 0) first_defined = static_cast<std::ptrdiff_t>(j);
        last_defined = static_cast<std::ptrdiff_t>(j);
        if (d[j] >= epsilon) last_above = static_cast<std::ptrdiff_t>(j);
    }
    if (last_defined < 0) fail(ErrorCode::NeverBelow, "thouless_time: no defined points");
    if (last_above == last_defined) fail(ErrorCode::NeverBelow, "thouless_time: delta never settles below epsilon");
    if (last_above < 0) return delta.t[first_defined];
    auto next = static_cast<std::size_t>(last_above + 1);
    while (!std::isfinite(d[next])) ++next;
    const double t0 = delta.t[last_above], t1 = delta.t[next];
    const double d0 = d[last_above], d1 = d[next];
    return t0 + (epsilon - d0) * (t1 - t0) / (d1 - d0);
}

double default_epsilon(ConnectedKind kind) { return kind == ConnectedKind::GSE ? 0.25 : 0.1; }

PartialSffResult partial_timescales(const Curve& partial, int K, ConnectedKind kind, int dim, double epsilon) {
    PartialSffResult out{K, partial, std::nullopt, std::nullopt, epsilon};
    try {
        out.t_dip = dip_time(partial);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRelativeMax) throw;
    }
    try {
        out.t_thouless = thouless_time(delta_sff(partial, kind, dim), epsilon);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NeverBelow && e.code() != ErrorCode::Numerical) throw;
    }
    return out;
}

std::complex<double> toy_transform(int beta, double t) {
    require(t >= 0.0, "toy_transform: t must be >= 0");
    const auto p = surmise_params(1, beta);
    const double x = t * t / (4.0 * p.a_alpha);
    if (x < 200.0) {
        const auto re = specfun::hyp1f1_series((beta + 1.0) / 2.0, 0.5, -x);
        const auto im = specfun::hyp1f1_series(beta / 2.0 + 1.0, 1.5, -x);
        const double err = 64.0 * DBL_EPSILON * std::max(re.max_term, t * im.max_term);
        if (err < 1e-13 && std::isfinite(re.value) && std::isfinite(im.value)) return {re.value, -t * im.value};
    }
    return surmise_fourier(p, t);
}

Curve toy_sff(int beta, int dim, const TimeGrid& grid) {
    require(dim >= 2, "toy_sff: N must be >= 2");
    Curve out(grid, "toy");
    for (std::size_t j = 0; j < out.size(); ++j) {
        const auto f = toy_transform(beta, out.t[j]);
        std::complex<double> power = 1.0;
        double acc = 1.0 / dim;
        for (int k = 1; k <= dim - 1; ++k) {
            power *= f;
            acc += knsff_prefactor(k, dim) * power.real();
        }
        out.values[j] = acc;
    }
    return out;
}

namespace {

struct OperatorWeights {
    int dim = 0;
    double norm2 = 0.0;
    double diag = 0.0;
    std::vector<double> coefficients;  // O_N^(k)
};

OperatorWeights operator_weights(const Eigen::MatrixXcd& op) {
    require(op.rows() == op.cols(), "autocorr: operator must be square");
    OperatorWeights w;
    w.dim = static_cast<int>(op.rows());
    require(w.dim >= 2, "autocorr: operator dimension must be >= 2");
    const double tol = 1e-12 * std::max(1.0, op.cwiseAbs().maxCoeff());
    CompensatedSum total, diag;
    for (int i = 0; i < w.dim; ++i)
        for (int j = 0; j < w.dim; ++j) {
            const double a = std::abs(op(i, j));
            if (std::abs(a - std::abs(op(j, i))) > tol)
                fail(ErrorCode::Precondition, "autocorr: |O_ij| must equal |O_ji|");
            total.add(a * a);
            if (i == j) diag.add(a * a);
        }
    w.norm2 = total.value();
    if (!(w.norm2 > 0.0)) fail(ErrorCode::Domain, "autocorr: zero operator");
    w.diag = diag.value() / w.norm2;
    w.coefficients.assign(w.dim - 1, 0.0);
    for (int k = 1; k < w.dim; ++k) {
        CompensatedSum s;
        for (int i = 0; i + k < w.dim; ++i) s.add(std::norm(op(i, i + k)));
        w.coefficients[k - 1] = 2.0 * s.value() / w.norm2;
    }
    return w;
}

AutocorrResult finish(const OperatorWeights& w, std::vector<Curve> curves, const TimeGrid& grid) {
    AutocorrResult out;
    out.diag_term = w.diag;
    out.coefficients = w.coefficients;
    out.total = Curve(grid, std::vector<double>(grid.times().size(), w.diag), "C");
    for (const auto& c : curves) out.total = add(out.total, c, "C");
    out.curves = std::move(curves);
    return out;
}

}  // namespace

AutocorrResult autocorr_decompose(const Eigen::MatrixXcd& op, std::span<const UnfoldedSpectrum> spectra,
                                  const TimeGrid& grid) {
    const auto w = operator_weights(op);
    const int dim = common_dim(spectra);
    if (dim != w.dim) fail(ErrorCode::Mismatch, "autocorr: operator and spectra differ in dimension");
    const auto times = grid.times();
    const std::size_t m = times.size();
    const auto n1 = static_cast<std::size_t>(dim - 1);
    auto total = chunked_reduce(
        spectra.size(), std::vector<double>(n1 * m, 0.0),
        [&](std::vector<double>& acc, std::size_t r) {
            const auto& e = spectra[r].energies;
            for (int k = 1; k < dim; ++k) {
                double* row = acc.data() + static_cast<std::size_t>(k - 1) * m;
                for (int i = 0; i + k < dim; ++i) {
                    const double weight = 2.0 * std::norm(op(i, i + k)) / w.norm2;
                    if (weight == 0.0) continue;
                    const double s = e[i + k] - e[i];
                    for (std::size_t j = 0; j < m; ++j) row[j] += weight * std::cos(times[j] * s);
                }
            }
        },
        add_into);
    const double inv_r = 1.0 / static_cast<double>(spectra.size());
    std::vector<Curve> curves;
    curves.reserve(n1);
    for (std::size_t k = 0; k < n1; ++k) {
        std::vector<double> v(total.begin() + static_cast<std::ptrdiff_t>(k * m),
                              total.begin() + static_cast<std::ptrdiff_t>((k + 1) * m));
        for (auto& x : v) x *= inv_r;
        curves.emplace_back(grid, std::move(v), "C_k" + std::to_string(k + 1));
    }
    return finish(w, std::move(curves), grid);
}

AutocorrResult autocorr_decompose(const Eigen::MatrixXcd& op, EnsembleKind kind, const TimeGrid& grid,
                                  KnsffMode mode) {
    const auto w = operator_weights(op);
    const auto times = grid.times();
    std::vector<Curve> curves;
    curves.reserve(w.dim - 1);
    for (int k = 1; k < w.dim; ++k) {
        SurmiseParams p;
        if (kind != EnsembleKind::Poisson) p = surmise_params(k, dyson_beta(kind));
        std::vector<double> v(times.size());
        for (std::size_t j = 0; j < times.size(); ++j)
            v[j] = w.coefficients[k - 1] * shape(kind, &p, k, times[j], mode);
        curves.emplace_back(grid, std::move(v), "C_k" + std::to_string(k));
    }
    return finish(w, std::move(curves), grid);
}

double autocorr_direct(const Eigen::MatrixXcd& op, std::span<const double> energies, double t) {
    const auto w = operator_weights(op);
    require(static_cast<int>(energies.size()) == w.dim, "autocorr: operator and spectrum differ in dimension");
    CompensatedSum s;
    for (int i = 0; i < w.dim; ++i)
        for (int j = 0; j < w.dim; ++j) s.add(std::norm(op(i, j)) * std::cos(t * (energies[i] - energies[j])));
    return s.value() / w.norm2;
}

}  // namespace sfflab
