#include "sfflab/knsff.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "sfflab/error.hpp"
#include "sfflab/numeric.hpp"
#include "sfflab/parallel.hpp"
#include "sfflab/specfun.hpp"

namespace sfflab {

namespace {

constexpr std::size_t kAnchorEvery = 128;
constexpr int kPanelOrder = 16;

void check_k(int k, int dim) {
    require(dim >= 2, "knSFF: N must be >= 2");
    require(k >= 1 && k <= dim - 1, "knSFF: k must be in [1, N-1]");
}

int common_dim(std::span<const UnfoldedSpectrum> spectra) {
    require(!spectra.empty(), "knSFF: no spectra");
    const int dim = static_cast<int>(spectra.front().energies.size());
    for (const auto& s : spectra)
        if (static_cast<int>(s.energies.size()) != dim) fail(ErrorCode::Mismatch, "knSFF: spectra differ in dimension");
    return dim;
}

bool uniform_grid(const TimeGrid& g) { return g.kind == TimeGrid::Kind::Linear; }

// Vertex of the parabola through (t[i-1..i+1], v[i-1..i+1]).
Extremum parabolic_vertex(const double* t, const double* v) {
    const double t0 = t[0], t1 = t[1], t2 = t[2];
    const double f0 = v[0], f1 = v[1], f2 = v[2];
    const double d01 = (f1 - f0) / (t1 - t0);
    const double d12 = (f2 - f1) / (t2 - t1);
    const double curv = (d12 - d01) / (t2 - t0);
    if (!(curv > 0.0)) return {t1, f1};
    // f(x) = f0 + d01 (x - t0) + curv (x - t0)(x - t1)
    double x = 0.5 * (t0 + t1) - d01 / (2.0 * curv);
    x = std::clamp(x, t0, t2);
    return {x, f0 + d01 * (x - t0) + curv * (x - t0) * (x - t1)};
}

struct MinSearch {
    Extremum at;
    bool interior = false;
};

MinSearch grid_minimum(std::span<const double> t, std::span<const double> v) {
    std::size_t best = t.size();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(v[i])) continue;
        if (best == t.size() || v[i] < v[best]) best = i;
    }
    if (best == t.size()) fail(ErrorCode::Numerical, "no finite samples to minimize");
    if (best == 0 || best + 1 == t.size()) return {{t[best], v[best]}, false};
    if (!std::isfinite(v[best - 1]) || !std::isfinite(v[best + 1])) return {{t[best], v[best]}, true};
    return {parabolic_vertex(&t[best - 1], &v[best - 1]), true};
}

// Endpoint expansion of int_0^inf C s^alpha e^{-A s^2} e^{-its} ds, summed to
// its smallest term.
std::complex<double> surmise_fourier_tail(const SurmiseParams& p, double t) {
    const double log_t = std::log(t);
    const double log_a = std::log(p.a_alpha);
    const auto alpha = std::llround(p.alpha);
    double re = 0.0, im = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n < 400; ++n) {
        const double lambda = static_cast<double>(alpha + 2 * n + 1);
        const double log_mag = p.log_c + n * log_a + std::lgamma(lambda) - std::lgamma(n + 1.0) - lambda * log_t;
        const double mag = std::exp(log_mag);
        if (mag >= prev) break;
        prev = mag;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        switch ((alpha + 2 * n + 1) % 4) {
            case 0: re += sign * mag; break;
            case 1: im -= sign * mag; break;
            case 2: re -= sign * mag; break;
            default: im += sign * mag; break;
        }
        if (mag < 1e-18 * (std::abs(re) + std::abs(im))) break;
    }
    return {re, im};
}

std::complex<double> surmise_fourier_quadrature(const SurmiseParams& p, double t) {
    const double root_a = std::sqrt(p.a_alpha);
    const double lo = std::max(0.0, p.omega - 8.0 / root_a);
    const double hi = p.omega + 8.0 / root_a;
    double h = 0.5 / root_a;
    if (t > 0.0) h = std::min(h, 2.0 / t);
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / h));
    const double width = (hi - lo) / static_cast<double>(panels);
    const auto& gl = gauss_legendre(kPanelOrder);
    CompensatedSum re, im;
    for (std::size_t j = 0; j < panels; ++j) {
        const double a = lo + width * static_cast<double>(j);
        const double mid = a + 0.5 * width;
        for (int q = 0; q < kPanelOrder; ++q) {
            const double s = mid + 0.5 * width * gl.nodes[q];
            if (s <= 0.0) continue;
            const double w = 0.5 * width * gl.weights[q] * std::exp(p.log_c + p.alpha * std::log(s) - p.a_alpha * s * s);
            re.add(w * std::cos(t * s));
            im.add(-w * std::sin(t * s));
        }
    }
    return {re.value(), im.value()};
}

}  // namespace

double knsff_prefactor(int k, int dim) {
    check_k(k, dim);
    return 2.0 * (dim - k) / (static_cast<double>(dim) * dim);
}

void accumulate_phase_sums(std::span<const double> values, std::span<const double> times, bool uniform,
                           std::span<double> cos_out, std::span<double> sin_out) {
    const std::size_t m = times.size();
    require(cos_out.size() == m, "accumulate_phase_sums: output length mismatch");
    const bool want_sin = !sin_out.empty();
    require(!want_sin || sin_out.size() == m, "accumulate_phase_sums: output length mismatch");
    if (m == 0) return;
    if (!uniform || m < 3) {
        for (double v : values)
            for (std::size_t j = 0; j < m; ++j) {
                cos_out[j] += std::cos(times[j] * v);
                if (want_sin) sin_out[j] += std::sin(times[j] * v);
            }
        return;
    }
    const double dt = (times[m - 1] - times[0]) / static_cast<double>(m - 1);
    for (double v : values) {
        const double dc = std::cos(v * dt), ds = std::sin(v * dt);
        for (std::size_t j0 = 0; j0 < m; j0 += kAnchorEvery) {
            double c = std::cos(v * times[j0]), s = std::sin(v * times[j0]);
            const std::size_t end = std::min(m, j0 + kAnchorEvery);
            for (std::size_t j = j0; j < end; ++j) {
                cos_out[j] += c;
                if (want_sin) sin_out[j] += s;
                const double cn = c * dc - s * ds;
                s = s * dc + c * ds;
                c = cn;
            }
        }
    }
}

std::vector<Curve> knsff_numeric(std::span<const UnfoldedSpectrum> spectra, std::span<const int> ks,
                                 const TimeGrid& grid) {
    const int dim = common_dim(spectra);
    for (int k : ks) check_k(k, dim);
    const auto times = grid.times();
    const std::size_t m = times.size();
    const std::size_t nk = ks.size();
    const bool uniform = uniform_grid(grid);

    auto total = chunked_reduce(
        spectra.size(), std::vector<double>(nk * m, 0.0),
        [&](std::vector<double>& acc, std::size_t r) {
            std::vector<double> sums(m);
            for (std::size_t ki = 0; ki < nk; ++ki) {
                std::fill(sums.begin(), sums.end(), 0.0);
                const auto sp = extract_spacings(spectra[r].energies, ks[ki]);
                accumulate_phase_sums(sp.values, times, uniform, sums);
                for (std::size_t j = 0; j < m; ++j) acc[ki * m + j] += sums[j];
            }
        },
        [](std::vector<double>& a, const std::vector<double>& b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        });

    // One division at the end keeps t = 0 exactly at 2(N-k)/N^2.
    const double denom = static_cast<double>(dim) * dim * static_cast<double>(spectra.size());
    std::vector<Curve> out;
    out.reserve(nk);
    for (std::size_t ki = 0; ki < nk; ++ki) {
        std::vector<double> vals(total.begin() + static_cast<std::ptrdiff_t>(ki * m),
                                 total.begin() + static_cast<std::ptrdiff_t>((ki + 1) * m));
        for (auto& v : vals) v = 2.0 * v / denom;
        out.emplace_back(grid, std::move(vals), "S_k" + std::to_string(ks[ki]));
    }
    return out;
}

Curve knsff_numeric(std::span<const UnfoldedSpectrum> spectra, int k, const TimeGrid& grid) {
    const int ks[] = {k};
    return std::move(knsff_numeric(spectra, ks, grid).front());
}

std::complex<double> surmise_fourier(const SurmiseParams& p, double t) {
    require(t >= 0.0, "surmise_fourier: t must be >= 0");
    const double x = t * t / (4.0 * p.a_alpha);
    if (x > p.alpha && x - 0.5 * p.alpha * std::log(x) > 90.0) return surmise_fourier_tail(p, t);
    return surmise_fourier_quadrature(p, t);
}

double f_exact(const SurmiseParams& p, double t) {
    const double x = p.omega * p.omega * t * t / (2.0 * p.alpha);
    if (x < 200.0) {
        try {
            const auto series = specfun::laguerre_fn_series(p.alpha / 2.0, -0.5, x);
            const double log_pref = 0.5 * std::log(kPi * p.alpha / 2.0) + std::log(static_cast<double>(p.k)) -
                                    std::log(p.omega) - x;
            const double pref = std::exp(log_pref);
            const double err = 64.0 * DBL_EPSILON * series.max_term * pref;
            const double value = pref * series.value;
            if (std::isfinite(value) && err < 1e-13) return value;
        } catch (const Error& e) {
            // Slow series for large alpha and moderate x: fall through to direct integration.
            if (e.code() != ErrorCode::NonConvergence) throw;
        }
    }
    return surmise_fourier(p, t).real();
}

double f_exact(int k, int beta, double t) { return f_exact(surmise_params(k, beta), t); }

double f_approx(const SurmiseParams& p, double t) {
    const double wt = p.omega * t;
    const double x = wt * wt / (2.0 * p.alpha);
    return std::exp(-x / 2.0) * (std::cos(wt) + wt / (12.0 * p.alpha) * (x - 3.0) * std::sin(wt));
}

double f_approx(int k, int beta, double t) {
    require(k >= 1, "f_approx: k must be >= 1");
    return f_approx(surmise_params(k, beta), t);
}

double knsff_shape(const SurmiseParams& p, double t, KnsffMode mode) {
    switch (mode) {
        case KnsffMode::Exact: return f_exact(p, t);
        case KnsffMode::Approx: return f_approx(p, t);
        case KnsffMode::Auto: return p.k <= kAutoExactMaxK ? f_exact(p, t) : f_approx(p, t);
    }
    return f_exact(p, t);
}

Curve knsff_analytic(int k, int beta, int dim, const TimeGrid& grid, KnsffMode mode) {
    const double c = knsff_prefactor(k, dim);
    const auto p = surmise_params(k, beta);
    Curve out(grid, "S_k" + std::to_string(k));
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] = c * knsff_shape(p, out.t[j], mode);
    return out;
}

double knsff_poisson_value(int k, int dim, double t) {
    return knsff_prefactor(k, dim) * std::cos(k * std::atan(t)) / std::pow(1.0 + t * t, 0.5 * k);
}

Curve knsff_poisson(int k, int dim, const TimeGrid& grid) {
    check_k(k, dim);
    Curve out(grid, "S_k" + std::to_string(k));
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] = knsff_poisson_value(k, dim, out.t[j]);
    return out;
}

Curve knsff_ensemble(EnsembleKind kind, int k, int dim, const TimeGrid& grid, KnsffMode mode) {
    if (kind == EnsembleKind::Poisson) return knsff_poisson(k, dim, grid);
    return knsff_analytic(k, dyson_beta(kind), dim, grid, mode);
}

double min_time(int k, EnsembleKind kind) {
    require(k >= 1, "min_time: k must be >= 1");
    if (kind == EnsembleKind::Poisson) {
        if (k == 1) fail(ErrorCode::NoMinimum, "min_time: the Poisson k=1 form factor has no minimum");
        return std::tan(kPi / (1.0 + k));
    }
    return kPi / surmise_params(k, dyson_beta(kind)).omega;
}

Extremum locate_minimum(const Curve& curve) {
    curve.check();
    require(curve.size() >= 3, "locate_minimum: need at least three samples");
    const auto r = grid_minimum(curve.t, curve.values);
    if (!r.interior) fail(ErrorCode::Boundary, "locate_minimum: minimum lies on the grid boundary");
    return r.at;
}

double min_time_numeric(const Curve& curve) { return locate_minimum(curve).t; }

double min_value(int k, EnsembleKind kind, int dim) {
    const double c = knsff_prefactor(k, dim);
    if (kind == EnsembleKind::Poisson) {
        if (k == 1) fail(ErrorCode::NoMinimum, "min_value: the Poisson k=1 form factor has no minimum");
        const double x = kPi / (k + 1.0);
        return c * std::pow(std::cos(x), k) * std::cos(k * x);
    }
    const double beta = dyson_beta(kind);
    return -c * std::exp(-kPi * kPi / (2.0 * k * (beta * k + beta + 2.0)));
}

double kstar_expansion(EnsembleKind kind, int dim) {
    require(dim >= 10, "deepest_k: N must be >= 10");
    const double n = dim;
    if (kind == EnsembleKind::Poisson) return kPi / std::sqrt(2.0) * std::sqrt(n) - (1.0 + kPi * kPi / 4.0);
    const double beta = dyson_beta(kind);
    const double c13 = std::cbrt(kPi * kPi / beta);
    const double c0 = -(beta + 2.0) / (3.0 * beta);
    const double cm13 =
        ((2.0 + beta) * (2.0 + beta) - 3.0 * beta * kPi * kPi) / (9.0 * std::pow(beta, 5.0 / 3.0) * std::cbrt(kPi * kPi));
    const double n13 = std::cbrt(n);
    return c13 * n13 + c0 + cm13 / n13;
}

namespace {
template <class F>
double bisect(F f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}
}  // namespace

double kstar_cubic(EnsembleKind kind, int dim) {
    require(dim >= 10, "deepest_k: N must be >= 10");
    const double n = dim;
    if (kind == EnsembleKind::Poisson) {
        // Large-k stationarity of (N-k) cos^{k+1}(pi/(k+1)), expanded to O(k^-3):
        // k^3 - (b + aN) k + 2bN = 0 with a = pi^2/2, b = (4 pi^2 + pi^4)/8.
        const double a = kPi * kPi / 2.0;
        const double b = (4.0 * kPi * kPi + std::pow(kPi, 4)) / 8.0;
        auto f = [&](double k) { return k * k * k - (b + a * n) * k + 2.0 * b * n; };
        const double turn = std::sqrt((b + a * n) / 3.0);
        if (f(turn) > 0.0) fail(ErrorCode::NonConvergence, "kstar_cubic: no positive root");
        return bisect(f, turn, std::max(n, 2.0 * turn));
    }
    const double beta = dyson_beta(kind);
    auto f = [&](double k) { return k * k * (2.0 + beta + beta * k) - n * kPi * kPi; };
    return bisect(f, 0.0, n);
}

int deepest_k(EnsembleKind kind, int dim, KStarMethod method) {
    require(dim >= 10, "deepest_k: N must be >= 10");
    auto round_half_down = [](double x) { return static_cast<int>(std::ceil(x - 0.5)); };
    switch (method) {
        case KStarMethod::AnalyticExpansion: return round_half_down(kstar_expansion(kind, dim));
        case KStarMethod::CubicRoot: return round_half_down(kstar_cubic(kind, dim));
        case KStarMethod::NumericArgmin: {
            int best = 0;
            double best_v = std::numeric_limits<double>::infinity();
            for (int k = kind == EnsembleKind::Poisson ? 2 : 1; k <= dim - 1; ++k) {
                const double v = min_value(k, kind, dim);
                if (v < best_v) {
                    best_v = v;
                    best = k;
                }
            }
            return best;
        }
    }
    fail(ErrorCode::Precondition, "deepest_k: unknown method");
}

double envelope_width(int k, int beta) {
    const auto p = surmise_params(k, beta);
    return std::sqrt(2.0 * p.alpha) / p.omega;
}

double oscillation_count(int k, int beta) {
    require(k >= 1, "oscillation_count: k must be >= 1");
    require(beta == 1 || beta == 2 || beta == 4, "oscillation_count: beta must be 1, 2 or 4");
    return std::sqrt(2.0 * surmise_alpha(k, beta)) / kTwoPi;
}

std::vector<KnsffMinimum> knsff_minima(std::span<const UnfoldedSpectrum> spectra, int k_max, int n_points) {
    const int dim = common_dim(spectra);
    require(k_max >= 1 && k_max <= dim - 1, "knsff_minima: k_max must be in [1, N-1]");
    require(n_points >= 3, "knsff_minima: need at least three points per window");
    const auto m = static_cast<std::size_t>(n_points);
    std::vector<std::vector<double>> windows(k_max);
    for (int k = 1; k <= k_max; ++k) windows[k - 1] = linspace(0.5 * kPi / k, 1.6 * kPi / k, m);

    auto total = chunked_reduce(
        spectra.size(), std::vector<double>(static_cast<std::size_t>(k_max) * m, 0.0),
        [&](std::vector<double>& acc, std::size_t r) {
            const auto& e = spectra[r].energies;
            std::vector<double> sp;
            for (int k = 1; k <= k_max; ++k) {
                sp.resize(dim - k);
                for (int i = 0; i + k < dim; ++i) sp[i] = e[i + k] - e[i];
                std::span<double> out(acc.data() + static_cast<std::size_t>(k - 1) * m, m);
                accumulate_phase_sums(sp, windows[k - 1], true, out);
            }
        },
        [](std::vector<double>& a, const std::vector<double>& b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        });

    const double norm = 2.0 / (static_cast<double>(dim) * dim * static_cast<double>(spectra.size()));
    std::vector<KnsffMinimum> out;
    out.reserve(k_max);
    std::vector<double> vals(m);
    for (int k = 1; k <= k_max; ++k) {
        for (std::size_t j = 0; j < m; ++j) vals[j] = norm * total[static_cast<std::size_t>(k - 1) * m + j];
        const auto r = grid_minimum(windows[k - 1], vals);
        out.push_back({k, r.at.t, r.at.value, r.interior});
    }
    return out;
}

int deepest_k_numeric(std::span<const KnsffMinimum> minima) {
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (const auto& m : minima) {
        if (!m.interior) continue;
        if (m.value < best_v) {
            best_v = m.value;
            best = m.k;
        }
    }
    if (best == 0) fail(ErrorCode::NoMinimum, "deepest_k_numeric: no interior minimum");
    return best;
}

}  // namespace sfflab
