#include "sfflab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "sfflab/assembly.hpp"
#include "sfflab/error.hpp"
#include "sfflab/io.hpp"
#include "sfflab/numeric.hpp"
#include "sfflab/selfavg.hpp"
#include "sfflab/spacings.hpp"
#include "sfflab/unfold.hpp"
#include "sfflab/xxz.hpp"

namespace sfflab::cli {

using nlohmann::json;

namespace {

const std::vector<std::pair<std::string, std::string>> kCommands = {
    {"sample", "raw ensemble spectra"},
    {"unfold", "unfolded spectra and unfolding quality"},
    {"knls", "k-th neighbour spacing histograms against the surmise"},
    {"knsff", "Monte-Carlo and analytic knSFF curves"},
    {"sff", "full SFF, Monte-Carlo and analytic"},
    {"partial", "partial SFFs up to K neighbours"},
    {"timescales", "dip and Thouless times of partial SFFs"},
    {"evenodd", "even and odd neighbour sums"},
    {"kstar", "knSFF minima and the deepest neighbour"},
    {"selfavg", "relative variance of the knSFF"},
    {"xxz", "disordered XXZ chain pipeline"},
    {"toy", "independent-spacing toy model"},
    {"autocorr", "operator autocorrelation split by neighbour distance"},
};

bool is_extrema_command(const std::string& c) { return c == "knsff" || c == "kstar" || c == "knls" || c == "sample" || c == "unfold"; }

TimeGrid default_grid(const std::string& command) {
    if (command == "selfavg") return TimeGrid::linear(0.0, 24.0 * kPi, 2400);
    return is_extrema_command(command) ? TimeGrid::extrema_default() : TimeGrid::display_default();
}

std::string mode_name(KnsffMode m) {
    switch (m) {
        case KnsffMode::Exact: return "exact";
        case KnsffMode::Approx: return "approx";
        case KnsffMode::Auto: return "auto";
    }
    return "auto";
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct RawOptions {
    std::string ensemble;
    std::string grid_kind;
    std::optional<double> t_min, t_max;
    std::optional<int> points;
    std::string mode = "auto";
};

void validate(RunConfig& cfg, const RawOptions& raw) {
    const auto& c = cfg.command;
    if (!raw.ensemble.empty()) {
        cfg.ensemble = parse_ensemble(raw.ensemble);
        if (!cfg.ensemble) throw CLI::ValidationError("--ensemble", "unknown ensemble '" + raw.ensemble + "'");
    }
    if (raw.mode == "exact") cfg.mode = KnsffMode::Exact;
    else if (raw.mode == "approx") cfg.mode = KnsffMode::Approx;
    else if (raw.mode == "auto") cfg.mode = KnsffMode::Auto;
    else throw CLI::ValidationError("--mode", "must be exact, approx or auto");

    cfg.grid = default_grid(c);
    if (!raw.grid_kind.empty()) {
        if (raw.grid_kind == "linear") cfg.grid.kind = TimeGrid::Kind::Linear;
        else if (raw.grid_kind == "log") cfg.grid.kind = TimeGrid::Kind::Logarithmic;
        else throw CLI::ValidationError("--grid", "must be linear or log");
    }
    if (raw.t_min) cfg.grid.t_min = *raw.t_min;
    if (raw.t_max) cfg.grid.t_max = *raw.t_max;
    if (raw.points) {
        if (*raw.points < 2) throw CLI::ValidationError("--points", "must be >= 2");
        cfg.grid.n_points = static_cast<std::size_t>(*raw.points);
    }
    if (cfg.grid.kind == TimeGrid::Kind::Logarithmic && cfg.grid.t_min <= 0.0)
        throw CLI::ValidationError("--tmin", "logarithmic grids need tmin > 0");
    if (!(cfg.grid.t_max > cfg.grid.t_min)) throw CLI::ValidationError("--tmax", "must exceed tmin");

    if (c == "xxz") {
        const xxz::XxzParams p{*cfg.length, cfg.jz, cfg.disorder, !cfg.open_chain};
        if (*cfg.length % 2 != 0) throw CLI::ValidationError("--length", "L must be even");
        try {
            p.validate();
        } catch (const Error& e) {
            throw CLI::ValidationError("--length", e.what());
        }
        if (cfg.window < 10) throw CLI::ValidationError("--window", "must be >= 10");
        if (cfg.k_list.empty()) cfg.k_list = {1, 10, 30};
        for (int k : cfg.k_list)
            if (k < 1 || k >= cfg.window) throw CLI::ValidationError("--k", "k must be in [1, window-1]");
    } else {
        const int n = *cfg.dim;
        if (n < 2) throw CLI::ValidationError("--dim", "must be >= 2");
        if (c == "evenodd" && n < 3) throw CLI::ValidationError("--dim", "evenodd needs N >= 3");
        if (c == "kstar" && n < 10) throw CLI::ValidationError("--dim", "kstar needs N >= 10");
        if (cfg.k_list.empty()) cfg.k_list = {1};
        for (int k : cfg.k_list)
            if (k < 1 || k > n - 1) throw CLI::ValidationError("--k", "k must be in [1, N-1]");
        if (cfg.K && (*cfg.K < 0 || *cfg.K > n - 1)) throw CLI::ValidationError("--kmax", "K must be in [0, N-1]");
        const bool needs_gaussian = c == "timescales" || c == "toy";
        if (needs_gaussian && !is_gaussian(*cfg.ensemble))
            throw CLI::ValidationError("--ensemble", c + " needs a Gaussian ensemble");
        if (cfg.unfolding == "analytic" && !is_gaussian(*cfg.ensemble))
            throw CLI::ValidationError("--unfold", "analytic unfolding needs a Gaussian ensemble");
    }
    if (cfg.realizations < 1) throw CLI::ValidationError("--realizations", "must be >= 1");
    if (c == "selfavg" && cfg.realizations < 2) throw CLI::ValidationError("--realizations", "selfavg needs >= 2");
    if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw CLI::ValidationError("--epsilon", "must be > 0");
    if (cfg.eta < 1 || cfg.eta > 12) throw CLI::ValidationError("--eta", "must be in [1, 12]");
    if (cfg.bins < 2) throw CLI::ValidationError("--bins", "must be >= 2");
}

// ---- running -------------------------------------------------------------

std::vector<UnfoldedSpectrum> sample_unfolded(const RunConfig& cfg) {
    const SamplerConfig sc{*cfg.ensemble, *cfg.dim, cfg.realizations, cfg.seed};
    const auto samples = sample_ensemble(sc);
    UnfoldingMethod method;
    if (cfg.unfolding == "polynomial") method = UnfoldingMethod::polynomial(cfg.eta, cfg.bins);
    else if (cfg.unfolding == "identity") method = UnfoldingMethod::identity();
    else if (cfg.unfolding == "analytic") method = UnfoldingMethod::analytic();
    else method = is_gaussian(sc.kind) ? UnfoldingMethod::analytic() : UnfoldingMethod::identity();
    std::vector<UnfoldedSpectrum> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(unfold(s, method));
    return out;
}

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    return stem + "_" + buf + "." + ext;
}

void emit_curves(io::OutputSet& out, const RunConfig& cfg, const std::string& stem, const std::vector<Curve>& curves,
                 const std::vector<std::string>& names) {
    if (cfg.format == "json") {
        json j;
        std::vector<json> t;
        for (double x : curves.front().t) t.push_back(num(x));
        j["t"] = t;
        for (std::size_t i = 0; i < curves.size(); ++i) {
            std::vector<json> v;
            for (double x : curves[i].values) v.push_back(num(x));
            j[names[i]] = v;
        }
        out.write_json(stem + ".json", j);
    } else {
        out.write(stem + ".csv", io::curves_csv(curves, names));
    }
}

std::vector<std::string> k_names(const std::vector<int>& ks, const std::string& prefix = "S_k") {
    std::vector<std::string> out;
    for (int k : ks) out.push_back(prefix + std::to_string(k));
    return out;
}

json run_sample(const RunConfig& cfg, io::OutputSet& out) {
    const auto samples = sample_ensemble({*cfg.ensemble, *cfg.dim, cfg.realizations, cfg.seed});
    json seeds = json::array();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.write(indexed("levels", i, "csv"), io::levels_csv(samples[i].energies));
        seeds.push_back(samples[i].seed);
    }
    return {{"seeds", seeds}};
}

json run_unfold(const RunConfig& cfg, io::OutputSet& out) {
    const auto samples = sample_ensemble({*cfg.ensemble, *cfg.dim, cfg.realizations, cfg.seed});
    json derived;
    json quality = json::array();
    std::vector<double> qs;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        UnfoldingMethod method;
        if (cfg.unfolding == "polynomial") method = UnfoldingMethod::polynomial(cfg.eta, cfg.bins);
        else if (cfg.unfolding == "identity") method = UnfoldingMethod::identity();
        else if (cfg.unfolding == "analytic") method = UnfoldingMethod::analytic();
        else method = is_gaussian(*cfg.ensemble) ? UnfoldingMethod::analytic() : UnfoldingMethod::identity();
        const auto u = unfold(samples[i], method);
        out.write(indexed("unfolded", i, "csv"), io::levels_csv(u.energies));
        if (is_gaussian(*cfg.ensemble)) {
            const double q = unfold_quality(samples[i], dyson_beta(*cfg.ensemble), cfg.eta, cfg.bins);
            qs.push_back(q);
            quality.push_back(q);
        }
    }
    if (!qs.empty()) {
        std::sort(qs.begin(), qs.end());
        derived["quality"] = quality;
        derived["quality_median"] = qs[qs.size() / 2];
    }
    return derived;
}

json run_knls(const RunConfig& cfg, io::OutputSet& out) {
    const auto spectra = sample_unfolded(cfg);
    json derived = json::array();
    for (int k : cfg.k_list) {
        SpacingSeries pooled{k, {}};
        for (const auto& s : spectra) {
            const auto sp = extract_spacings(s, k);
            pooled.values.insert(pooled.values.end(), sp.values.begin(), sp.values.end());
        }
        const auto hist = empirical_hist(pooled, cfg.bins);
        out.write("knls_k" + std::to_string(k) + ".csv", io::histogram_csv(hist));
        std::string ref = "s,pdf\n";
        std::optional<SurmiseParams> p;
        if (is_gaussian(*cfg.ensemble)) p = surmise_params(k, dyson_beta(*cfg.ensemble));
        for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b) {
            const double s = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
            const double v = p ? surmise_pdf(*p, std::max(s, 0.0)) : poisson_knls_pdf(k, std::max(s, 0.0));
            ref += io::format_double(s) + ',' + io::format_double(v) + '\n';
        }
        out.write("reference_k" + std::to_string(k) + ".csv", ref);
        double mean = 0.0;
        for (double v : pooled.values) mean += v;
        derived.push_back({{"k", k}, {"mean_spacing", mean / static_cast<double>(pooled.values.size())}});
    }
    return {{"knls", derived}};
}

json run_knsff(const RunConfig& cfg, io::OutputSet& out) {
    const auto spectra = sample_unfolded(cfg);
    const int n = *cfg.dim;
    const auto numeric = knsff_numeric(spectra, cfg.k_list, cfg.grid);
    std::vector<Curve> analytic;
    for (int k : cfg.k_list) analytic.push_back(knsff_ensemble(*cfg.ensemble, k, n, cfg.grid, cfg.mode));
    const auto names = k_names(cfg.k_list);
    emit_curves(out, cfg, "knsff_numeric", numeric, names);
    emit_curves(out, cfg, "knsff_analytic", analytic, names);
    json per_k = json::array();
    for (std::size_t i = 0; i < cfg.k_list.size(); ++i) {
        const int k = cfg.k_list[i];
        json e{{"k", k}};
        try {
            e["t_min_analytic"] = min_time(k, *cfg.ensemble);
            e["min_value_analytic"] = min_value(k, *cfg.ensemble, n);
        } catch (const Error& err) {
            if (err.code() != ErrorCode::NoMinimum) throw;
            e["t_min_analytic"] = nullptr;
            e["min_value_analytic"] = nullptr;
        }
        try {
            const auto m = locate_minimum(numeric[i]);
            e["t_min_numeric"] = m.t;
            e["min_value_numeric"] = m.value;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::Boundary) throw;
            e["t_min_numeric"] = nullptr;
            e["min_value_numeric"] = nullptr;
        }
        double sup = 0.0;
        for (std::size_t j = 0; j < numeric[i].size(); ++j)
            sup = std::max(sup, std::abs(numeric[i].values[j] - analytic[i].values[j]));
        e["sup_distance"] = sup;
        e["prefactor"] = knsff_prefactor(k, n);
        per_k.push_back(e);
    }
    return {{"k_list", cfg.k_list}, {"knsff", per_k}};
}

json plateau_json(const Curve& c, int n) {
    if (c.grid.t_min > kTwoPi || c.grid.t_max < 2.0 * kTwoPi) return nullptr;
    return {{"window", {kTwoPi, 2.0 * kTwoPi}}, {"value", plateau_average(c, kTwoPi, kTwoPi)}, {"expected", 1.0 / n}};
}

json run_sff(const RunConfig& cfg, io::OutputSet& out) {
    const auto spectra = sample_unfolded(cfg);
    const int n = *cfg.dim;
    std::vector<Curve> curves{full_sff_numeric(spectra, cfg.grid)};
    std::vector<std::string> names{"numeric"};
    if (is_gaussian(*cfg.ensemble)) {
        curves.push_back(full_sff_analytic(dyson_beta(*cfg.ensemble), n, cfg.grid, cfg.mode));
        curves.push_back(connected_curve(connected_kind(*cfg.ensemble), n, cfg.grid));
        names.insert(names.end(), {"analytic", "connected"});
    } else {
        curves.push_back(full_sff_poisson(n, cfg.grid));
        names.push_back("analytic");
    }
    emit_curves(out, cfg, "sff", curves, names);
    double worst = 0.0;
    for (std::size_t j = 0; j < curves[0].size(); ++j)
        if (curves[0].values[j] > 0.0 && curves[1].values[j] > 0.0)
            worst = std::max(worst, std::abs(std::log10(curves[1].values[j] / curves[0].values[j])));
    return {{"plateau", plateau_json(curves[0], n)}, {"max_abs_log10_ratio", worst}};
}

json timescale_json(const PartialSffResult& r) {
    return {{"K", r.K},
            {"epsilon", r.epsilon},
            {"t_dip", opt_json(r.t_dip)},
            {"t_thouless", opt_json(r.t_thouless)},
            {"plateau_time", kTwoPi}};
}

json run_partial(const RunConfig& cfg, io::OutputSet& out) {
    const int n = *cfg.dim;
    const int K = cfg.K.value_or(n - 1);
    const auto spectra = sample_unfolded(cfg);
    std::vector<Curve> curves{partial_sff_analytic(*cfg.ensemble, n, K, cfg.grid, cfg.mode),
                              partial_sff_numeric(spectra, K, cfg.grid)};
    emit_curves(out, cfg, "partial", curves, {"analytic", "numeric"});
    json derived{{"K", K}};
    if (is_gaussian(*cfg.ensemble)) {
        const auto kind = connected_kind(*cfg.ensemble);
        derived["timescales_analytic"] = timescale_json(partial_timescales(curves[0], K, kind, n, cfg.effective_epsilon()));
        derived["timescales_numeric"] = timescale_json(partial_timescales(curves[1], K, kind, n, cfg.effective_epsilon()));
    }
    return derived;
}

json run_timescales(const RunConfig& cfg, io::OutputSet& out) {
    const int n = *cfg.dim;
    const int K = cfg.K.value_or(n - 1);
    const auto kind = connected_kind(*cfg.ensemble);
    const auto partial = partial_sff_analytic(*cfg.ensemble, n, K, cfg.grid, cfg.mode);
    const auto delta = delta_sff(partial, kind, n);
    const auto r = partial_timescales(partial, K, kind, n, cfg.effective_epsilon());
    emit_curves(out, cfg, "timescales_curves", {partial, connected_curve(kind, n, cfg.grid), delta},
                {"partial", "connected", "delta"});
    const auto report = timescale_json(r);
    out.write_json("timescales.json", report);
    return report;
}

json run_evenodd(const RunConfig& cfg, io::OutputSet& out) {
    const int n = *cfg.dim;
    const auto a = even_odd_sums_analytic(*cfg.ensemble, n, cfg.grid, cfg.mode);
    std::vector<Curve> curves{a.even, a.odd};
    std::vector<std::string> names{"even_analytic", "odd_analytic"};
    if (cfg.realizations_given) {
        const auto spectra = sample_unfolded(cfg);
        const auto m = even_odd_sums_numeric(spectra, cfg.grid);
        curves.insert(curves.end(), {m.even, m.odd});
        names.insert(names.end(), {"even_numeric", "odd_numeric"});
    }
    emit_curves(out, cfg, "evenodd", curves, names);
    return json::object();
}

json run_kstar(const RunConfig& cfg, io::OutputSet& out) {
    const int n = *cfg.dim;
    const auto kind = *cfg.ensemble;
    json derived{{"k_star", deepest_k(kind, n, KStarMethod::AnalyticExpansion)},
                 {"k_star_methods",
                  {{"analytic_expansion", deepest_k(kind, n, KStarMethod::AnalyticExpansion)},
                   {"analytic_expansion_unrounded", kstar_expansion(kind, n)},
                   {"cubic_root", deepest_k(kind, n, KStarMethod::CubicRoot)},
                   {"cubic_root_unrounded", kstar_cubic(kind, n)},
                   {"numeric_argmin", deepest_k(kind, n, KStarMethod::NumericArgmin)}}}};
    if (cfg.realizations_given) {
        const auto spectra = sample_unfolded(cfg);
        const auto minima = knsff_minima(spectra, n - 1);
        std::string csv = "k,t_min,value,interior\n";
        for (const auto& m : minima)
            csv += std::to_string(m.k) + ',' + io::format_double(m.t) + ',' + io::format_double(m.value) + ',' +
                   (m.interior ? "1" : "0") + '\n';
        out.write("minima.csv", csv);
        derived["k_star_methods"]["monte_carlo"] = deepest_k_numeric(minima);
    }
    return derived;
}

json run_selfavg(const RunConfig& cfg, io::OutputSet& out) {
    const auto spectra = sample_unfolded(cfg);
    const int n = *cfg.dim;
    std::vector<Curve> curves;
    json summary = json::array();
    const bool covers = cfg.grid.t_min <= kPlateauStart && cfg.grid.t_max >= kPlateauStart + kPlateauWindow;
    for (int k : cfg.k_list) {
        curves.push_back(knsff_relative_variance(spectra, k, cfg.grid));
        summary.push_back({{"k", k},
                           {"plateau_avg", covers ? num(plateau_average(curves.back(), kPlateauStart, kPlateauWindow))
                                                  : json(nullptr)},
                           {"formula_value", relvar_plateau_formula(k, n)}});
    }
    emit_curves(out, cfg, "relvar", curves, k_names(cfg.k_list, "R_k"));
    out.write_json("summary.json", summary);
    return {{"selfavg", summary}, {"plateau_window", {kPlateauStart, kPlateauStart + kPlateauWindow}}};
}

json run_xxz(const RunConfig& cfg, io::OutputSet& out) {
    xxz::PipelineConfig pc;
    pc.params = {*cfg.length, cfg.jz, cfg.disorder, !cfg.open_chain};
    pc.n_window = cfg.window;
    pc.realizations = cfg.realizations;
    pc.master_seed = cfg.seed;
    pc.grid = cfg.grid;
    pc.k_list = cfg.k_list;
    pc.epsilon = cfg.effective_epsilon();
    pc.eta = cfg.eta;
    const auto r = xxz::disorder_pipeline(pc);
    emit_curves(out, cfg, "knsff", r.knsff, k_names(cfg.k_list));
    emit_curves(out, cfg, "sff", {r.full_sff}, {"numeric"});
    std::string csv = "k,t_min,value,interior\n";
    for (const auto& m : r.minima)
        csv += std::to_string(m.k) + ',' + io::format_double(m.t) + ',' + io::format_double(m.value) + ',' +
               (m.interior ? "1" : "0") + '\n';
    out.write("minima.csv", csv);
    return {{"r_mean", r.r.mean},
            {"r_used", r.r.used},
            {"r_excluded", r.r.excluded},
            {"k_star", r.k_star ? json(*r.k_star) : json(nullptr)},
            {"t_dip", opt_json(r.t_dip)},
            {"t_thouless", opt_json(r.t_thouless)},
            {"epsilon", pc.epsilon},
            {"fit_window", cfg.window + 2 * pc.edge_discard},
            {"edge_discard", pc.edge_discard},
            {"reordered_unfoldings", r.reordered}};
}

json run_toy(const RunConfig& cfg, io::OutputSet& out) {
    const int n = *cfg.dim;
    const int beta = dyson_beta(*cfg.ensemble);
    const auto kind = connected_kind(*cfg.ensemble);
    const auto toy = toy_sff(beta, n, cfg.grid);
    const auto full = full_sff_analytic(beta, n, cfg.grid, cfg.mode);
    emit_curves(out, cfg, "toy", {toy, full, connected_curve(kind, n, cfg.grid)}, {"toy", "analytic", "connected"});
    return json::object();
}

Eigen::MatrixXcd make_operator(const std::string& name, int n) {
    if (name == "identity") return Eigen::MatrixXcd::Identity(n, n);
    if (name == "offdiag") {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = 1.0;
        return m;
    }
    if (name == "dense") return Eigen::MatrixXcd::Ones(n, n);
    fail(ErrorCode::Precondition, "unknown operator '" + name + "'");
}

json run_autocorr(const RunConfig& cfg, io::OutputSet& out) {
    const int n = *cfg.dim;
    const auto op = make_operator(cfg.op, n);
    const auto spectra = sample_unfolded(cfg);
    const auto ens = autocorr_decompose(op, *cfg.ensemble, cfg.grid, cfg.mode);
    const auto spec = autocorr_decompose(op, spectra, cfg.grid);
    emit_curves(out, cfg, "autocorr", {ens.total, spec.total}, {"ensemble", "spectrum"});
    return {{"operator", cfg.op}, {"diag_term", ens.diag_term}, {"coefficients", ens.coefficients}};
}

json dispatch(const RunConfig& cfg, io::OutputSet& out) {
    const auto& c = cfg.command;
    if (c == "sample") return run_sample(cfg, out);
    if (c == "unfold") return run_unfold(cfg, out);
    if (c == "knls") return run_knls(cfg, out);
    if (c == "knsff") return run_knsff(cfg, out);
    if (c == "sff") return run_sff(cfg, out);
    if (c == "partial") return run_partial(cfg, out);
    if (c == "timescales") return run_timescales(cfg, out);
    if (c == "evenodd") return run_evenodd(cfg, out);
    if (c == "kstar") return run_kstar(cfg, out);
    if (c == "selfavg") return run_selfavg(cfg, out);
    if (c == "xxz") return run_xxz(cfg, out);
    if (c == "toy") return run_toy(cfg, out);
    if (c == "autocorr") return run_autocorr(cfg, out);
    fail(ErrorCode::Precondition, "unknown command " + c);
}

}  // namespace

double RunConfig::effective_epsilon() const {
    if (epsilon) return *epsilon;
    if (command == "xxz") return 0.2;
    if (ensemble == EnsembleKind::GSE) return 0.25;
    return 0.1;
}

json RunConfig::to_json() const {
    json j{{"command", command},
           {"realizations", realizations},
           {"k_list", k_list},
           {"grid",
            {{"kind", grid.kind == TimeGrid::Kind::Linear ? "linear" : "log"},
             {"t_min", grid.t_min},
             {"t_max", grid.t_max},
             {"n_points", grid.n_points}}},
           {"epsilon", effective_epsilon()},
           {"seed", seed},
           {"format", format},
           {"mode", mode_name(mode)},
           {"unfolding", unfolding},
           {"eta", eta},
           {"bins", bins}};
    j["ensemble"] = ensemble ? json(std::string(to_string(*ensemble))) : json(nullptr);
    j["dim"] = dim ? json(*dim) : json(nullptr);
    j["K"] = K ? json(*K) : json(nullptr);
    if (command == "xxz")
        j["xxz"] = {{"length", *length}, {"jz", jz}, {"disorder", disorder}, {"window", window}, {"periodic", !open_chain}};
    if (command == "autocorr") j["operator"] = op;
    return j;
}

ParseOutcome parse_args(const std::vector<std::string>& args) {
    CLI::App app{"k-th neighbour spectral form factor toolkit", "sfflab"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    RawOptions raw;
    std::optional<int> dim, length, kmax;
    int realizations = 100;

    for (const auto& [name, description] : kCommands) {
        auto* sub = app.add_subcommand(name, description);
        sub->fallthrough(false);
        const bool is_xxz = name == "xxz";
        if (!is_xxz) {
            sub->add_option("--ensemble", raw.ensemble, "poisson, goe, gue or gse")->required();
            sub->add_option("--dim", dim, "matrix dimension N")->required();
        } else {
            sub->add_option("--length", length, "chain length L (even)")->required();
            sub->add_option("--jz", cfg.jz, "anisotropy Jz");
            sub->add_option("--disorder", cfg.disorder, "disorder width W");
            sub->add_option("--window", cfg.window, "levels kept per realization");
            sub->add_flag("--open", cfg.open_chain, "open boundary conditions");
        }
        sub->add_option("--realizations", realizations, "ensemble size");
        sub->add_option("--k", cfg.k_list, "neighbour orders, comma separated")->delimiter(',');
        if (name == "partial" || name == "timescales") sub->add_option("--kmax", kmax, "neighbour cutoff K");
        sub->add_option("--grid", raw.grid_kind, "linear or log");
        sub->add_option("--tmin", raw.t_min);
        sub->add_option("--tmax", raw.t_max);
        sub->add_option("--points", raw.points);
        sub->add_option("--epsilon", cfg.epsilon, "Thouless-time tolerance");
        sub->add_option("--seed", cfg.seed, "master seed");
        sub->add_option("--out", cfg.output_dir, "output directory");
        sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--mode", raw.mode, "exact, approx or auto");
        sub->add_option("--unfold", cfg.unfolding, "auto, analytic, polynomial or identity")
                        ->check(CLI::IsMember({"auto", "analytic", "polynomial", "identity"}));
        sub->add_option("--eta", cfg.eta, "polynomial unfolding degree");
        sub->add_option("--bins", cfg.bins, "histogram bins");
        sub->add_flag("--timing", cfg.record_timing, "record wall-clock seconds in the manifest");
        if (name == "autocorr")
            sub->add_option("--operator", cfg.op, "identity, offdiag or dense")
                ->check(CLI::IsMember({"identity", "offdiag", "dense"}));
    }

    ParseOutcome outcome;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        auto* sub = app.get_subcommands().front();
        cfg.command = sub->get_name();
        cfg.realizations = realizations;
        cfg.realizations_given = sub->count("--realizations") > 0;
        if (sub->count("--eta") > 0 && cfg.unfolding == "auto") cfg.unfolding = "polynomial";
        if (sub->count("--eta") > 0 && cfg.unfolding != "polynomial")
            throw CLI::ValidationError("--eta", "only applies to polynomial unfolding");
        cfg.dim = dim;
        cfg.length = length;
        cfg.K = kmax;
        validate(cfg, raw);
        outcome.config = cfg;
    } catch (const CLI::Success& e) {
        std::ostringstream os, es;
        outcome.exit_code = app.exit(e, os, es);
        outcome.message = os.str() + es.str();
    } catch (const CLI::Error& e) {
        std::ostringstream os, es;
        app.exit(e, os, es);
        outcome.exit_code = kExitUsage;
        outcome.message = es.str().empty() ? std::string(e.what()) + "\n" : es.str();
    }
    return outcome;
}

int run(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    try {
        io::OutputSet out(cfg.output_dir);
        json derived = dispatch(cfg, out);
        json manifest{{"tool", "sfflab"}, {"version", kVersion}, {"config", cfg.to_json()}, {"derived", derived}};
        if (cfg.record_timing)
            manifest["wall_clock_seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.write_manifest(manifest);
    } catch (const Error& e) {
        std::cerr << "sfflab " << cfg.command << ": " << to_string(e.code()) << " error: " << e.what() << '\n';
        return e.code() == ErrorCode::Precondition ? kExitUsage : kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "sfflab " << cfg.command << ": " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const auto parsed = parse_args(args);
    if (!parsed.config) {
        (parsed.exit_code == kExitOk ? std::cout : std::cerr) << parsed.message;
        return parsed.exit_code;
    }
    return run(*parsed.config);
}

}  // namespace sfflab::cli
