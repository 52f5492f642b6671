#include "selfaffine/run.hpp"

#include "selfaffine/closed_forms.hpp"
#include "selfaffine/covering.hpp"
#include "selfaffine/errors.hpp"
#include "selfaffine/grid_moments.hpp"
#include "selfaffine/lyapunov.hpp"
#include "selfaffine/pressure.hpp"
#include "selfaffine/rng.hpp"
#include "selfaffine/sampling.hpp"
#include "selfaffine/spectrum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace selfaffine {

using nlohmann::json;

namespace {

constexpr const char* kToolName = "safm";
constexpr const char* kToolVersion = "0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

class CsvFile {
public:
    CsvFile(const std::string& path, const std::vector<std::string>& header,
            const std::vector<std::string>& comments = {})
        : out_(path) {
        if (!out_) throw ValidationError("cannot open output file '" + path + "'");
        for (const auto& c : comments) out_ << "# " << c << "\n";
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

private:
    std::ofstream out_;
};

void write_meta(const std::string& path, json meta) {
    meta["tool"] = kToolName;
    meta["version"] = kToolVersion;
    meta["rng"] = Philox::kName;
    meta["timestamp"] = iso_now();
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file '" + path + "'");
    out << meta.dump(2) << "\n";
}

double get_num(const json& p, const std::string& key, double dflt) {
    if (!p.contains(key)) return dflt;
    if (!p[key].is_number()) throw ValidationError("param '" + key + "' must be a number");
    return p[key].get<double>();
}

std::uint64_t get_u64(const json& p, const std::string& key, std::uint64_t dflt) {
    double v = get_num(p, key, static_cast<double>(dflt));
    if (v < 0) throw ValidationError("param '" + key + "' must be non-negative");
    return static_cast<std::uint64_t>(v);
}

bool get_bool(const json& p, const std::string& key, bool dflt) {
    if (!p.contains(key)) return dflt;
    if (!p[key].is_boolean()) throw ValidationError("param '" + key + "' must be a boolean");
    return p[key].get<bool>();
}

std::string get_str(const json& p, const std::string& key, const std::string& dflt) {
    if (!p.contains(key)) return dflt;
    if (!p[key].is_string()) throw ValidationError("param '" + key + "' must be a string");
    return p[key].get<std::string>();
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 2 || !(b > a)) throw ValidationError("grid: bad range");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

std::vector<double> get_grid(const json& p, const std::string& key, std::vector<double> dflt) {
    if (!p.contains(key)) return dflt;
    const json& g = p[key];
    if (g.is_array()) {
        std::vector<double> v;
        for (const auto& x : g) v.push_back(x.get<double>());
        if (v.empty()) throw ValidationError("param '" + key + "': empty grid");
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1]))
                throw ValidationError("param '" + key + "': grid must be strictly increasing");
        return v;
    }
    if (g.is_object())
        return linspace(g.at("from").get<double>(), g.at("to").get<double>(),
                        g.at("count").get<int>());
    throw ValidationError("param '" + key + "': expected an array or {from, to, count}");
}

std::vector<double> get_radii(const json& p, int hi_dflt, int lo_dflt) {
    if (p.contains("radii")) {
        const json& g = p["radii"];
        if (!g.is_array()) throw ValidationError("param 'radii' must be an array");
        std::vector<double> v;
        for (const auto& x : g) v.push_back(x.get<double>());
        if (v.size() < 2) throw ValidationError("param 'radii': need at least two radii");
        return v;
    }
    int hi = static_cast<int>(get_num(p, "r_hi_exp", hi_dflt));
    int lo = static_cast<int>(get_num(p, "r_lo_exp", lo_dflt));
    if (lo >= hi) throw ValidationError("radii: r_lo_exp must be below r_hi_exp");
    std::vector<double> v;
    for (int e = hi; e >= lo; --e) v.push_back(std::ldexp(1.0, e));
    return v;
}

SolveOptions solve_options(const json& p) {
    SolveOptions opt;
    opt.tol_exact = get_num(p, "tol", opt.tol_exact);
    opt.tol_finite = get_num(p, "tol_finite", opt.tol_finite);
    opt.solve_budget =
        static_cast<std::size_t>(get_num(p, "solve_budget", static_cast<double>(opt.solve_budget)));
    opt.moment_budget =
        static_cast<std::size_t>(get_num(p, "budget", static_cast<double>(opt.moment_budget)));
    opt.q_guard = get_num(p, "q_guard", opt.q_guard);
    return opt;
}

json spectrum_meta(const RunConfig& cfg, const SpectrumTable& table, const SolveOptions& opt) {
    json meta;
    meta["task"] = cfg.task;
    meta["spec_hash"] = cfg.spec.hash_hex();
    meta["tolerances"] = {{"exact", opt.tol_exact}, {"finite", opt.tol_finite}};
    meta["budgets"] = {{"solve", opt.solve_budget}, {"moment", opt.moment_budget}};
    meta["q_guard"] = opt.q_guard;
    int exact = 0, finite = 0, guarded = 0;
    for (const auto& pt : table.points) {
        if (pt.method == PointMethod::ExactRoot) ++exact;
        if (pt.method == PointMethod::FiniteLevel) ++finite;
        if (pt.method == PointMethod::GuardInterpolated) ++guarded;
    }
    meta["points"] = {{"exact", exact}, {"finite", finite}, {"guard-interpolated", guarded}};
    meta["flags"] = {{"diagonal_ordered", cfg.spec.diagonal_ordered},
                     {"similitude", cfg.spec.similitude},
                     {"strict_half", cfg.spec.strict_half},
                     {"exact_pressure", cfg.spec.exact_pressure}};
    return meta;
}

std::string outpath(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void emit(RunResult& res, const std::string& path) { res.outputs.push_back(path); }

RunResult run_dq(const RunConfig& cfg) {
    SolveOptions opt = solve_options(cfg.params);
    auto grid = get_grid(cfg.params, "q_grid", linspace(0.25, 3.0, 45));
    SpectrumOptions sopt;
    sopt.solve = opt;
    sopt.derivatives = false;
    auto table = solve_spectrum(cfg.spec, grid, sopt);

    RunResult res;
    std::string csv = outpath(cfg, "dq.csv");
    CsvFile out(csv, {"q", "D", "sigma", "method", "knot", "heuristic", "drift"});
    for (const auto& pt : table.points)
        out.row({fmt(pt.q), fmt(pt.D), fmt(pt.sigma), to_string(pt.method), pt.knot ? "1" : "0",
                 pt.heuristic ? "1" : "0", fmt(pt.drift)});
    emit(res, csv);

    std::string meta_path = outpath(cfg, "dq.meta");
    write_meta(meta_path, spectrum_meta(cfg, table, opt));
    emit(res, meta_path);
    return res;
}

RunResult run_tau(const RunConfig& cfg) {
    SolveOptions opt = solve_options(cfg.params);
    auto grid = get_grid(cfg.params, "q_grid", linspace(0.25, 3.0, 45));
    SpectrumOptions sopt;
    sopt.solve = opt;
    sopt.derivatives = false;
    auto table = solve_spectrum(cfg.spec, grid, sopt);

    RunResult res;
    std::string csv = outpath(cfg, "tau.csv");
    CsvFile out(csv, {"q", "D", "tau", "method"});
    for (const auto& pt : table.points)
        out.row({fmt(pt.q), fmt(pt.D), fmt(pt.tau), to_string(pt.method)});
    emit(res, csv);

    std::string meta_path = outpath(cfg, "tau.meta");
    write_meta(meta_path, spectrum_meta(cfg, table, opt));
    emit(res, meta_path);
    return res;
}

RunResult run_spectrum_task(const RunConfig& cfg) {
    SolveOptions opt = solve_options(cfg.params);
    auto grid = get_grid(cfg.params, "q_grid", linspace(0.25, 3.0, 45));
    SpectrumOptions sopt;
    sopt.solve = opt;
    sopt.derivatives = true;
    sopt.fd_step = get_num(cfg.params, "fd_step", sopt.fd_step);
    auto table = solve_spectrum(cfg.spec, grid, sopt);

    RunResult res;
    std::string csv = outpath(cfg, "spectrum.csv");
    CsvFile out(csv, {"q", "D", "tau", "d_prime", "alpha", "f_alpha", "method", "knot"});
    for (const auto& pt : table.points) {
        double f = pt.d_prime * pt.q - pt.tau;
        out.row({fmt(pt.q), fmt(pt.D), fmt(pt.tau), fmt(pt.d_prime), fmt(pt.d_prime), fmt(f),
                 to_string(pt.method), pt.knot ? "1" : "0"});
    }
    emit(res, csv);

    std::string meta_path = outpath(cfg, "spectrum.meta");
    json meta = spectrum_meta(cfg, table, opt);
    meta["fd_step"] = sopt.fd_step;
    meta["columns"] = "alpha/f_alpha give the level-set curve parametrized by q";
    write_meta(meta_path, meta);
    emit(res, meta_path);
    return res;
}

RunResult run_lyapunov(const RunConfig& cfg) {
    BernoulliMeasure eta = uniform_bernoulli(cfg.spec.map_count());
    if (cfg.params.contains("eta")) {
        std::vector<double> w;
        for (const auto& x : cfg.params["eta"]) w.push_back(x.get<double>());
        eta = make_bernoulli(std::move(w));
    }
    std::string method = get_str(cfg.params, "method", cfg.spec.diagonal ? "exact" : "monte-carlo");

    LyapunovData data;
    json meta;
    if (method == "exact") {
        data = lyapunov_exponents_exact(cfg.spec, eta);
    } else if (method == "monte-carlo") {
        MonteCarloOptions mopt;
        mopt.word_length = static_cast<int>(get_num(cfg.params, "word_length", 400));
        mopt.trials = static_cast<int>(get_num(cfg.params, "trials", 10'000));
        mopt.seed = get_u64(cfg.params, "seed", 0);
        mopt.budget = get_u64(cfg.params, "mc_budget", mopt.budget);
        data = lyapunov_exponents_mc(cfg.spec, eta, mopt);
        meta["word_length"] = mopt.word_length;
        meta["trials"] = mopt.trials;
        meta["seed"] = mopt.seed;
    } else {
        throw ValidationError("lyapunov: method must be 'exact' or 'monte-carlo'");
    }
    double dim_ly = lyapunov_dimension(data);

    RunResult res;
    std::string csv = outpath(cfg, "lyapunov.csv");
    CsvFile out(csv, {"quantity", "value", "se"});
    for (std::size_t i = 0; i < data.lambdas.size(); ++i)
        out.row({"lambda_" + std::to_string(i + 1), fmt(data.lambdas[i]),
                 data.exact ? "0" : fmt(data.stderrs[i])});
    out.row({"entropy", fmt(data.entropy), "0"});
    out.row({"dim_ly", fmt(dim_ly), "0"});
    emit(res, csv);

    meta["task"] = cfg.task;
    meta["spec_hash"] = cfg.spec.hash_hex();
    meta["method"] = data.exact ? "exact-diagonal" : "monte-carlo";
    meta["eta"] = eta.weights;
    std::string meta_path = outpath(cfg, "lyapunov.meta");
    write_meta(meta_path, meta);
    emit(res, meta_path);
    return res;
}

RunResult run_closed_form(const RunConfig& cfg) {
    auto grid = get_grid(cfg.params, "q_grid", linspace(0.1, 3.0, 59));
    bool want_rosc = get_bool(cfg.params, "rosc", false);
    if (want_rosc && cfg.spec.dim != 2)
        throw ValidationError("closed-form: the rosc column needs a planar spec");

    std::vector<double> t(cfg.spec.dim);
    for (int j = 0; j < cfg.spec.dim; ++j) t[j] = cfg.spec.maps[0].at(j, j);

    RunResult res;
    std::string csv = outpath(cfg, "closed-form.csv");
    std::vector<std::string> header{"q", "tau", "D", "regime", "A"};
    if (want_rosc) header.push_back("tau_rosc");
    CsvFile out(csv, header);
    for (double q : grid) {
        std::vector<std::string> row;
        if (q == 1.0) {
            row = {fmt(1.0), fmt(0.0), fmt(0.0), "-1", ""};
        } else {
            auto v = equal_maps_closed_form(cfg.spec, q);
            row = {fmt(q), fmt(v.tau), fmt(v.D), std::to_string(v.regime), fmt(v.A)};
        }
        if (want_rosc) {
            try {
                row.push_back(fmt(rosc_planar_tau(t[0], t[1], cfg.spec.probabilities, q)));
            } catch (const ValidationError&) {
                row.push_back("");
            }
        }
        out.row(row);
    }
    emit(res, csv);

    json meta;
    meta["task"] = cfg.task;
    meta["spec_hash"] = cfg.spec.hash_hex();
    meta["ratios"] = t;
    json jumps = json::array();
    for (int k = 1; k <= cfg.spec.dim - 1; ++k) {
        try {
            auto jp = slope_jump_at_crossing(t, cfg.spec.probabilities, k);
            jumps.push_back({{"k", k}, {"q_cross", jp.q_cross}, {"jump", jp.jump}});
        } catch (const ConvergenceError& e) {
            jumps.push_back({{"k", k}, {"notice", e.what()}});
        }
    }
    meta["branch_crossings"] = jumps;
    std::string meta_path = outpath(cfg, "closed-form.meta");
    write_meta(meta_path, meta);
    emit(res, meta_path);
    return res;
}

RunResult run_regimes(const RunConfig& cfg) {
    SolveOptions opt = solve_options(cfg.params);
    auto rep = regime_report(cfg.spec, opt);

    RunResult res;
    std::string csv = outpath(cfg, "regimes.csv");
    CsvFile out(csv, {"q_lo", "q_hi", "kind", "slope"});
    for (const auto& b : rep.branches) {
        const char* kind = b.kind == 0 ? "lebesgue" : (b.kind == 1 ? "tangent" : "D");
        out.row({fmt(b.q_lo), fmt(b.q_hi), kind, fmt(b.slope)});
    }
    emit(res, csv);

    json meta;
    meta["task"] = cfg.task;
    meta["spec_hash"] = cfg.spec.hash_hex();
    meta["clause"] = rep.clause;
    meta["lebesgue_like"] = rep.lebesgue_like;
    meta["D_prime_1"] = rep.D_prime_1;
    meta["s_inf"] = rep.s_inf;
    meta["q_max"] = rep.q_max;
    if (std::isfinite(rep.q_min)) meta["q_min"] = rep.q_min;
    if (std::isfinite(rep.q_tilde_min)) meta["q_tilde_min"] = rep.q_tilde_min;
    meta["validity_interval"] = {{"lo", rep.interval_lo},
                                 {"hi", rep.interval_hi},
                                 {"nonempty", rep.interval_nonempty}};
    meta["alpha_range"] = {{"lo", rep.alpha_lo}, {"hi", rep.alpha_hi}};
    std::string meta_path = outpath(cfg, "regimes.meta");
    write_meta(meta_path, meta);
    emit(res, meta_path);
    return res;
}

RunResult run_sample(const RunConfig& cfg) {
    ChaosGameOptions opt;
    opt.count = static_cast<std::size_t>(get_num(cfg.params, "n", 1e6));
    opt.burn_in = static_cast<std::size_t>(get_num(cfg.params, "burn_in", 1e3));
    opt.seed = get_u64(cfg.params, "seed", 0);
    opt.budget = static_cast<std::size_t>(get_num(cfg.params, "sample_budget",
                                                  static_cast<double>(opt.budget)));
    auto sample = chaos_game(cfg.spec, opt);

    RunResult res;
    std::string csv = outpath(cfg, "sample.csv");
    std::ostringstream head;
    head << "spec_hash=" << cfg.spec.hash_hex() << " seed=" << opt.seed << " n=" << opt.count
         << " burn_in=" << opt.burn_in << " rng=" << Philox::kName
         << " bounding_radius=" << fmt(sample.bounding_radius);
    std::vector<std::string> header;
    for (int j = 0; j < cfg.spec.dim; ++j) header.push_back("x" + std::to_string(j + 1));
    CsvFile out(csv, header, {head.str()});
    std::vector<std::string> row(cfg.spec.dim);
    for (std::size_t i = 0; i < sample.count; ++i) {
        for (int j = 0; j < cfg.spec.dim; ++j) row[j] = fmt(sample.point(i)[j]);
        out.row(row);
    }
    emit(res, csv);

    json meta;
    meta["task"] = cfg.task;
    meta["spec_hash"] = cfg.spec.hash_hex();
    meta["seed"] = opt.seed;
    meta["n"] = opt.count;
    meta["burn_in"] = opt.burn_in;
    meta["bounding_radius"] = sample.bounding_radius;
    std::string meta_path = outpath(cfg, "sample.meta");
    write_meta(meta_path, meta);
    emit(res, meta_path);
    return res;
}

RunResult run_empirical_tau(const RunConfig& cfg) {
    int n_seeds = static_cast<int>(get_num(cfg.params, "seeds", 1));
    if (n_seeds < 1) throw ValidationError("empirical-tau: seeds must be >= 1");
    std::uint64_t base_seed = get_u64(cfg.params, "seed", 0);
    double rho = get_num(cfg.params, "rho", 1.0);
    auto radii = get_radii(cfg.params, -3, -9);
    auto qs = get_grid(cfg.params, "qs", {0.5, 1.25, 1.5, 2.0});

    ChaosGameOptions copt;
    copt.count = static_cast<std::size_t>(get_num(cfg.params, "n", 1e6));
    copt.burn_in = static_cast<std::size_t>(get_num(cfg.params, "burn_in", 1e3));
    GridOptions gopt;
    gopt.origin_shifts = static_cast<int>(get_num(cfg.params, "origin_shifts", 4));
    gopt.min_points_per_cell = get_num(cfg.params, "min_points_per_cell", 20.0);
    double curvature_threshold = get_num(cfg.params, "curvature_threshold", 0.05);

    RunResult res;
    std::vector<std::vector<TauFit>> fits(qs.size());
    json seeds_meta = json::array();

    for (int s = 0; s < n_seeds; ++s) {
        std::uint64_t seed = base_seed + static_cast<std::uint64_t>(s);
        IFSSpec spec = cfg.spec;
        if (!spec.has_translations()) {
            auto tr = random_translations(spec.map_count(), spec.dim, rho, seed);
            spec = make_ifs(spec.dim, spec.maps, std::move(tr), spec.probabilities);
        }
        copt.seed = seed;
        auto sample = chaos_game(spec, copt);
        auto moments = grid_moments(sample, radii, qs, gopt);

        std::string mcsv = outpath(cfg, "empirical-tau_moments_seed" + std::to_string(s) + ".csv");
        CsvFile mout(mcsv, {"r", "q", "log_moment", "cells_occupied"});
        for (const auto& row : moments.rows)
            mout.row({fmt(row.r), fmt(row.q), fmt(row.log_moment), fmt(row.cells_occupied)});
        emit(res, mcsv);

        std::string scsv = outpath(cfg, "empirical-tau_seed" + std::to_string(s) + ".csv");
        CsvFile sout(scsv, {"q", "slope", "se", "curvature", "curved", "radii_used"});
        for (std::size_t k = 0; k < qs.size(); ++k) {
            auto fit = empirical_tau(moments, qs[k], curvature_threshold);
            fits[k].push_back(fit);
            sout.row({fmt(qs[k]), fmt(fit.slope), fmt(fit.se), fmt(fit.curvature),
                      fit.curved ? "1" : "0", std::to_string(fit.radii_used)});
        }
        emit(res, scsv);

        json sm;
        sm["seed"] = seed;
        sm["spec_hash"] = spec.hash_hex();
        sm["excluded_radii"] = moments.excluded_radii;
        seeds_meta.push_back(sm);
    }

    std::string csv = outpath(cfg, "empirical-tau.csv");
    CsvFile out(csv, {"q", "mean", "stddev", "n_seeds"});
    for (std::size_t k = 0; k < qs.size(); ++k) {
        double mean = 0.0;
        for (const auto& f : fits[k]) mean += f.slope;
        mean /= fits[k].size();
        double var = 0.0;
        for (const auto& f : fits[k]) var += (f.slope - mean) * (f.slope - mean);
        double sd = fits[k].size() > 1 ? std::sqrt(var / (fits[k].size() - 1)) : 0.0;
        out.row({fmt(qs[k]), fmt(mean), fmt(sd), std::to_string(fits[k].size())});
    }
    emit(res, csv);

    json meta;
    meta["task"] = cfg.task;
    meta["spec_hash"] = cfg.spec.hash_hex();
    meta["seeds"] = seeds_meta;
    meta["n"] = copt.count;
    meta["burn_in"] = copt.burn_in;
    meta["rho"] = rho;
    meta["origin_shifts"] = gopt.origin_shifts;
    meta["min_points_per_cell"] = gopt.min_points_per_cell;
    meta["method"] = "grid-moment regression (estimated)";
    std::string meta_path = outpath(cfg, "empirical-tau.meta");
    write_meta(meta_path, meta);
    emit(res, meta_path);
    return res;
}

RunResult run_verify(const RunConfig& cfg) {
    SolveOptions opt = solve_options(cfg.params);
    auto grid = get_grid(cfg.params, "q_grid", linspace(0.1, 3.0, 59));
    double audit_tol = get_num(cfg.params, "audit_tol", 1e-8);

    SpectrumOptions sopt;
    sopt.solve = opt;
    sopt.derivatives = true;
    auto table = solve_spectrum(cfg.spec, grid, sopt);

    RunResult res;
    auto report = concavity_audit(table, audit_tol);
    if (!report.pass(audit_tol)) {
        std::ostringstream msg;
        msg << "concavity audit failed: worst D second difference ";
        double worst = 0.0;
        for (const auto& iv : report.intervals)
            worst = std::max(worst, iv.worst_second_difference);
        msg << worst << ", tau second difference " << report.tau_worst_second_difference
            << ", sigma increase " << report.sigma_worst_increase;
        res.failures.push_back(msg.str());
    }

    // root certificates on a subsample of the grid
    for (std::size_t i = 0; i < table.points.size(); i += 7) {
        const auto& pt = table.points[i];
        if (pt.method != PointMethod::ExactRoot && pt.method != PointMethod::FiniteLevel)
            continue;
        auto root = solve_D(cfg.spec, pt.q, opt);
        double tol = root.method == RootMethod::Exact ? opt.tol_exact : opt.tol_finite;
        if (std::abs(root.pressure_at_root) > tol) {
            std::ostringstream msg;
            msg << "root certificate failed at q = " << pt.q << ": |pressure| = "
                << std::abs(root.pressure_at_root) << " > " << tol;
            res.failures.push_back(msg.str());
        }
    }

    // derivative cross-checks where the formula applies
    if (cfg.spec.diagonal_ordered) {
        int checked = 0;
        for (const auto& pt : table.points) {
            if (checked >= 5) break;
            if (pt.method != PointMethod::ExactRoot) continue;
            if (pt.q <= 0.1 + 1e-9 || std::abs(pt.q - 1.0) < 0.05) continue;
            double sigma = pt.sigma;
            if (sigma <= 0.05 || sigma >= cfg.spec.dim - 0.05 ||
                std::abs(sigma - std::round(sigma)) < 0.05)
                continue;
            auto formula = D_prime(cfg.spec, pt.q, DerivativeMode::Formula, 1e-4, opt);
            auto fd = D_prime(cfg.spec, pt.q, DerivativeMode::FiniteDifference, 1e-4, opt);
            if (std::abs(formula.value - fd.value) > 1e-4) {
                std::ostringstream msg;
                msg << "derivative cross-check failed at q = " << pt.q << ": formula "
                    << formula.value << " vs finite difference " << fd.value;
                res.failures.push_back(msg.str());
            }
            if (std::abs(formula.residual) > 1e-8) {
                std::ostringstream msg;
                msg << "equilibrium identity residual " << formula.residual << " at q = " << pt.q;
                res.failures.push_back(msg.str());
            }
            ++checked;
        }
    }

    std::string csv = outpath(cfg, "verify.csv");
    CsvFile out(csv, {"q", "D", "tau", "sigma", "d_prime", "method"});
    for (const auto& pt : table.points)
        out.row({fmt(pt.q), fmt(pt.D), fmt(pt.tau), fmt(pt.sigma), fmt(pt.d_prime),
                 to_string(pt.method)});
    emit(res, csv);

    json meta = spectrum_meta(cfg, table, opt);
    meta["audit_tol"] = audit_tol;
    meta["audit_pass"] = report.pass(audit_tol);
    meta["failures"] = res.failures;
    meta["notices"] = report.notices;
    json boundaries = json::array();
    for (const auto& b : report.boundaries)
        boundaries.push_back({{"q", b.q},
                              {"k_left", b.k_left},
                              {"k_right", b.k_right},
                              {"above_one", b.above_one},
                              {"slope_jump", b.slope_jump}});
    meta["branch_boundaries"] = boundaries;
    std::string meta_path = outpath(cfg, "verify.meta");
    write_meta(meta_path, meta);
    emit(res, meta_path);

    if (!res.failures.empty()) res.exit_code = 3;
    return res;
}

RunResult run_covering(const RunConfig& cfg) {
    std::string kind = get_str(cfg.params, "kind", "both");
    int families = static_cast<int>(get_num(cfg.params, "families", 200));
    int count = static_cast<int>(get_num(cfg.params, "rects", 40));
    double ratio = get_num(cfg.params, "ratio", 8.0);
    std::uint64_t seed = get_u64(cfg.params, "seed", 0);
    Philox rng(seed, 0x636f766572ull);

    RunResult res;
    std::string csv = outpath(cfg, "covering.csv");
    CsvFile out(csv, {"family", "kind", "size", "selected", "inflation", "disjoint", "covered"});

    int rect_failures = 0, translate_failures = 0;
    if (kind == "rectangles" || kind == "both") {
        for (int f = 0; f < families; ++f) {
            std::vector<AxisRectangle> rects;
            for (int i = 0; i < count; ++i) {
                double ax = 1.0 + (ratio - 1.0) * rng.next_double();
                double ay = 1.0 + (ratio - 1.0) * rng.next_double();
                rects.push_back(AxisRectangle{{12.0 * rng.next_double(), 12.0 * rng.next_double()},
                                              {ax, ay}});
            }
            auto sel = partition_and_select(rects);
            auto cert = certify_selection(rects, sel, 9);
            bool ok = cert.disjoint_ok && cert.covering_ok;
            if (!ok) ++rect_failures;
            out.row({std::to_string(f), "rectangles", std::to_string(count),
                     std::to_string(sel.selected[0].size() + sel.selected[1].size()),
                     fmt(sel.inflation), cert.disjoint_ok ? "1" : "0",
                     cert.covering_ok ? "1" : "0"});
        }
    }
    if (kind == "translates" || kind == "both") {
        for (int f = 0; f < families; ++f) {
            int d = 2;
            LinearMap t(d);
            t.at(0, 0) = 0.3 + 0.3 * rng.next_double();
            t.at(1, 1) = 0.2 + 0.3 * rng.next_double();
            t.at(0, 1) = 0.2 * rng.next_double();
            std::vector<LinearMap> parts(count, t);
            std::vector<std::vector<double>> offsets(count, std::vector<double>(d));
            for (auto& b : offsets)
                for (double& v : b) v = 1.5 * rng.next_double();
            std::vector<double> center(d, 0.0);
            auto sel = select_translates(parts, offsets, center, 0.5);
            auto cert = certify_translates(parts, offsets, center, 0.5, sel, 5);
            bool ok = cert.disjoint_ok && cert.covering_ok;
            if (!ok) ++translate_failures;
            out.row({std::to_string(f), "translates", std::to_string(count),
                     std::to_string(sel.selected.size()), fmt(sel.inflation),
                     cert.disjoint_ok ? "1" : "0", cert.covering_ok ? "1" : "0"});
        }
    }
    emit(res, csv);

    if (rect_failures > 0)
        res.failures.push_back(std::to_string(rect_failures) + " rectangle families failed");
    if (translate_failures > 0)
        res.failures.push_back(std::to_string(translate_failures) + " translate families failed");

    json meta;
    meta["task"] = cfg.task;
    meta["kind"] = kind;
    meta["families"] = families;
    meta["rects"] = count;
    meta["ratio"] = ratio;
    meta["seed"] = seed;
    meta["failures"] = res.failures;
    std::string meta_path = outpath(cfg, "covering.meta");
    write_meta(meta_path, meta);
    emit(res, meta_path);

    if (!res.failures.empty()) res.exit_code = 3;
    return res;
}

} // namespace

RunResult run(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.task == "dq") return run_dq(cfg);
    if (cfg.task == "tau") return run_tau(cfg);
    if (cfg.task == "spectrum") return run_spectrum_task(cfg);
    if (cfg.task == "lyapunov") return run_lyapunov(cfg);
    if (cfg.task == "closed-form") return run_closed_form(cfg);
    if (cfg.task == "regimes") return run_regimes(cfg);
    if (cfg.task == "sample") return run_sample(cfg);
    if (cfg.task == "empirical-tau") return run_empirical_tau(cfg);
    if (cfg.task == "verify") return run_verify(cfg);
    if (cfg.task == "covering") return run_covering(cfg);
    throw ValidationError("unknown task '" + cfg.task + "'");
}

} // namespace selfaffine
