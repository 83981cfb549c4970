#pragma once

// Experiment configuration and the two batch drivers used by the CLI:
// convergence of the generalized CF over a list of N, and the analytic
// invariant checks.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scalediff/errors.hpp"
#include "scalediff/invariants.hpp"
#include "scalediff/io.hpp"
#include "scalediff/kernel.hpp"
#include "scalediff/models.hpp"
#include "scalediff/parallel.hpp"
#include "scalediff/processes.hpp"
#include "scalediff/stats.hpp"
#include "scalediff/transform.hpp"

namespace scalediff {

// "a:b:step" or "q1,q2,...".
inline std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    auto num = [&](const std::string& tok) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + tok + "' in grid '" + s + "'");
        }
        if (pos != tok.size() || !std::isfinite(v)) throw ConfigError("bad number '" + tok + "' in grid '" + s + "'");
        return v;
    };
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
        if (parts.size() != 3) throw ConfigError("range grid must be a:b:step, got '" + s + "'");
        const double a = num(parts[0]), b = num(parts[1]), st = num(parts[2]);
        if (!(st > 0.0) || !(b >= a)) throw ConfigError("range grid needs b >= a and step > 0: '" + s + "'");
        const long n = std::lround(std::floor((b - a) / st + 1e-9));
        if (n > 100000) throw ConfigError("range grid too long: '" + s + "'");
        for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * st);
    } else {
        std::stringstream ss(s);
        for (std::string tok; std::getline(ss, tok, ',');) out.push_back(num(tok));
    }
    if (out.empty()) throw ConfigError("empty grid '" + s + "'");
    return out;
}

struct ExperimentConfig {
    double nu = 2.0;
    std::string process = "sde";  // sde | ctrw | limit
    std::string model = "power";  // sde: power | shifted
    std::string scheme = "martingale";
    double eta = 0.5;
    double steps_per_unit = 1000.0;
    std::vector<double> N_list{1e2, 1e3, 1e4};
    double t = 1.0;
    double x0 = 0.0;
    std::vector<double> q_grid = parse_grid("-2:2:0.25");
    std::size_t paths = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out_dir;
    double final_gap_tol = 0.02;
    double trend_sigmas = 3.0;

    void validate() const {
        NuParam p(nu);
        (void)p;
        if (process != "sde" && process != "ctrw" && process != "limit")
            throw ConfigError("process must be sde, ctrw or limit, got '" + process + "'");
        if (model != "power" && model != "shifted") throw ConfigError("model must be power or shifted");
        if (scheme != "martingale" && scheme != "martingale_euler" && scheme != "direct")
            throw ConfigError("scheme must be martingale, martingale_euler or direct");
        if (!(t > 0.0)) throw ConfigError("t must be > 0");
        if (paths < 2) throw ConfigError("paths must be >= 2");
        if (workers < 1) throw ConfigError("workers must be >= 1");
        for (double N : N_list)
            if (!(N >= 1.0)) throw ConfigError("every N must be >= 1");
        if (N_list.empty()) throw ConfigError("N list is empty");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    return d;
}

inline std::uint64_t to_count(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (!(d >= 0.0) || d != std::floor(d) || d > 1e15) throw ConfigError("config: " + key + " expects a count, got '" + v + "'");
    return static_cast<std::uint64_t>(d);
}

}  // namespace detail

// Applies one key (qualified as section.key or bare) to the config.
inline void set_config_value(ExperimentConfig& c, const std::string& qualified, const std::string& v) {
    const auto dot = qualified.rfind('.');
    const std::string key = dot == std::string::npos ? qualified : qualified.substr(dot + 1);
    if (key == "nu") c.nu = detail::to_double(key, v);
    else if (key == "process") c.process = v;
    else if (key == "model") c.model = v;
    else if (key == "scheme") c.scheme = v;
    else if (key == "eta") c.eta = detail::to_double(key, v);
    else if (key == "steps_per_unit") c.steps_per_unit = detail::to_double(key, v);
    else if (key == "N") c.N_list = parse_grid(v);
    else if (key == "t") c.t = detail::to_double(key, v);
    else if (key == "x0") c.x0 = detail::to_double(key, v);
    else if (key == "q_grid") c.q_grid = parse_grid(v);
    else if (key == "paths") c.paths = detail::to_count(key, v);
    else if (key == "seed") c.seed = detail::to_count(key, v);
    else if (key == "workers") c.workers = static_cast<unsigned>(detail::to_count(key, v));
    else if (key == "out") c.out_dir = v;
    else if (key == "final_gap_tol") c.final_gap_tol = detail::to_double(key, v);
    else if (key == "trend_sigmas") c.trend_sigmas = detail::to_double(key, v);
    else throw ConfigError("config: unknown key '" + qualified + "'");
}

// key = value lines, '#' comments, optional [section] headers.
inline ExperimentConfig parse_config(std::istream& is, ExperimentConfig c = {}) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        set_config_value(c, section.empty() ? key : section + "." + key, val);
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig c = {}) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config " + path.string());
    return parse_config(is, std::move(c));
}

// Samples the configured process at scale N on the grid {0, t}.
inline PathEnsemble sample_configured(const ExperimentConfig& c, double N, std::size_t paths) {
    const std::vector<double> times{0.0, c.t};
    if (c.process == "limit") {
        return sample_limit_paths(NuParam(c.nu), c.x0, times, paths, c.seed, c.workers);
    }
    if (c.process == "sde") {
        const SdeModel m = c.model == "shifted" ? SdeModel::shifted(c.nu) : SdeModel::power(c.nu);
        SdeOptions o;
        o.seed = c.seed;
        o.workers = c.workers;
        o.eta = c.eta;
        o.steps_per_unit = c.steps_per_unit;
        o.scheme = c.scheme == "direct" ? SdeScheme::direct
                                        : (c.scheme == "martingale_euler" ? SdeScheme::martingale_euler : SdeScheme::martingale);
        return sample_sde_paths(m, N, c.x0, times, paths, o);
    }
    CtrwOptions o;
    o.seed = c.seed;
    o.workers = c.workers;
    const auto n0 = static_cast<std::int64_t>(std::llround(c.x0 * std::pow(N, 1.0 / (c.nu + 2.0))));
    return sample_ctrw_paths(RateModel::standard(c.nu), N, n0, times, paths, o);
}

inline std::vector<CFRow> cf_table(const NuParam& p, const std::vector<double>& samples, const std::vector<double>& qs,
                                   double t, double x0) {
    std::vector<CFRow> rows;
    for (double q : qs) rows.push_back({t, gcf_estimate(p, samples, q), gcf_target(p, q, t, x0)});
    return rows;
}

struct ConvergenceRow {
    double N = 0.0;
    double gap = 0.0;     // max_q |estimate - target|
    double gap_se = 0.0;  // standard error at the maximising q
    double q_at_max = 0.0;
    double ks = 0.0;      // KS distance to the limit law at time t
    std::vector<CFRow> cf;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    bool trend_ok = true;
    bool final_ok = true;
    std::vector<std::string> notes;
    bool pass() const { return trend_ok && final_ok; }
};

// The gap must not increase by more than trend_sigmas combined standard errors
// from one N to the next, and the last gap must be below final_gap_tol.
inline ConvergenceReport evaluate_trend(std::vector<ConvergenceRow> rows, double sigmas, double final_tol) {
    ConvergenceReport r;
    r.rows = std::move(rows);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        const auto& a = r.rows[i - 1];
        const auto& b = r.rows[i];
        const double slack = sigmas * std::hypot(a.gap_se, b.gap_se);
        if (b.gap > a.gap + slack) {
            r.trend_ok = false;
            std::ostringstream os;
            os << "gap rose from " << a.gap << " (N=" << a.N << ") to " << b.gap << " (N=" << b.N << "), slack " << slack;
            r.notes.push_back(os.str());
        }
    }
    if (!r.rows.empty() && !(r.rows.back().gap < final_tol)) {
        r.final_ok = false;
        std::ostringstream os;
        os << "final gap " << r.rows.back().gap << " >= " << final_tol;
        r.notes.push_back(os.str());
    }
    return r;
}

inline ConvergenceReport run_convergence(const ExperimentConfig& c) {
    c.validate();
    const NuParam p(c.nu);
    const KernelTable limit = build_kernel_table(p, c.t, c.x0, 2048);
    std::vector<ConvergenceRow> rows;
    for (double N : c.N_list) {
        const PathEnsemble e = sample_configured(c, N, c.paths);
        const std::vector<double> xs = e.column(1);
        ConvergenceRow row;
        row.N = N;
        row.cf = cf_table(p, xs, c.q_grid, c.t, c.x0);
        for (const auto& cf : row.cf) {
            if (cf_gap(cf) > row.gap) {
                row.gap = cf_gap(cf);
                row.gap_se = cf_gap_se(cf);
                row.q_at_max = cf.est.q;
            }
        }
        row.ks = ks_one_sample(xs, [&](double x) { return table_cdf(limit, x); }).d;
        rows.push_back(std::move(row));
    }
    ConvergenceReport r = evaluate_trend(std::move(rows), c.trend_sigmas, c.final_gap_tol);
    if (!c.out_dir.empty()) {
        const std::filesystem::path dir(c.out_dir);
        {
            auto os = open_out(dir / "convergence.csv");
            os << "N,gap,gap_se,q_at_max,ks\n";
            for (const auto& row : r.rows)
                os << fmt(row.N) << ',' << fmt(row.gap) << ',' << fmt(row.gap_se) << ',' << fmt(row.q_at_max) << ','
                   << fmt(row.ks) << '\n';
        }
        {
            auto os = open_out(dir / "cf.csv");
            os << "N,t,q,re,im,se_re,se_im,target_re,target_im,gap,n\n";
            for (const auto& row : r.rows) {
                std::ostringstream tmp;
                write_cf_csv(tmp, row.cf);
                std::stringstream lines(tmp.str());
                std::string l;
                std::getline(lines, l);  // header
                while (std::getline(lines, l)) os << fmt(row.N) << ',' << l << '\n';
            }
        }
        {
            auto os = open_out(dir / "plots.txt");
            PlotSpec gap{"gap_vs_N", "max_q CF gap against N", "convergence.csv", "N", true, "gap", true,
                         {{"gap", "gap_se", "CF gap"}, {"ks", "", "KS distance"}}, {}};
            PlotSpec cf{"cf_real", "Re E e(qX_t) against q", "cf.csv", "q", false, "value", false,
                        {{"re", "se_re", "estimate"}, {"target_re", "", "limit"}}, {}};
            write_plot_description(os, {gap, cf});
        }
    }
    return r;
}

struct InvariantLine {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool lower_bound = false;  // pass iff value >= tol instead of value < tol
    bool pass = false;
};

struct InvariantReport {
    std::vector<InvariantLine> lines;
    bool pass() const {
        return std::all_of(lines.begin(), lines.end(), [](const InvariantLine& l) { return l.pass; });
    }
};

// Deterministic checks at one nu: eigen equation, kernel mass and
// Chapman-Kolmogorov, spectral form, scale invariance. The Gaussian limit is
// checked at nu = 1e-8 regardless of c.nu.
inline InvariantReport run_invariants(const ExperimentConfig& c) {
    c.validate();
    const NuParam p(c.nu);
    InvariantReport r;
    auto add = [&](std::string name, double v, double tol) { r.lines.push_back({std::move(name), v, tol, false, v < tol}); };

    const auto ec = eigen_check(p, {0.5, 1.0, 2.0}, symmetric_log_grid(0.1, 10.0, 41), {2e-2, 1e-2, 5e-3, 2.5e-3, 1e-4});
    add("eigen residual at h=1e-4", ec.max_residual.back(), 1e-6);
    const double order = loglog_slope({2e-2, 1e-2, 5e-3, 2.5e-3},
                                      {ec.max_residual[0], ec.max_residual[1], ec.max_residual[2], ec.max_residual[3]});
    r.lines.push_back({"eigen fitted order in h", order, 2.0, true, order >= 2.0});

    double mass = 0.0, ck = 0.0;
    for (double t : {0.25, 1.0, 4.0})
        for (double x : {0.0, 0.7, -2.0}) {
            mass = std::max(mass, std::fabs(kernel_mass(p, t, x) - 1.0));
            for (double s : {0.25, 1.0, 4.0})
                for (double xp : {-1.1, 0.0, 0.4}) ck = std::max(ck, std::fabs(chapman_kolmogorov_residual(p, s, t, x, xp)));
        }
    add("kernel mass", mass, 1e-6);
    add("Chapman-Kolmogorov", ck, 1e-6);

    const auto pts = random_kernel_points(20, c.seed);
    add("spectral vs closed form", spectral_gap(p, pts), 1e-8);
    double sc = 0.0;
    for (double N : {2.0, 10.0, 100.0}) sc = std::max(sc, scale_invariance_residual(p, N, pts));
    add("scale invariance", sc, 1e-9);

    const NuParam g(1e-8);
    add("Gaussian limit", std::max(gaussian_gap(g, 0.1), gaussian_gap(g, 1.0)), 1e-6);

    if (!c.out_dir.empty()) {
        auto os = open_out(std::filesystem::path(c.out_dir) / "invariants.csv");
        os << "check,value,bound,kind,pass\n";
        for (const auto& l : r.lines)
            os << l.name << ',' << fmt(l.value) << ',' << fmt(l.tol) << ',' << (l.lower_bound ? "min" : "max") << ','
               << (l.pass ? 1 : 0) << '\n';
    }
    return r;
}

}  // namespace scalediff
