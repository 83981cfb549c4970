// scalediff kernel|sample|gcf|converge|check
//
// Flags given on the command line override values read from --config.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "scalediff/scalediff.hpp"

using namespace scalediff;

namespace {

struct Flags {
    std::map<std::string, std::string> values;  // config key -> raw value
    std::string config;
    std::string out;

    void add(CLI::App* app) {
        auto opt = [&](const char* flag, const char* key, const char* help) {
            app->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
        };
        opt("--nu", "nu", "exponent nu > 0");
        opt("--N", "N", "scale N, or a list / a:b:step range for converge");
        opt("--t", "t", "time");
        opt("--x0", "x0", "start point");
        opt("--q-grid", "q_grid", "q values: a:b:step or comma list");
        opt("--paths", "paths", "number of paths");
        opt("--seed", "seed", "RNG seed");
        opt("--workers", "workers", "worker threads");
        opt("--process", "process", "sde | ctrw | limit");
        opt("--model", "model", "sde coefficient: power | shifted");
        opt("--scheme", "scheme", "sde scheme: martingale | martingale_euler | direct");
        app->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
        app->add_option("--out", out, "output file (kernel, sample, gcf) or directory (converge, check)");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig c;
        if (!config.empty()) c = load_config(config, c);
        for (const auto& [k, v] : values) set_config_value(c, k, v);
        if (!out.empty()) c.out_dir = out;
        c.validate();
        return c;
    }
};

void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    auto os = open_out(path);
    write(os);
}

int cmd_kernel(const Flags& f) {
    const ExperimentConfig c = f.resolve();
    const KernelTable t = build_kernel_table(NuParam(c.nu), c.t, c.x0, 2048);
    emit(f.out, [&](std::ostream& os) { write_kernel_table_csv(os, t); });
    return kExitPass;
}

int cmd_sample(const Flags& f) {
    const ExperimentConfig c = f.resolve();
    const PathEnsemble e = sample_configured(c, c.N_list.front(), c.paths);
    if (f.out.size() > 4 && f.out.substr(f.out.size() - 4) == ".bin") {
        auto os = open_out(f.out);
        write_ensemble_binary(os, e);
    } else {
        emit(f.out, [&](std::ostream& os) { write_ensemble_csv(os, e); });
    }
    return kExitPass;
}

int cmd_gcf(const Flags& f) {
    const ExperimentConfig c = f.resolve();
    const PathEnsemble e = sample_configured(c, c.N_list.front(), c.paths);
    const auto rows = cf_table(NuParam(c.nu), e.column(1), c.q_grid, c.t, c.x0);
    emit(f.out, [&](std::ostream& os) { write_cf_csv(os, rows); });
    return kExitPass;
}

int cmd_converge(const Flags& f) {
    const ExperimentConfig c = f.resolve();
    const ConvergenceReport r = run_convergence(c);
    std::printf("%-10s %-12s %-12s %-8s %-10s\n", "N", "gap", "se", "q*", "ks");
    for (const auto& row : r.rows)
        std::printf("%-10g %-12.5g %-12.5g %-8g %-10.5g\n", row.N, row.gap, row.gap_se, row.q_at_max, row.ks);
    for (const auto& n : r.notes) std::printf("note: %s\n", n.c_str());
    std::printf("%s trend=%s final=%s\n", r.pass() ? "PASS" : "FAIL", r.trend_ok ? "ok" : "violated",
                r.final_ok ? "ok" : "above tolerance");
    return r.pass() ? kExitPass : kExitCriterion;
}

int cmd_check(const Flags& f) {
    const ExperimentConfig c = f.resolve();
    const InvariantReport r = run_invariants(c);
    for (const auto& l : r.lines)
        std::printf("%s %-28s %.3e %s %.1e\n", l.pass ? "PASS" : "FAIL", l.name.c_str(), l.value,
                    l.lower_bound ? ">=" : "<", l.tol);
    return r.pass() ? kExitPass : kExitCriterion;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scale-invariant diffusion toolkit"};
    app.require_subcommand(1);
    Flags fk, fs, fg, fc, fch;
    auto* k = app.add_subcommand("kernel", "tabulate phi_t(x0, .) as x,pdf,cdf");
    fk.add(k);
    auto* s = app.add_subcommand("sample", "sample paths at times {0, t}; .bin output selects the binary format");
    fs.add(s);
    auto* g = app.add_subcommand("gcf", "generalized CF estimate against the limit on a q grid");
    fg.add(g);
    auto* c = app.add_subcommand("converge", "CF gap over a list of N with trend check");
    fc.add(c);
    auto* ch = app.add_subcommand("check", "analytic invariant checks");
    fch.add(ch);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitUsage;
    }
    try {
        if (k->parsed()) return cmd_kernel(fk);
        if (s->parsed()) return cmd_sample(fs);
        if (g->parsed()) return cmd_gcf(fg);
        if (c->parsed()) return cmd_converge(fc);
        return cmd_check(fch);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const ModelError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    }
}
