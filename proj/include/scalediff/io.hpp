#pragma once

// CSV and binary writers. Numbers are written with %.17g so that a rerun with
// the same seed reproduces files byte for byte.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scalediff/errors.hpp"
#include "scalediff/kernel.hpp"
#include "scalediff/martingale.hpp"
#include "scalediff/processes.hpp"
#include "scalediff/transform.hpp"

namespace scalediff {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    return os;
}

// path,t,x[,sup_abs][,state][,compensator]
inline void write_ensemble_csv(std::ostream& os, const PathEnsemble& e) {
    os << "path,t,x";
    if (!e.sup_abs.empty()) os << ",sup_abs";
    if (!e.states.empty()) os << ",state";
    if (!e.compensator.empty()) os << ",compensator";
    os << '\n';
    const std::size_t nt = e.n_times();
    for (std::size_t i = 0; i < e.n_paths; ++i) {
        for (std::size_t k = 0; k < nt; ++k) {
            const std::size_t j = i * nt + k;
            os << i << ',' << fmt(e.times[k]) << ',' << fmt(e.paths[j]);
            if (!e.sup_abs.empty()) os << ',' << fmt(e.sup_abs[j]);
            if (!e.states.empty()) os << ',' << e.states[j];
            if (!e.compensator.empty()) os << ',' << fmt(e.compensator[j]);
            os << '\n';
        }
    }
}

// Binary layout, little-endian:
//   char[8] "SDIFENS\0", u32 version = 1, u32 kind, f64 nu, f64 N, u64 seed,
//   u64 n_times, u64 n_paths, f64 times[n_times], f64 paths[n_paths * n_times] (row-major).
inline constexpr char kEnsembleMagic[8] = {'S', 'D', 'I', 'F', 'E', 'N', 'S', '\0'};
inline constexpr std::uint32_t kEnsembleVersion = 1;

inline void write_ensemble_binary(std::ostream& os, const PathEnsemble& e) {
    auto put = [&](const auto& v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    os.write(kEnsembleMagic, 8);
    put(kEnsembleVersion);
    put(static_cast<std::uint32_t>(e.kind));
    put(e.p.nu);
    put(e.rescale_N);
    put(static_cast<std::uint64_t>(e.seed));
    put(static_cast<std::uint64_t>(e.n_times()));
    put(static_cast<std::uint64_t>(e.n_paths));
    os.write(reinterpret_cast<const char*>(e.times.data()), static_cast<std::streamsize>(e.times.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(e.paths.data()), static_cast<std::streamsize>(e.paths.size() * sizeof(double)));
}

inline PathEnsemble read_ensemble_binary(std::istream& is) {
    auto get = [&](auto& v) {
        is.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!is) throw ConfigError("ensemble file truncated");
    };
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kEnsembleMagic, 8) != 0) throw ConfigError("not an ensemble file (bad magic)");
    std::uint32_t version = 0, kind = 0;
    get(version);
    if (version != kEnsembleVersion) throw ConfigError("unsupported ensemble file version " + std::to_string(version));
    get(kind);
    if (kind > static_cast<std::uint32_t>(ProcessKind::besq)) throw ConfigError("bad process kind in ensemble file");
    double nu = 0, N = 0;
    std::uint64_t seed = 0, nt = 0, np = 0;
    get(nu);
    get(N);
    get(seed);
    get(nt);
    get(np);
    PathEnsemble e;
    e.p = NuParam(nu);
    e.kind = static_cast<ProcessKind>(kind);
    e.rescale_N = N;
    e.seed = seed;
    e.n_paths = np;
    e.times.resize(nt);
    e.paths.resize(nt * np);
    is.read(reinterpret_cast<char*>(e.times.data()), static_cast<std::streamsize>(nt * sizeof(double)));
    is.read(reinterpret_cast<char*>(e.paths.data()), static_cast<std::streamsize>(nt * np * sizeof(double)));
    if (!is) throw ConfigError("ensemble file truncated");
    return e;
}

// x,pdf,cdf
inline void write_kernel_table_csv(std::ostream& os, const KernelTable& t) {
    os << "x,pdf,cdf\n";
    for (std::size_t i = 0; i < t.grid.size(); ++i) os << fmt(t.grid[i]) << ',' << fmt(t.pdf[i]) << ',' << fmt(t.cdf[i]) << '\n';
}

struct CFRow {
    double t = 0.0;
    CFEstimate est;
    ComplexValue target;
};

inline double cf_gap(const CFRow& r) { return std::abs(r.est.mean - r.target); }
inline double cf_gap_se(const CFRow& r) { return std::hypot(r.est.se_re, r.est.se_im); }

// t,q,re,im,se_re,se_im,target_re,target_im,gap,n
inline void write_cf_csv(std::ostream& os, const std::vector<CFRow>& rows) {
    os << "t,q,re,im,se_re,se_im,target_re,target_im,gap,n\n";
    for (const auto& r : rows) {
        os << fmt(r.t) << ',' << fmt(r.est.q) << ',' << fmt(r.est.mean.real()) << ',' << fmt(r.est.mean.imag()) << ','
           << fmt(r.est.se_re) << ',' << fmt(r.est.se_im) << ',' << fmt(r.target.real()) << ','
           << fmt(r.target.imag()) << ',' << fmt(cf_gap(r)) << ',' << r.est.n << '\n';
    }
}

// t,mean,se,tstat
inline void write_drift_csv(std::ostream& os, const DriftReport& r) {
    os << "t,mean,se,tstat\n";
    for (const auto& row : r.rows) os << fmt(row.t) << ',' << fmt(row.mean) << ',' << fmt(row.se) << ',' << fmt(row.tstat) << '\n';
}

// Plot description, one declaration per line:
//   plot <id>
//   title <text>
//   data <csv file, relative to this file>
//   x <column> [log]
//   y <column> [log]
//   series <y column> [err=<column>] [label=<text>]
//   filter <column>=<value>
//   end
struct PlotSeries {
    std::string column;
    std::string error_column;
    std::string label;
};

struct PlotSpec {
    std::string id;
    std::string title;
    std::string data;
    std::string x;
    bool log_x = false;
    std::string y_label;
    bool log_y = false;
    std::vector<PlotSeries> series;
    std::vector<std::pair<std::string, std::string>> filters;
};

inline void write_plot_description(std::ostream& os, const std::vector<PlotSpec>& plots) {
    os << "# scalediff plot description v1\n";
    for (const auto& p : plots) {
        os << "plot " << p.id << '\n';
        os << "title " << p.title << '\n';
        os << "data " << p.data << '\n';
        os << "x " << p.x << (p.log_x ? " log" : "") << '\n';
        os << "y " << p.y_label << (p.log_y ? " log" : "") << '\n';
        for (const auto& s : p.series) {
            os << "series " << s.column;
            if (!s.error_column.empty()) os << " err=" << s.error_column;
            if (!s.label.empty()) os << " label=" << s.label;
            os << '\n';
        }
        for (const auto& [k, v] : p.filters) os << "filter " << k << '=' << v << '\n';
        os << "end\n";
    }
}

}  // namespace scalediff
