#pragma once

// Command implementations behind the fno tool. Each returns a process exit
// code: 0 success, 2 invalid configuration or input, 3 numerical failure.

#include <fno/besov.hpp>
#include <fno/paths.hpp>
#include <fno/roughpath.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fno {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3 };

struct RunConfig {
    std::string input;
    double alpha = 0.3;
    int levels = 0;
    int kmax = -1;
    int grid_fine = 0;  // 0: take the sample count of the input
    int grid_coarse = 33;
    std::string scheme = "regularized";
    std::string partition = "sharp";  // sharp | composite
    bool tie_weights = true;
    double window_margin = 0.1;
    std::string out;
    std::string report;
    std::string band_dump;
    bool allow_integer_inv_alpha = false;
    bool verify_tail = false;
    int threads = 1;
};

// Reads a JSON config whose keys are the long flag names without dashes.
inline void apply_config_json(RunConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const auto& v = it.value();
        try {
            if (k == "input") c.input = v.get<std::string>();
            else if (k == "alpha") c.alpha = v.get<double>();
            else if (k == "levels") c.levels = v.get<int>();
            else if (k == "kmax") c.kmax = v.get<int>();
            else if (k == "grid-fine") c.grid_fine = v.get<int>();
            else if (k == "grid-coarse") c.grid_coarse = v.get<int>();
            else if (k == "scheme") c.scheme = v.get<std::string>();
            else if (k == "partition") c.partition = v.get<std::string>();
            else if (k == "tie-weights") c.tie_weights = v.get<bool>();
            else if (k == "window-margin") c.window_margin = v.get<double>();
            else if (k == "out") c.out = v.get<std::string>();
            else if (k == "report") c.report = v.get<std::string>();
            else if (k == "band-dump") c.band_dump = v.get<std::string>();
            else if (k == "allow-integer-inv-alpha") c.allow_integer_inv_alpha = v.get<bool>();
            else if (k == "verify-tail") c.verify_tail = v.get<bool>();
            else if (k == "threads") c.threads = v.get<int>();
            else throw std::invalid_argument("unknown config key: " + k);
        } catch (const nlohmann::json::exception&) {
            throw std::invalid_argument("config key has the wrong type: " + k);
        }
    }
}

inline RunConfig load_config_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open config file: " + file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file is not valid JSON: " + file);
    }
    RunConfig c;
    apply_config_json(c, j);
    return c;
}

inline nlohmann::json config_json(const RunConfig& c) {
    return {{"input", c.input},
            {"alpha", c.alpha},
            {"levels", c.levels},
            {"kmax", c.kmax},
            {"grid-fine", c.grid_fine},
            {"grid-coarse", c.grid_coarse},
            {"scheme", c.scheme},
            {"partition", c.partition},
            {"tie-weights", c.tie_weights},
            {"window-margin", c.window_margin},
            {"allow-integer-inv-alpha", c.allow_integer_inv_alpha},
            {"verify-tail", c.verify_tail}};
}

inline nlohmann::json defect_json(const Defect& d) {
    return {{"relative", d.value}, {"absolute", d.absolute}, {"word", word_text(d.word)}, {"t", d.t}, {"u", d.u}, {"s", d.s}};
}

// Chen, shuffle and Hoelder sections; depends on the stored tensors only.
inline nlohmann::json verification_json(const RoughPath& rp) {
    nlohmann::json j;
    j["chen"] = defect_json(chen_defect(rp));
    j["shuffle"] = defect_json(shuffle_defect(rp));
    nlohmann::json h = nlohmann::json::array();
    for (int n = 1; n <= rp.N; ++n) {
        nlohmann::json e{{"level", n}, {"threshold", n * rp.alpha - 0.1}};
        try {
            auto fit = hoelder_slope(rp, n);
            e["slope"] = fit.slope;
            e["residual"] = fit.residual;
            e["gaps"] = fit.gaps;
            e["sups"] = fit.sups;
        } catch (const std::invalid_argument& err) {
            e["error"] = err.what();
        }
        h.push_back(e);
    }
    j["hoelder"] = h;
    return j;
}

inline void write_json_file(const std::string& file, const nlohmann::json& j) {
    std::ofstream out(file);
    if (!out) throw std::invalid_argument("cannot write " + file);
    out << j.dump(1) << "\n";
}

inline SchemeKind parse_scheme(const std::string& s) {
    if (s == "regularized") return SchemeKind::Regularized;
    if (s == "full") return SchemeKind::Full;
    throw std::invalid_argument("scheme must be 'regularized' or 'full', got '" + s + "'");
}

// Max relative difference between two lifts over levels >= 2.
inline double max_relative_delta(const RoughPath& a, const RoughPath& b, int min_level = 2) {
    double diff = 0, scale = 0;
    for (auto& [w, m] : a.levels) {
        if (static_cast<int>(w.size()) < min_level) continue;
        const auto& o = b.levels.at(w);
        for (std::size_t i = 0; i < m.size(); ++i) {
            diff = std::max(diff, std::abs(m[i] - o[i]));
            scale = std::max(scale, std::abs(m[i]));
        }
    }
    return scale > 0 ? diff / scale : diff;
}

inline void dump_bands(const std::string& file, const SampledPath& p, int kmax) {
    std::ofstream out(file);
    if (!out) throw std::invalid_argument("cannot write " + file);
    auto dec = decompose(p, DyadicPartition(PartitionKind::Sharp, kmax));
    out << "channel,k,m,xi,re,im\n";
    char buf[160];
    for (int c = 0; c < p.dim(); ++c)
        for (int k = -kmax; k <= kmax; ++k) {
            const auto& b = dec.band(c, k);
            for (std::size_t i = 0; i < b.spec.size(); ++i) {
                int m = b.lo + static_cast<int>(i);
                std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g\n", c + 1, k, m, dec.grid.xi(m),
                              b.spec[i].real(), b.spec[i].imag());
                out << buf;
            }
        }
}

inline int run_lift(const RunConfig& rc, std::ostream& log = std::cerr) {
    RunConfig cfg = rc;
    SampledPath raw;
    LiftConfig lc;
    std::vector<std::string> notes;
    try {
        if (cfg.input.empty()) throw std::invalid_argument("missing --input");
        if (!std::filesystem::exists(cfg.input)) throw std::invalid_argument("input file not found: " + cfg.input);
        if (cfg.out.empty()) throw std::invalid_argument("missing --out");
        raw = read_path_csv(cfg.input);
        if (cfg.grid_fine != 0 && cfg.grid_fine != raw.size())
            throw std::invalid_argument("--grid-fine " + std::to_string(cfg.grid_fine) + " does not match the " +
                                        std::to_string(raw.size()) + " samples in " + cfg.input);
        if (cfg.partition != "sharp" && cfg.partition != "composite")
            throw std::invalid_argument("partition must be 'sharp' or 'composite'");
        lc.alpha = cfg.alpha;
        lc.levels = cfg.levels;
        lc.kmax = cfg.kmax;
        lc.coarse = cfg.grid_coarse;
        lc.window_margin = cfg.window_margin;
        lc.scheme = parse_scheme(cfg.scheme);
        lc.tie_weights = cfg.tie_weights;
        lc.composite = cfg.partition == "composite";
        lc.allow_integer_inv_alpha = cfg.allow_integer_inv_alpha;
        lc.threads = cfg.threads;
        lc.log = &notes;
        lc = validate(lc, raw);
        lc.log = nullptr;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        for (auto& n : notes) log << "note: " << n << "\n";
        SampledPath path = window_path(raw, lc.window_margin);
        if (!cfg.band_dump.empty()) dump_bands(cfg.band_dump, path, lc.kmax);
        auto t0 = std::chrono::steady_clock::now();
        LiftStats stats;
        RoughPath rp = lift(path, lc, &stats);
        double lift_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto& [w, m] : rp.levels)
            for (double v : m)
                if (!std::isfinite(v)) throw std::runtime_error("roughpath: non-finite value in word " + word_text(w));

        nlohmann::json rep;
        rep["schema"] = "fno.report/1";
        RunConfig echo = cfg;
        echo.alpha = lc.alpha;
        echo.levels = lc.levels;
        echo.kmax = lc.kmax;
        echo.grid_fine = raw.size();
        rep["config"] = config_json(echo);
        rep["notes"] = notes;
        rep["tail_energy"] = stats.tail_energy;
        rep["stats"] = {{"work_items", stats.work_items}, {"tuples", stats.tuples}};
        auto ver = verification_json(rp);
        for (auto it = ver.begin(); it != ver.end(); ++it) rep[it.key()] = it.value();
        double inc_err = 0;
        for (int c = 0; c < rp.dim; ++c)
            for (int t = 0; t < rp.G(); ++t)
                for (int s = 0; s < rp.G(); ++s) {
                    double raw_inc = path.channels[c][rp.grid_index[t]] - path.channels[c][rp.grid_index[s]];
                    inc_err = std::max(inc_err, std::abs(rp.at({c + 1}, t, s) - raw_inc));
                }
        rep["level1_increment_error"] = inc_err;
        double tail_seconds = 0;
        if (cfg.verify_tail) {
            auto t1 = std::chrono::steady_clock::now();
            LiftConfig lc2 = lc;
            lc2.kmax = lc.kmax + 2;
            RoughPath rp2 = lift(path, lc2);
            tail_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
            rep["tail_check"] = {{"kmax", lc.kmax}, {"kmax_plus_2", lc2.kmax}, {"max_relative_delta", max_relative_delta(rp, rp2)}};
        }
        rep["timing"] = {{"lift_seconds", lift_seconds}, {"tail_seconds", tail_seconds}};
        write_json_file(cfg.out, to_json(rp));
        if (!cfg.report.empty()) write_json_file(cfg.report, rep);
        log << "chen defect " << rep["chen"]["relative"].get<double>() << ", shuffle defect "
            << rep["shuffle"]["relative"].get<double>() << "\n";
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

inline int run_verify(const std::string& file, const std::string& report, std::ostream& out = std::cout,
                      std::ostream& log = std::cerr) {
    RoughPath rp;
    try {
        std::ifstream in(file);
        if (!in) throw std::invalid_argument("cannot open rough path file: " + file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception&) {
            throw std::invalid_argument("not valid JSON: " + file);
        }
        rp = from_json(j);
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        nlohmann::json rep = verification_json(rp);
        rep["schema"] = "fno.verify/1";
        rep["input"] = file;
        if (report.empty())
            out << rep.dump(1) << "\n";
        else
            write_json_file(report, rep);
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

struct GenConfig {
    std::string kind = "weierstrass";
    double alpha = 0.3;
    std::uint64_t seed = 1;
    int grid_fine = 4096;
    int dim = 2;
    std::string out;
};

inline int run_gen_path(const GenConfig& g, std::ostream& log = std::cerr) {
    try {
        if (g.out.empty()) throw std::invalid_argument("missing --out");
        SampledPath p = gen_path(parse_path_kind(g.kind), g.alpha, g.seed, g.grid_fine, g.dim);
        std::ofstream out(g.out);
        if (!out) throw std::invalid_argument("cannot write " + g.out);
        write_path_csv(out, p);
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace fno
