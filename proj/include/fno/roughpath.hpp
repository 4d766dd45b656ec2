#pragma once

// Rough path assembly by Fourier normal ordering, the canonical-lift oracle,
// and the Chen / shuffle / Hoelder checks.
//
//   R Gamma^n(l)_{ts} = sum_sigma sum_j g(sigma,j) sum_k w(k) R^k I_{T^sigma_j}(t,s)
//
// where k runs over block tuples whose |k| is nondecreasing in the vertex
// order of T^sigma_j and w(k) is the tie weight. A real path has conjugate
// symmetric bands, so the tuple -k contributes the conjugate of k; only tuples
// whose first nonzero entry is positive are evaluated.

#include <fno/besov.hpp>
#include <fno/hopf.hpp>
#include <fno/permgraph.hpp>
#include <fno/quadrature.hpp>
#include <fno/regularize.hpp>
#include <fno/spectral.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fno {

using Word = std::vector<int>;

struct RoughPath {
    double alpha = 0;
    int N = 0;
    int dim = 0;
    std::vector<int> grid_index;     // fine-grid indices of the coarse times
    std::vector<double> grid_times;  // the coarse times themselves
    std::map<Word, std::vector<double>> levels;  // word -> G x G, row t, column s

    int G() const { return static_cast<int>(grid_index.size()); }
    double at(const Word& w, int t, int s) const { return levels.at(w)[static_cast<std::size_t>(t) * G() + s]; }
    double& at(const Word& w, int t, int s) { return levels.at(w)[static_cast<std::size_t>(t) * G() + s]; }
};

// All words of length n over 1..d in lexicographic order.
inline std::vector<Word> all_words(int d, int n) {
    std::vector<Word> out;
    Word w(n, 1);
    if (n == 0) return {Word{}};
    while (true) {
        out.push_back(w);
        int i = n - 1;
        while (i >= 0 && w[i] == d) w[i--] = 1;
        if (i < 0) break;
        ++w[i];
    }
    return out;
}

struct LiftConfig {
    double alpha = 0.3;
    int levels = 0;          // 0: floor(1/alpha)
    int kmax = -1;           // -1: the block holding the Nyquist frequency
    int coarse = 33;         // G
    double window_margin = 0.1;
    SchemeKind scheme = SchemeKind::Regularized;
    bool tie_weights = true;
    bool composite = false;  // smooth blocks inside sharp blocks
    bool allow_integer_inv_alpha = false;
    int threads = 1;
    std::vector<std::string>* log = nullptr;  // optional notes
};

inline bool integer_inverse(double alpha) {
    double r = 1.0 / alpha;
    return std::abs(r - std::round(r)) < 1e-9;
}

// Validates and normalizes a configuration. Throws std::invalid_argument.
inline LiftConfig validate(LiftConfig cfg, const SampledPath& p) {
    if (!(cfg.alpha > 0 && cfg.alpha < 1)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (integer_inverse(cfg.alpha)) {
        if (!cfg.allow_integer_inv_alpha)
            throw std::invalid_argument("1/alpha is an integer; pass the override to nudge alpha down by 1e-3");
        double old = cfg.alpha;
        cfg.alpha -= 1e-3;
        if (cfg.log) cfg.log->push_back("alpha nudged from " + std::to_string(old) + " to " + std::to_string(cfg.alpha));
    }
    const int nmax = static_cast<int>(std::floor(1.0 / cfg.alpha));
    if (cfg.levels == 0) cfg.levels = nmax;
    if (cfg.levels < 1 || cfg.levels > nmax)
        throw std::invalid_argument("levels must lie in 1..floor(1/alpha) = " + std::to_string(nmax));
    if (p.dim() < 1) throw std::invalid_argument("path has no channels");
    if (!is_pow2(p.size()) || p.size() < 16) throw std::invalid_argument("fine grid size must be a power of two >= 16");
    if (cfg.coarse < 2) throw std::invalid_argument("coarse grid needs at least 2 points");
    if (!(cfg.window_margin > 0 && cfg.window_margin < 0.4)) throw std::invalid_argument("window margin must lie in (0, 0.4)");
    FrequencyGrid g{p.size(), p.length()};
    if (cfg.kmax < 0) cfg.kmax = covering_kmax(g);
    if (cfg.threads < 1) cfg.threads = 1;
    auto [lo, hi] = plateau(p.size(), cfg.window_margin);
    if (hi - lo + 1 < cfg.coarse) throw std::invalid_argument("coarse grid denser than the plateau");
    return cfg;
}

// Evenly spaced fine indices across the window plateau.
inline std::vector<int> coarse_indices(int M, double margin, int G) {
    auto [lo, hi] = plateau(M, margin);
    std::vector<int> idx(G);
    for (int g = 0; g < G; ++g)
        idx[g] = lo + static_cast<int>(std::llround(static_cast<double>(g) * (hi - lo) / (G - 1)));
    return idx;
}

// Calls fn(k) for every tuple of length n with |k_i| <= kmax, |k| nondecreasing,
// and first nonzero entry positive (the all-zero tuple included), in
// lexicographic order.
inline void for_each_canonical_tuple(int n, int kmax, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> k(n);
    std::function<void(int, int, bool)> rec = [&](int i, int floor_abs, bool signed_yet) {
        if (i == n) {
            fn(k);
            return;
        }
        for (int x = -kmax; x <= kmax; ++x) {
            if (std::abs(x) < floor_abs) continue;
            if (!signed_yet && x < 0) continue;
            k[i] = x;
            rec(i + 1, std::abs(x), signed_yet || x != 0);
        }
    };
    rec(0, 0, false);
}

struct LiftStats {
    long long work_items = 0;
    long long tuples = 0;
    std::vector<double> tail_energy;
};

namespace detail {

// Neumaier-compensated accumulator.
struct Accum {
    double sum = 0, comp = 0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Pairwise sum of equal-length vectors in index order.
inline std::vector<double> pairwise_sum(const std::vector<const std::vector<double>*>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return *parts[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    auto a = pairwise_sum(parts, lo, mid);
    auto b = pairwise_sum(parts, mid, hi);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

}  // namespace detail

struct WorkItem {
    Word word;
    std::vector<int> sigma;
    int term = 0;
    OrderedForestTerm forest;
};

// Lift a windowed path. Level 1 is assembled like the higher levels (sum of
// band increments), so Chen holds between all levels by construction.
inline RoughPath lift(const SampledPath& path, LiftConfig cfg, LiftStats* stats = nullptr) {
    cfg = validate(cfg, path);
    const int M = path.size(), d = path.dim();
    RoughPath rp;
    rp.alpha = cfg.alpha;
    rp.N = cfg.levels;
    rp.dim = d;
    rp.grid_index = coarse_indices(M, cfg.window_margin, cfg.coarse);
    for (int i : rp.grid_index) rp.grid_times.push_back(path.time(i));
    const int G = rp.G();

    DyadicPartition sharp(PartitionKind::Sharp, cfg.kmax);
    BandDecomposition dec = decompose(path, sharp);
    BandTable table = cfg.composite ? BandTable(dec.spectra, DyadicPartition(PartitionKind::Smooth, cfg.kmax + 1), sharp)
                                    : BandTable(dec);
    GridEvaluator ev(M, path.dt, rp.grid_index);
    if (stats) stats->tail_energy = dec.tail_energy;

    std::vector<WorkItem> items;
    for (int n = 1; n <= cfg.levels; ++n)
        for (auto& w : all_words(d, n))
            for (auto& sigma : all_permutations(n)) {
                auto pg = permutation_graph(n, sigma, w);
                for (std::size_t j = 0; j < pg.terms.size(); ++j) items.push_back({w, sigma, static_cast<int>(j), pg.terms[j]});
            }

    std::vector<std::vector<double>> results(items.size());
    std::vector<long long> tuple_counts(items.size(), 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;

    auto run_item = [&](std::size_t idx) {
        const WorkItem& it = items[idx];
        const int n = static_cast<int>(it.word.size());
        const auto& f = it.forest.forest;
        const auto& order = it.forest.order;
        TreeIntegrator ti(table, ev, cfg.scheme);
        std::vector<detail::Accum> acc(static_cast<std::size_t>(G) * G);
        long long count = 0;
        std::vector<int> current;
        try {
            for_each_canonical_tuple(n, cfg.kmax, [&](const std::vector<int>& kt) {
                current = kt;
                const bool all_zero = std::all_of(kt.begin(), kt.end(), [](int x) { return x == 0; });
                const double w = (cfg.tie_weights ? tie_weight(kt) : 1.0) * (all_zero ? 1.0 : 2.0) * it.forest.sign;
                // Smooth refinements of the sharp tuple (just kt itself otherwise).
                std::vector<std::vector<int>> choices(n);
                for (int v = 0; v < n; ++v)
                    choices[v] = cfg.composite ? BandTable::composite_partners(kt[v]) : std::vector<int>{kt[v]};
                std::vector<int> pick(n, 0);
                while (true) {
                    BandAssignment a;
                    bool mono = true;
                    int prev = 0;
                    for (int v = 0; v < n; ++v) {
                        int k = choices[v][pick[v]];
                        if (std::abs(k) < prev) mono = false;
                        prev = std::max(prev, std::abs(k));
                        a[v + 1] = {k, kt[v]};
                    }
                    if (mono) {
                        PairMatrix r = ti.integral(f, order, a);
                        ++count;
                        for (std::size_t q = 0; q < r.a.size(); ++q) acc[q].add(w * r.a[q].real());
                    }
                    int v = 0;
                    while (v < n && ++pick[v] == static_cast<int>(choices[v].size())) pick[v++] = 0;
                    if (v == n) break;
                }
            });
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "lift failed for word (";
            for (std::size_t i = 0; i < it.word.size(); ++i) os << (i ? "," : "") << it.word[i];
            os << "), sigma (";
            for (std::size_t i = 0; i < it.sigma.size(); ++i) os << (i ? "," : "") << it.sigma[i];
            os << "), term " << it.term << ", k (";
            for (std::size_t i = 0; i < current.size(); ++i) os << (i ? "," : "") << current[i];
            os << "): " << e.what();
            throw std::runtime_error(os.str());
        }
        std::vector<double> out(acc.size());
        for (std::size_t q = 0; q < acc.size(); ++q) out[q] = acc[q].value();
        results[idx] = std::move(out);
        tuple_counts[idx] = count;
    };

    auto worker = [&]() {
        while (true) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= items.size()) return;
            {
                std::lock_guard<std::mutex> lock(fail_mu);
                if (failure) return;
            }
            try {
                run_item(idx);
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const int nthreads = std::min<int>(cfg.threads, static_cast<int>(items.size()));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Deterministic reduction per word, in work-item order.
    std::map<Word, std::vector<const std::vector<double>*>> per_word;
    for (std::size_t i = 0; i < items.size(); ++i) per_word[items[i].word].push_back(&results[i]);
    for (auto& [w, parts] : per_word) rp.levels[w] = detail::pairwise_sum(parts, 0, parts.size());
    if (stats) {
        stats->work_items = static_cast<long long>(items.size());
        for (auto c : tuple_counts) stats->tuples += c;
    }
    return rp;
}

// Canonical lift by nested trapezoid quadrature on the fine grid, evaluated
// on the same coarse grid as rp_template.
inline RoughPath canonical_lift(const SampledPath& path, int N, const std::vector<int>& grid_index, double alpha = 0) {
    RoughPath rp;
    rp.alpha = alpha;
    rp.N = N;
    rp.dim = path.dim();
    rp.grid_index = grid_index;
    for (int i : grid_index) rp.grid_times.push_back(path.time(i));
    const int G = rp.G();
    for (int n = 1; n <= N; ++n)
        for (auto& w : all_words(path.dim(), n)) {
            std::vector<double> m(static_cast<std::size_t>(G) * G);
            for (int s = 0; s < G; ++s) {
                auto h = trunk_cumulative(w, path.channels, grid_index[s]);
                for (int t = 0; t < G; ++t) m[static_cast<std::size_t>(t) * G + s] = h[grid_index[t]];
            }
            rp.levels[w] = std::move(m);
        }
    return rp;
}

// Single value: I_word(Gamma)_{ts} between fine-grid indices.
inline double canonical_lift(const SampledPath& path, const Word& word, int s, int t) {
    return trunk_cumulative(word, path.channels, s)[t];
}

// ---------------------------------------------------------------- checks

inline double level_scale(const RoughPath& rp) {
    double mx = 0;
    for (auto& [_, m] : rp.levels)
        for (double v : m) mx = std::max(mx, std::abs(v));
    return 1.0 + mx;
}

struct Defect {
    double value = 0;    // normalized residual
    double absolute = 0;
    Word word;           // where the max occurs
    int t = 0, u = 0, s = 0;
};

// max |X_ts - X_tu - X_us - sum_{k=1}^{n-1} X_tu(w_1..w_k) X_us(w_{k+1}..w_n)|
// over words and coarse triples s < u < t, divided by 1 + max |X|.
inline Defect chen_defect(const RoughPath& rp) {
    Defect d;
    const int G = rp.G();
    for (auto& [w, m] : rp.levels) {
        const int n = static_cast<int>(w.size());
        for (int s = 0; s < G; ++s)
            for (int u = s + 1; u < G; ++u)
                for (int t = u + 1; t < G; ++t) {
                    double r = rp.at(w, t, s) - rp.at(w, t, u) - rp.at(w, u, s);
                    for (int k = 1; k < n; ++k) {
                        Word a(w.begin(), w.begin() + k), b(w.begin() + k, w.end());
                        r -= rp.at(a, t, u) * rp.at(b, u, s);
                    }
                    if (std::abs(r) > d.absolute) {
                        d.absolute = std::abs(r);
                        d.word = w;
                        d.t = t;
                        d.u = u;
                        d.s = s;
                    }
                }
    }
    d.value = d.absolute / level_scale(rp);
    return d;
}

// max |X(a) X(b) - sum_{c in Sh(a,b)} X(c)| over nonempty word pairs with
// |a| + |b| <= N and all coarse pairs, divided by 1 + max |X|.
inline Defect shuffle_defect(const RoughPath& rp) {
    Defect d;
    const int G = rp.G();
    for (int n1 = 1; n1 < rp.N; ++n1)
        for (int n2 = 1; n1 + n2 <= rp.N; ++n2)
            for (auto& a : all_words(rp.dim, n1))
                for (auto& b : all_words(rp.dim, n2)) {
                    auto sh = shuffles(a, b);
                    for (int t = 0; t < G; ++t)
                        for (int s = 0; s < G; ++s) {
                            double r = rp.at(a, t, s) * rp.at(b, t, s);
                            for (auto& c : sh) r -= rp.at(c, t, s);
                            if (std::abs(r) > d.absolute) {
                                d.absolute = std::abs(r);
                                d.word = a;
                                d.word.push_back(0);
                                d.word.insert(d.word.end(), b.begin(), b.end());
                                d.t = t;
                                d.s = s;
                            }
                        }
                }
    d.value = d.absolute / level_scale(rp);
    return d;
}

struct SlopeFit {
    double slope = 0;
    double residual = 0;  // rms of the log-log fit
    std::vector<double> gaps, sups;
};

// Least-squares slope of log sup_{s, |w| = n} |X_{s+h,s}| against log h over
// gaps h = 1, 2, 4, ... coarse steps. Requires at least 4 gaps.
inline SlopeFit hoelder_slope(const RoughPath& rp, int n, int max_gap_steps = 0) {
    const int G = rp.G();
    if (max_gap_steps <= 0) max_gap_steps = (G - 1) / 2;
    SlopeFit fit;
    for (int h = 1; h <= max_gap_steps && h < G; h *= 2) {
        double sup = 0;
        for (auto& [w, m] : rp.levels) {
            if (static_cast<int>(w.size()) != n) continue;
            for (int s = 0; s + h < G; ++s) sup = std::max(sup, std::abs(rp.at(w, s + h, s)));
        }
        fit.gaps.push_back(rp.grid_times[h] - rp.grid_times[0]);
        fit.sups.push_back(sup);
    }
    if (fit.gaps.size() < 4) throw std::invalid_argument("hoelder_slope: fewer than 4 ladder points");
    const std::size_t k = fit.gaps.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(fit.sups[i] > 0)) throw std::invalid_argument("hoelder_slope: vanishing level");
        double x = std::log(fit.gaps[i]), y = std::log(fit.sups[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    double b = (sy - fit.slope * sx) / k, ss = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double e = std::log(fit.sups[i]) - (fit.slope * std::log(fit.gaps[i]) + b);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / k);
    return fit;
}

// ---------------------------------------------------------------- I/O

inline std::string word_text(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s;
}

inline Word parse_word(const std::string& s) {
    Word w;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t pos = 0;
        int v = std::stoi(part, &pos);
        if (pos != part.size() || v < 1) throw std::invalid_argument("bad word key: " + s);
        w.push_back(v);
    }
    if (w.empty()) throw std::invalid_argument("empty word key");
    return w;
}

inline const char* kRoughPathSchema = "fno.roughpath/1";

// {schema, alpha, N, dim, grid_index, grid_times, levels: {"i1,..,in": [[row t]...]}}
inline nlohmann::json to_json(const RoughPath& rp) {
    nlohmann::json j;
    j["schema"] = kRoughPathSchema;
    j["alpha"] = rp.alpha;
    j["N"] = rp.N;
    j["dim"] = rp.dim;
    j["grid_index"] = rp.grid_index;
    j["grid_times"] = rp.grid_times;
    nlohmann::json lv = nlohmann::json::object();
    const int G = rp.G();
    for (auto& [w, m] : rp.levels) {
        nlohmann::json rows = nlohmann::json::array();
        for (int t = 0; t < G; ++t) rows.push_back(std::vector<double>(m.begin() + t * G, m.begin() + (t + 1) * G));
        lv[word_text(w)] = rows;
    }
    j["levels"] = lv;
    return j;
}

// Throws std::invalid_argument on any schema violation.
inline RoughPath from_json(const nlohmann::json& j) {
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("rough path JSON lacks '") + key + "'");
        return j.at(key);
    };
    RoughPath rp;
    try {
        if (need("schema").get<std::string>() != kRoughPathSchema) throw std::invalid_argument("unsupported schema");
        rp.alpha = need("alpha").get<double>();
        rp.N = need("N").get<int>();
        rp.dim = need("dim").get<int>();
        rp.grid_index = need("grid_index").get<std::vector<int>>();
        rp.grid_times = need("grid_times").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("rough path JSON: ") + e.what());
    }
    const int G = rp.G();
    if (G < 2 || static_cast<int>(rp.grid_times.size()) != G) throw std::invalid_argument("inconsistent grid");
    if (rp.N < 1 || rp.dim < 1) throw std::invalid_argument("N and dim must be positive");
    const auto& lv = need("levels");
    if (!lv.is_object() || lv.empty()) throw std::invalid_argument("rough path JSON has no levels");
    for (auto it = lv.begin(); it != lv.end(); ++it) {
        Word w = parse_word(it.key());
        if (static_cast<int>(w.size()) > rp.N) throw std::invalid_argument("word longer than N: " + it.key());
        for (int c : w)
            if (c > rp.dim) throw std::invalid_argument("letter exceeds dim in " + it.key());
        std::vector<double> m;
        if (!it.value().is_array() || static_cast<int>(it.value().size()) != G)
            throw std::invalid_argument("level matrix has wrong row count: " + it.key());
        for (auto& row : it.value()) {
            if (!row.is_array() || static_cast<int>(row.size()) != G)
                throw std::invalid_argument("level matrix has wrong column count: " + it.key());
            for (auto& v : row) {
                if (!v.is_number()) throw std::invalid_argument("non-numeric entry in " + it.key());
                m.push_back(v.get<double>());
            }
        }
        rp.levels[w] = std::move(m);
    }
    for (int n = 1; n <= rp.N; ++n)
        for (auto& w : all_words(rp.dim, n))
            if (!rp.levels.count(w)) throw std::invalid_argument("missing word " + word_text(w));
    return rp;
}

// Flat CSV: word,t_index,s_index,t,s,value
inline void write_csv(std::ostream& os, const RoughPath& rp) {
    os << "word,t_index,s_index,t,s,value\n";
    char buf[128];
    for (auto& [w, m] : rp.levels)
        for (int t = 0; t < rp.G(); ++t)
            for (int s = 0; s < rp.G(); ++s) {
                std::snprintf(buf, sizeof buf, ",%d,%d,%.17g,%.17g,%.17g\n", t, s, rp.grid_times[t], rp.grid_times[s],
                              m[static_cast<std::size_t>(t) * rp.G() + s]);
                os << '"' << word_text(w) << '"' << buf;
            }
}

}  // namespace fno
