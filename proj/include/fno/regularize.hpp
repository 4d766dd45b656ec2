#pragma once

// Regularization scheme: admissible block tuples, the cone bound, and
// regularized skeleton / tree integrals for one block tuple at a time.

#include <fno/spectral.hpp>
#include <fno/tree.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace fno {

using BlockTuple = std::map<int, int>;  // vertex id -> block index k

enum class SchemeKind { Regularized, Full };

struct RegScheme {
    SchemeKind kind = SchemeKind::Regularized;
    int kmax = 0;
    bool tie_weights = true;
    bool composite = false;  // smooth blocks inside sharp blocks
};

// |a| <= |b| - log2(10) - log2(V), decided exactly: 10 V 2^|a| <= 2^|b|.
inline bool margin_ok(int a, int b, int nverts) {
    return 10.0 * nverts * std::ldexp(1.0, std::abs(a)) <= std::ldexp(1.0, std::abs(b));
}

inline bool opposite(int a, int b) { return static_cast<long long>(a) * b < 0; }

// Membership in the regularized domain for a tree with a compatible order.
// Block 0 carries no sign, so the sign conditions never fire for it.
inline bool zreg_contains_tree(const DecoratedForest& t, const TotalOrder& order, const BlockTuple& k) {
    const int nv = t.size();
    if (nv == 1) return true;
    const auto ids = t.ids();
    for (int v : ids)
        for (int w : ids)
            if (order.at(v) < order.at(w) && std::abs(k.at(v)) > std::abs(k.at(w))) return false;
    Structure s = structure_queries(t, order);
    for (int v : ids)
        for (int w : s.leaf_set.at(v))
            if (opposite(k.at(w), k.at(v)) && !margin_ok(k.at(v), k.at(w), nv)) return false;
    for (int n : s.nodes) {
        const int top = s.w_max.at(n);
        for (int c : t.children(n)) {
            const int w = s.w_max.at(c);
            if (opposite(k.at(w), k.at(top)) && !margin_ok(k.at(w), k.at(top), nv)) return false;
        }
    }
    return true;
}

// Forests: every component must belong to its own domain.
inline bool zreg_contains(const DecoratedForest& f, const TotalOrder& order, const BlockTuple& k) {
    for (auto& c : f.components())
        if (!zreg_contains_tree(c, restrict_order(order, c), k)) return false;
    return true;
}

// (v above w) implies |k_v| >= |k_w|.
inline bool zplus_contains(const DecoratedForest& f, const BlockTuple& k) {
    for (int v : f.ids())
        for (int w : f.ids())
            if (f.connects_to(v, w) && std::abs(k.at(v)) < std::abs(k.at(w))) return false;
    return true;
}

inline bool scheme_contains(const DecoratedForest& f, const TotalOrder& order, const BlockTuple& k, SchemeKind kind) {
    return kind == SchemeKind::Full ? zplus_contains(f, k) : zreg_contains(f, order, k);
}

// All tuples with |k_v| <= K_max in the regularized domain, lexicographic in
// the order-sorted vertex sequence.
inline std::vector<BlockTuple> zreg_enumerate(const DecoratedForest& t, const TotalOrder& order, const RegScheme& scheme) {
    std::vector<int> seq(t.size());
    for (auto& [v, p] : order) seq[p - 1] = v;
    std::vector<BlockTuple> out;
    BlockTuple k;
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int floor_abs) {
        if (i == seq.size()) {
            if (scheme_contains(t, order, k, scheme.kind)) out.push_back(k);
            return;
        }
        for (int x = -scheme.kmax; x <= scheme.kmax; ++x) {
            // Condition (i) prunes early in the regularized scheme.
            if (scheme.kind == SchemeKind::Regularized && t.size() > 1 && std::abs(x) < floor_abs) continue;
            k[seq[i]] = x;
            rec(i + 1, std::max(floor_abs, std::abs(x)));
        }
        k.erase(seq[i]);
    };
    rec(0, 0);
    return out;
}

// 1 / prod (multiplicity of each |k| value)!
inline double tie_weight(const std::vector<int>& ks) {
    std::map<int, int> mult;
    for (int k : ks) ++mult[std::abs(k)];
    double w = 1.0;
    for (auto& [_, m] : mult)
        for (int i = 2; i <= m; ++i) w /= i;
    return w;
}

// ---------------------------------------------------------------- cone bound

struct ConeCheck {
    bool upper = true;  // factor * |xi_wmax(v)| >= |xi_v + sum_{w above v} xi_w|
    bool lower = true;  // |xi_v + sum| > |xi_wmax(v)| / 2
    int vertex = 0;     // first offending vertex, 0 when both hold
};

// upper_factor defaults to |V(T)|, the constant in the lemma.
inline ConeCheck check_cone_bound(const DecoratedForest& t, const TotalOrder& order, const std::map<int, double>& xi,
                                  double upper_factor = 0) {
    if (upper_factor <= 0) upper_factor = t.size();
    Structure s = structure_queries(t, order);
    ConeCheck r;
    for (int v : t.ids()) {
        double sum = xi.at(v);
        for (int w : t.above(v)) sum += xi.at(w);
        const double top = std::abs(xi.at(s.w_max.at(v)));
        bool up = upper_factor * top >= std::abs(sum);
        bool lo = std::abs(sum) > 0.5 * top;
        if ((!up || !lo) && r.vertex == 0) r.vertex = v;
        r.upper = r.upper && up;
        r.lower = r.lower && lo;
    }
    return r;
}

// ---------------------------------------------------------------- integrator

// Square coarse-grid matrix, row t, column s.
struct PairMatrix {
    int n = 0;
    std::vector<cplx> a;
    PairMatrix() = default;
    explicit PairMatrix(int g) : n(g), a(static_cast<std::size_t>(g) * g) {}
    cplx& operator()(int t, int s) { return a[static_cast<std::size_t>(t) * n + s]; }
    cplx operator()(int t, int s) const { return a[static_cast<std::size_t>(t) * n + s]; }
};

// Evaluates regularized tree integrals R^k I_T for one block assignment:
//   R I_T(t,s) = 1_T (S_T(t) - S_T(s)) - sum_cuts R I_Roo(t,s) 1_Lea S_Lea(s)
// where 1_X is the membership indicator of the restricted tuple. Results for
// sub-pieces are memoized; call reset() between unrelated forests.
class TreeIntegrator {
public:
    TreeIntegrator(const BandTable& bt, const GridEvaluator& ev, SchemeKind kind)
        : bt_(bt), ev_(ev), kind_(kind), g_(ev.size()) {}

    void reset() {
        spectra_.clear();
        values_.clear();
        integrals_.clear();
        indicators_.clear();
    }

    SchemeKind kind() const { return kind_; }
    int grid_size() const { return g_; }

    bool indicator(const DecoratedForest& f, const TotalOrder& order, const BandAssignment& k) {
        auto key = make_key(f, k);
        auto it = indicators_.find(key);
        if (it != indicators_.end()) return it->second;
        BlockTuple bk;
        for (int v : f.ids()) bk[v] = k.at(v).k;
        bool r = scheme_contains(f, restrict_order(order, f), bk, kind_);
        indicators_.emplace(std::move(key), r);
        return r;
    }

    // Skeleton values at the evaluator's indices (product over components).
    std::vector<cplx> skeleton_values(const DecoratedForest& f, const BandAssignment& k) {
        std::vector<cplx> out(g_, 1.0);
        for (auto& c : f.components()) {
            const auto& v = tree_values(c, k);
            for (int i = 0; i < g_; ++i) out[i] *= v[i];
        }
        return out;
    }

    // Regularized integral of a forest (product of components); for a tree,
    // optionally returns the increment and boundary parts.
    PairMatrix integral(const DecoratedForest& f, const TotalOrder& order, const BandAssignment& k,
                        PairMatrix* increment = nullptr, PairMatrix* boundary = nullptr) {
        auto comps = f.components();
        if (comps.size() == 1) return tree_integral(comps[0], order, k, increment, boundary);
        if (increment || boundary) throw std::invalid_argument("increment/boundary split is defined for trees only");
        PairMatrix out(g_);
        std::fill(out.a.begin(), out.a.end(), cplx(1.0));
        for (auto& c : comps) {
            const PairMatrix& m = tree_integral_cached(c, order, k);
            for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] *= m.a[i];
        }
        return out;
    }

    // Non-recursive form: sum over multiple cuts with sign (-1)^{sum |v_j|}.
    PairMatrix integral_multicut(const DecoratedForest& t, const TotalOrder& order, const BandAssignment& k) {
        if (!t.is_tree()) throw std::invalid_argument("integral_multicut: expects a tree");
        PairMatrix out(g_);
        add_increment(out, t, order, k, 1.0, std::vector<cplx>(g_, 1.0));
        for (auto& mc : multiple_cuts(t)) {
            auto pieces = chop(t, mc);
            int count = 0;
            for (auto& lv : mc.levels) count += static_cast<int>(lv.size());
            std::vector<cplx> weight(g_, 1.0);
            bool zero = false;
            for (auto& piece : pieces.leaves) {
                if (!indicator(piece, order, k)) {
                    zero = true;
                    break;
                }
                auto v = skeleton_values(piece, k);
                for (int i = 0; i < g_; ++i) weight[i] *= v[i];
            }
            if (zero) continue;
            add_increment(out, pieces.root_part, order, k, (count % 2 ? -1.0 : 1.0), weight);
        }
        return out;
    }

private:
    using Key = std::vector<int>;

    Key make_key(const DecoratedForest& f, const BandAssignment& k) const {
        Key key;
        key.reserve(f.size() * 5);
        for (int v : f.ids()) {
            const BandKey& b = k.at(v);
            key.insert(key.end(), {v, f.parent(v), f.label(v), b.k, b.kt});
        }
        return key;
    }

    // out(t,s) += sign * 1_T (S(t) - S(s)) * weight(s)
    void add_increment(PairMatrix& out, const DecoratedForest& t, const TotalOrder& order, const BandAssignment& k,
                       double sign, const std::vector<cplx>& weight) {
        if (!indicator(t, order, k)) return;
        const auto& s = tree_values(t, k);
        for (int a = 0; a < g_; ++a)
            for (int b = 0; b < g_; ++b) out(a, b) += sign * (s[a] - s[b]) * weight[b];
    }

    const QuasiSpectrum& subtree_spectrum(const DecoratedForest& t, int v, const BandAssignment& k) {
        std::set<int> keep{v};
        for (int w : t.above(v)) keep.insert(w);
        DecoratedForest sub = t.induced(keep);
        auto key = make_key(sub, k);
        auto it = spectra_.find(key);
        if (it != spectra_.end()) return it->second;
        QuasiSpectrum c = QuasiSpectrum::constant(1.0);
        for (int ch : t.children(v)) {
            c = multiply(c, subtree_spectrum(t, ch, k));
            if (c.empty()) break;
        }
        QuasiSpectrum out = vertex_rule(bt_.get(t.label(v) - 1, k.at(v)), c, bt_.grid().omega0());
        return spectra_.emplace(std::move(key), std::move(out)).first->second;
    }

    const std::vector<cplx>& tree_values(const DecoratedForest& t, const BandAssignment& k) {
        auto key = make_key(t, k);
        auto it = values_.find(key);
        if (it != values_.end()) return it->second;
        std::vector<cplx> v = ev_(subtree_spectrum(t, t.root(), k));
        return values_.emplace(std::move(key), std::move(v)).first->second;
    }

    const PairMatrix& tree_integral_cached(const DecoratedForest& t, const TotalOrder& order, const BandAssignment& k) {
        auto key = make_key(t, k);
        auto it = integrals_.find(key);
        if (it != integrals_.end()) return it->second;
        PairMatrix m = tree_integral(t, order, k, nullptr, nullptr);
        return integrals_.emplace(std::move(key), std::move(m)).first->second;
    }

    PairMatrix tree_integral(const DecoratedForest& t, const TotalOrder& order, const BandAssignment& k,
                             PairMatrix* increment, PairMatrix* boundary) {
        PairMatrix inc(g_), bnd(g_);
        add_increment(inc, t, order, k, 1.0, std::vector<cplx>(g_, 1.0));
        for (auto& cut : admissible_cuts(t)) {
            auto [roo, lea] = split(t, cut);
            if (!indicator(lea, order, k)) continue;
            auto sl = skeleton_values(lea, k);
            const PairMatrix& r = tree_integral_cached(roo, order, k);
            for (int a = 0; a < g_; ++a)
                for (int b = 0; b < g_; ++b) bnd(a, b) -= r(a, b) * sl[b];
        }
        PairMatrix out(g_);
        for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = inc.a[i] + bnd.a[i];
        if (increment) *increment = std::move(inc);
        if (boundary) *boundary = std::move(bnd);
        return out;
    }

    const BandTable& bt_;
    const GridEvaluator& ev_;
    SchemeKind kind_;
    int g_;
    std::map<Key, QuasiSpectrum> spectra_;
    std::map<Key, std::vector<cplx>> values_;
    std::map<Key, PairMatrix> integrals_;
    std::map<Key, bool> indicators_;
};

// Sum over the scheme's tuples (|k_v| <= K_max, order-monotone) of the
// skeleton values, with tie weights; deterministic enumeration order.
inline std::vector<cplx> regularized_skeleton(const DecoratedForest& t, const TotalOrder& order, const BandTable& bt,
                                              const RegScheme& scheme, const GridEvaluator& ev) {
    TreeIntegrator ti(bt, ev, scheme.kind);
    std::vector<cplx> out(ev.size());
    std::vector<int> seq(t.size());
    for (auto& [v, p] : order) seq[p - 1] = v;
    for (auto& k : zreg_enumerate(t, order, RegScheme{SchemeKind::Full, scheme.kmax, false, false})) {
        bool mono = true;
        for (std::size_t i = 1; i < seq.size(); ++i)
            if (std::abs(k.at(seq[i])) < std::abs(k.at(seq[i - 1]))) mono = false;
        if (!mono) continue;
        if (!scheme_contains(t, order, k, scheme.kind)) continue;
        BandAssignment a;
        std::vector<int> ks;
        for (auto& [v, x] : k) {
            a[v] = {x, x};
            ks.push_back(x);
        }
        const double w = scheme.tie_weights ? tie_weight(ks) : 1.0;
        auto v = ti.skeleton_values(t, a);
        for (int i = 0; i < ev.size(); ++i) out[i] += w * v[i];
    }
    return out;
}

}  // namespace fno
