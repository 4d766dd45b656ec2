#pragma once

// Decorated rooted forests, total orders, admissible cuts and the structural
// queries used by the regularization scheme.
//
// Vertices carry stable integer ids (>= 1) that survive cuts and renamings.
// `v ->> w` ("v connects to w") means w is a strict ancestor of v.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fno {

class DecoratedForest {
public:
    struct Vertex {
        int id;
        int parent;  // 0 for roots
        int label;
    };

    DecoratedForest() = default;

    static DecoratedForest single(int label, int id = 1) {
        DecoratedForest f;
        f.add_vertex(id, label, 0);
        return f;
    }

    // Adds a vertex; the parent (if nonzero) must already exist.
    void add_vertex(int id, int label, int parent = 0) {
        if (id <= 0) throw std::invalid_argument("vertex ids must be positive");
        if (label <= 0) throw std::invalid_argument("decorations must be positive");
        if (index_.count(id)) throw std::invalid_argument("duplicate vertex id " + std::to_string(id));
        if (parent != 0 && !index_.count(parent))
            throw std::invalid_argument("unknown parent " + std::to_string(parent));
        index_[id] = verts_.size();
        verts_.push_back({id, parent, label});
    }

    bool empty() const { return verts_.empty(); }
    int size() const { return static_cast<int>(verts_.size()); }
    bool contains(int id) const { return index_.count(id) != 0; }

    std::vector<int> ids() const {
        std::vector<int> out;
        out.reserve(verts_.size());
        for (auto& [id, _] : index_) out.push_back(id);
        return out;
    }

    const Vertex& vertex(int id) const { return verts_.at(index_.at(id)); }
    int parent(int id) const { return vertex(id).parent; }
    int label(int id) const { return vertex(id).label; }
    bool is_root(int id) const { return parent(id) == 0; }

    std::vector<int> children(int id) const {
        std::vector<int> out;
        for (auto& [vid, i] : index_)
            if (verts_[i].parent == id) out.push_back(vid);
        return out;
    }

    std::vector<int> roots() const { return children(0); }
    bool is_tree() const { return roots().size() == 1; }

    int root() const {
        auto r = roots();
        if (r.size() != 1) throw std::invalid_argument("forest is not a single tree");
        return r.front();
    }

    // v ->> w : w is a strict ancestor of v.
    bool connects_to(int v, int w) const {
        for (int p = parent(v); p != 0; p = parent(p))
            if (p == w) return true;
        return false;
    }

    bool comparable(int a, int b) const { return a == b || connects_to(a, b) || connects_to(b, a); }

    // All vertices w with w ->> v.
    std::vector<int> above(int v) const {
        std::vector<int> out;
        for (int w : ids())
            if (connects_to(w, v)) out.push_back(w);
        return out;
    }

    // Induced subforest; vertices whose parent is dropped become roots.
    DecoratedForest induced(const std::set<int>& keep) const {
        DecoratedForest f;
        // Insert parents before children: ancestors first by depth.
        std::vector<std::pair<int, int>> by_depth;
        for (int id : keep) by_depth.push_back({depth(id), id});
        std::sort(by_depth.begin(), by_depth.end());
        for (auto& [_, id] : by_depth) {
            int direct = keep.count(parent(id)) ? parent(id) : 0;
            f.add_vertex(id, label(id), direct);
        }
        return f;
    }

    int depth(int id) const {
        int d = 0;
        for (int p = parent(id); p != 0; p = parent(p)) ++d;
        return d;
    }

    // Connected components, each as a tree, ordered by root id.
    std::vector<DecoratedForest> components() const {
        std::vector<DecoratedForest> out;
        for (int r : roots()) {
            std::set<int> keep{r};
            for (int w : above(r)) keep.insert(w);
            out.push_back(induced(keep));
        }
        return out;
    }

    // Disjoint union; ids must not collide.
    DecoratedForest joined(const DecoratedForest& other) const {
        DecoratedForest f = *this;
        std::vector<std::pair<int, int>> by_depth;
        for (int id : other.ids()) by_depth.push_back({other.depth(id), id});
        std::sort(by_depth.begin(), by_depth.end());
        for (auto& [_, id] : by_depth) f.add_vertex(id, other.label(id), other.parent(id));
        return f;
    }

    // Same forest with ids shifted by `offset`.
    DecoratedForest shifted(int offset) const {
        DecoratedForest f;
        std::vector<std::pair<int, int>> by_depth;
        for (int id : ids()) by_depth.push_back({depth(id), id});
        std::sort(by_depth.begin(), by_depth.end());
        for (auto& [_, id] : by_depth) {
            int p = parent(id);
            f.add_vertex(id + offset, label(id), p == 0 ? 0 : p + offset);
        }
        return f;
    }

    int max_id() const { return index_.empty() ? 0 : index_.rbegin()->first; }

private:
    std::vector<Vertex> verts_;
    std::map<int, std::size_t> index_;
};

// ---------------------------------------------------------------- text format

namespace detail {

inline std::string tree_text(const DecoratedForest& f, int v, bool canonical) {
    std::string s = std::to_string(f.label(v));
    auto ch = f.children(v);
    if (ch.empty()) return s;
    std::vector<std::string> parts;
    for (int c : ch) parts.push_back(tree_text(f, c, canonical));
    if (canonical) std::sort(parts.begin(), parts.end());
    s += '(';
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ',';
        s += parts[i];
    }
    s += ')';
    return s;
}

}  // namespace detail

// Children and components in id order. Inverse of parse_forest.
inline std::string to_text(const DecoratedForest& f) {
    if (f.empty()) return "e";
    std::string s;
    for (int r : f.roots()) {
        if (!s.empty()) s += ' ';
        s += detail::tree_text(f, r, false);
    }
    return s;
}

// Order-independent form: equal strings iff the forests are isomorphic as
// decorated forests.
inline std::string canonical_text(const DecoratedForest& f) {
    if (f.empty()) return "e";
    std::vector<std::string> parts;
    for (int r : f.roots()) parts.push_back(detail::tree_text(f, r, true));
    std::sort(parts.begin(), parts.end());
    std::string s;
    for (auto& p : parts) {
        if (!s.empty()) s += ' ';
        s += p;
    }
    return s;
}

// Parses "1(2,3) 4"; ids are assigned in preorder starting at 1. "e" is the
// empty forest.
inline DecoratedForest parse_forest(const std::string& text) {
    DecoratedForest f;
    if (text == "e") return f;
    std::size_t pos = 0;
    int next_id = 1;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("forest text '" + text + "' at " + std::to_string(pos) + ": " + why);
    };
    auto read_label = [&]() {
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) fail("expected label");
        return std::stoi(text.substr(start, pos - start));
    };
    auto parse_tree = [&](auto&& self, int parent) -> void {
        int id = next_id++;
        f.add_vertex(id, read_label(), parent);
        if (pos < text.size() && text[pos] == '(') {
            ++pos;
            self(self, id);
            while (pos < text.size() && text[pos] == ',') {
                ++pos;
                self(self, id);
            }
            if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
            ++pos;
        }
    };
    while (true) {
        parse_tree(parse_tree, 0);
        if (pos == text.size()) break;
        if (text[pos] != ' ') fail("expected ' ' between trees");
        ++pos;
    }
    return f;
}

// Forest with ids renumbered 1..n in canonical preorder.
inline DecoratedForest canonicalize(const DecoratedForest& f) { return parse_forest(canonical_text(f)); }

inline bool same_forest(const DecoratedForest& a, const DecoratedForest& b) {
    return canonical_text(a) == canonical_text(b);
}

// ---------------------------------------------------------------- orders

// order[id] = position in 1..n.
using TotalOrder = std::map<int, int>;

// Order by increasing vertex id, the convention for trunk trees and
// permutation-graph forests.
inline TotalOrder id_order(const DecoratedForest& f) {
    TotalOrder o;
    int k = 1;
    for (int id : f.ids()) o[id] = k++;
    return o;
}

inline bool is_compatible(const DecoratedForest& f, const TotalOrder& o) {
    if (static_cast<int>(o.size()) != f.size()) return false;
    std::set<int> pos;
    for (int id : f.ids()) {
        auto it = o.find(id);
        if (it == o.end()) return false;
        pos.insert(it->second);
    }
    if (static_cast<int>(pos.size()) != f.size() || *pos.begin() != 1 || *pos.rbegin() != f.size()) return false;
    for (int id : f.ids())
        if (f.parent(id) != 0 && o.at(id) <= o.at(f.parent(id))) return false;
    return true;
}

inline TotalOrder restrict_order(const TotalOrder& o, const DecoratedForest& sub) {
    std::vector<std::pair<int, int>> v;
    for (int id : sub.ids()) v.push_back({o.at(id), id});
    std::sort(v.begin(), v.end());
    TotalOrder r;
    for (std::size_t i = 0; i < v.size(); ++i) r[v[i].second] = static_cast<int>(i) + 1;
    return r;
}

// ---------------------------------------------------------------- trunk trees

// Chain n -> n-1 -> ... -> 1 with vertex j decorated labels[j-1]; root is 1.
inline DecoratedForest trunk(int n, const std::vector<int>& labels) {
    if (n <= 0) throw std::invalid_argument("trunk: n must be positive");
    if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("trunk: need n labels");
    DecoratedForest f;
    for (int j = 1; j <= n; ++j) f.add_vertex(j, labels[j - 1], j - 1);
    return f;
}

// ---------------------------------------------------------------- cuts

enum class CutChoice { Empty, Root, Proper };

struct Cut {
    // Cut vertices; for Root choices this holds the component root.
    std::vector<int> chosen;
    // One entry per component (ordered by root id); a single tree always has
    // one Proper entry.
    std::vector<CutChoice> per_component;

    bool operator<(const Cut& o) const { return chosen < o.chosen; }
    bool operator==(const Cut& o) const { return chosen == o.chosen; }
};

struct MultiCut {
    // levels[0] is v_1 (closest to the root), levels.back() is v_l.
    std::vector<std::vector<int>> levels;
};

inline bool is_antichain(const DecoratedForest& f, const std::vector<int>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j)
            if (f.comparable(vs[i], vs[j])) return false;
    return true;
}

namespace detail {

// Nonempty antichains of non-root vertices of a tree, in lexicographic order
// of sorted id lists.
inline std::vector<std::vector<int>> proper_antichains(const DecoratedForest& t) {
    std::vector<int> cand;
    for (int id : t.ids())
        if (!t.is_root(id)) cand.push_back(id);
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == cand.size()) {
            if (!cur.empty()) out.push_back(cur);
            return;
        }
        self(self, i + 1);
        bool ok = true;
        for (int c : cur)
            if (t.comparable(c, cand[i])) {
                ok = false;
                break;
            }
        if (ok) {
            cur.push_back(cand[i]);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

inline std::vector<Cut> admissible_cuts(const DecoratedForest& f) {
    if (f.empty()) throw std::invalid_argument("admissible_cuts: empty forest");
    auto comps = f.components();
    if (comps.size() == 1) {
        std::vector<Cut> out;
        for (auto& a : detail::proper_antichains(f)) out.push_back({a, {CutChoice::Proper}});
        return out;
    }
    // Per component: Empty, Root, or a proper antichain.
    struct Option {
        CutChoice kind;
        std::vector<int> verts;
    };
    std::vector<std::vector<Option>> opts;
    for (auto& c : comps) {
        std::vector<Option> o{{CutChoice::Empty, {}}, {CutChoice::Root, {c.root()}}};
        for (auto& a : detail::proper_antichains(c)) o.push_back({CutChoice::Proper, a});
        opts.push_back(o);
    }
    std::vector<Cut> out;
    std::vector<std::size_t> pick(comps.size(), 0);
    while (true) {
        bool all_empty = true, all_root = true;
        Cut c;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            auto& o = opts[i][pick[i]];
            all_empty &= o.kind == CutChoice::Empty;
            all_root &= o.kind == CutChoice::Root;
            c.per_component.push_back(o.kind);
            c.chosen.insert(c.chosen.end(), o.verts.begin(), o.verts.end());
        }
        if (!all_empty && !all_root) {
            std::sort(c.chosen.begin(), c.chosen.end());
            out.push_back(c);
        }
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == opts[i].size()) pick[i++] = 0;
        if (i == pick.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Cut from an explicit vertex set, validating admissibility.
inline Cut make_cut(const DecoratedForest& f, std::vector<int> chosen) {
    std::sort(chosen.begin(), chosen.end());
    for (int v : chosen)
        if (!f.contains(v)) throw std::invalid_argument("cut vertex " + std::to_string(v) + " not in forest");
    if (chosen.empty()) throw std::invalid_argument("cut must be nonempty");
    if (!is_antichain(f, chosen)) throw std::invalid_argument("cut vertices are comparable (not an antichain)");
    Cut c{chosen, {}};
    auto roots = f.roots();
    if (roots.size() == 1) {
        if (std::find(chosen.begin(), chosen.end(), roots[0]) != chosen.end())
            throw std::invalid_argument("tree cut may not contain the root");
        c.per_component = {CutChoice::Proper};
        return c;
    }
    bool all_empty = true, all_root = true;
    for (int r : roots) {
        bool has_root = std::find(chosen.begin(), chosen.end(), r) != chosen.end();
        bool has_other = false;
        for (int v : chosen)
            if (v != r && f.connects_to(v, r)) has_other = true;
        CutChoice k = has_root ? CutChoice::Root : has_other ? CutChoice::Proper : CutChoice::Empty;
        all_empty &= k == CutChoice::Empty;
        all_root &= k == CutChoice::Root;
        c.per_component.push_back(k);
    }
    if (all_empty || all_root) throw std::invalid_argument("trivial forest cut");
    return c;
}

// Returns (Roo, Lea). Lea holds the cut vertices and everything above them.
inline std::pair<DecoratedForest, DecoratedForest> split(const DecoratedForest& f, const Cut& c) {
    Cut checked = make_cut(f, c.chosen);
    std::set<int> lea;
    for (int v : checked.chosen) {
        lea.insert(v);
        for (int w : f.above(v)) lea.insert(w);
    }
    std::set<int> roo;
    for (int id : f.ids())
        if (!lea.count(id)) roo.insert(id);
    return {f.induced(roo), f.induced(lea)};
}

inline std::pair<DecoratedForest, DecoratedForest> split(const DecoratedForest& f, const std::vector<int>& chosen) {
    return split(f, make_cut(f, chosen));
}

// Level decomposition of every nonempty set of non-root vertices.
inline std::vector<MultiCut> multiple_cuts(const DecoratedForest& t) {
    if (!t.is_tree()) throw std::invalid_argument("multiple_cuts: expects a tree");
    std::vector<int> cand;
    for (int id : t.ids())
        if (!t.is_root(id)) cand.push_back(id);
    std::vector<MultiCut> out;
    const std::size_t n = cand.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<int> sel;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) sel.push_back(cand[i]);
        std::map<int, std::vector<int>> by_level;
        for (int w : sel) {
            int lev = 1;
            for (int w2 : sel)
                if (t.connects_to(w, w2)) ++lev;
            by_level[lev].push_back(w);
        }
        MultiCut mc;
        for (auto& [_, vs] : by_level) mc.levels.push_back(vs);
        out.push_back(mc);
    }
    std::sort(out.begin(), out.end(), [](const MultiCut& a, const MultiCut& b) {
        if (a.levels.size() != b.levels.size()) return a.levels.size() < b.levels.size();
        return a.levels < b.levels;
    });
    return out;
}

// Pieces of a multiple cut v_1 |= ... |= v_l |= V(T):
// leaves[l-1] = Lea_{v_l}(T), leaves[j-1] = Lea_{v_j}(Roo_{v_{j+1}} ... T), and
// the final root part Roo_{v_1}(...).
struct MultiCutPieces {
    DecoratedForest root_part;
    std::vector<DecoratedForest> leaves;  // indexed by level
};

inline MultiCutPieces chop(const DecoratedForest& t, const MultiCut& mc) {
    MultiCutPieces p;
    p.leaves.resize(mc.levels.size());
    DecoratedForest cur = t;
    for (std::size_t j = mc.levels.size(); j-- > 0;) {
        auto [roo, lea] = split(cur, mc.levels[j]);
        p.leaves[j] = lea;
        cur = roo;
    }
    p.root_part = cur;
    return p;
}

// ---------------------------------------------------------------- structure

struct Branch {
    int from;                // leaf or node
    int to;                  // node or root (excluded), 0 when the branch ends at the root itself
    std::vector<int> verts;  // from down to, excluding `to`
};

struct Structure {
    std::vector<int> leaves;
    std::vector<int> nodes;
    std::vector<int> uppermost_nodes;
    std::vector<Branch> branches;
    std::map<int, std::vector<int>> leaf_set;  // Leaf(v): leaves connecting to v
    std::map<int, int> w_max;
};

inline Structure structure_queries(const DecoratedForest& t, const TotalOrder& order) {
    if (!t.is_tree()) throw std::invalid_argument("structure_queries: expects a tree");
    if (!is_compatible(t, order)) throw std::invalid_argument("structure_queries: incompatible total order");
    Structure s;
    std::set<int> node_set;
    for (int id : t.ids()) {
        auto ch = t.children(id);
        if (ch.empty()) s.leaves.push_back(id);
        if (ch.size() >= 2) {
            s.nodes.push_back(id);
            node_set.insert(id);
        }
    }
    for (int n : s.nodes) {
        bool upper = true;
        for (int m : s.nodes)
            if (m != n && t.connects_to(m, n)) upper = false;
        if (upper) s.uppermost_nodes.push_back(n);
    }
    std::vector<int> starts = s.leaves;
    for (int n : s.nodes)
        if (!t.is_root(n)) starts.push_back(n);
    std::sort(starts.begin(), starts.end());
    for (int v1 : starts) {
        Branch b{v1, 0, {v1}};
        int p = t.parent(v1);
        while (p != 0 && !node_set.count(p) && !t.is_root(p)) {
            b.verts.push_back(p);
            p = t.parent(p);
        }
        b.to = p;
        s.branches.push_back(b);
    }
    for (int v : t.ids()) {
        std::vector<int> lv;
        for (int l : s.leaves)
            if (t.connects_to(l, v)) lv.push_back(l);
        s.leaf_set[v] = lv;
        int best = v, best_pos = -1;
        for (int w : t.above(v))
            if (order.at(w) > best_pos) {
                best_pos = order.at(w);
                best = w;
            }
        s.w_max[v] = best;
    }
    return s;
}

// Branch from v1 down to v2 (v1 included, v2 excluded), if it exists.
inline std::vector<int> branch_between(const Structure& s, int v1, int v2) {
    for (auto& b : s.branches)
        if (b.from == v1 && b.to == v2) return b.verts;
    return {};
}

}  // namespace fno
