#pragma once

// Exact arithmetic in the Hopf algebra H of decorated rooted forests and in
// the shuffle algebra Sh (trunk trees read root-to-top as words).
//
// Elements are stored by canonical text; the unit e is the key "e".

#include <fno/tree.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

namespace fno {

using Rational = boost::multiprecision::cpp_rational;

inline const std::string kUnit = "e";

// Integer linear combination of canonical forests. Zero coefficients are
// never stored.
class HopfVector {
public:
    using Map = std::map<std::string, long long>;

    HopfVector() = default;
    explicit HopfVector(const DecoratedForest& f, long long c = 1) { add(canonical_text(f), c); }

    static HopfVector unit() {
        HopfVector h;
        h.add(kUnit, 1);
        return h;
    }
    static HopfVector of(const std::string& text, long long c = 1) { return HopfVector(parse_forest(text), c); }

    void add(const std::string& key, long long c) {
        if (c == 0) return;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(key, c);
            return;
        }
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
    void add(const HopfVector& o, long long scale = 1) {
        for (auto& [k, c] : o.terms_) add(k, c * scale);
    }

    const Map& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    long long coeff(const std::string& key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? 0 : it->second;
    }

    HopfVector operator+(const HopfVector& o) const {
        HopfVector r = *this;
        r.add(o);
        return r;
    }
    HopfVector operator-(const HopfVector& o) const {
        HopfVector r = *this;
        r.add(o, -1);
        return r;
    }
    HopfVector operator*(long long s) const {
        HopfVector r;
        r.add(*this, s);
        return r;
    }
    bool operator==(const HopfVector& o) const { return terms_ == o.terms_; }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto& [k, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += std::to_string(c) + "*[" + k + "]";
        }
        return s;
    }

private:
    Map terms_;
};

// Integer combination of pairs of canonical forests.
class TensorVector {
public:
    using Key = std::pair<std::string, std::string>;
    using Map = std::map<Key, long long>;

    void add(const Key& k, long long c) {
        if (c == 0) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
            return;
        }
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
    void add(const TensorVector& o, long long s = 1) {
        for (auto& [k, c] : o.terms_) add(k, c * s);
    }
    const Map& terms() const { return terms_; }
    bool operator==(const TensorVector& o) const { return terms_ == o.terms_; }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto& [k, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += std::to_string(c) + "*[" + k.first + "]x[" + k.second + "]";
        }
        return s;
    }

private:
    Map terms_;
};

// ---------------------------------------------------------------- product

inline std::string forest_product_key(const std::string& a, const std::string& b) {
    if (a == kUnit) return b;
    if (b == kUnit) return a;
    auto fa = parse_forest(a);
    auto fb = parse_forest(b);
    return canonical_text(fa.joined(fb.shifted(fa.max_id())));
}

inline HopfVector multiply(const HopfVector& x, const HopfVector& y) {
    HopfVector r;
    for (auto& [a, ca] : x.terms())
        for (auto& [b, cb] : y.terms()) r.add(forest_product_key(a, b), ca * cb);
    return r;
}

// m : H (x) H -> H
inline HopfVector multiply(const TensorVector& t) {
    HopfVector r;
    for (auto& [k, c] : t.terms()) r.add(forest_product_key(k.first, k.second), c);
    return r;
}

// ---------------------------------------------------------------- coproduct

// Roo (x) Lea over admissible cuts, plus the two trivial terms.
inline TensorVector coproduct_forest(const std::string& key) {
    TensorVector t;
    if (key == kUnit) {
        t.add({kUnit, kUnit}, 1);
        return t;
    }
    t.add({kUnit, key}, 1);
    t.add({key, kUnit}, 1);
    auto f = parse_forest(key);
    for (auto& c : admissible_cuts(f)) {
        auto [roo, lea] = split(f, c);
        t.add({canonical_text(roo), canonical_text(lea)}, 1);
    }
    return t;
}

inline TensorVector coproduct(const HopfVector& h) {
    TensorVector t;
    for (auto& [k, c] : h.terms()) t.add(coproduct_forest(k), c);
    return t;
}

// (Delta (x) id) and (id (x) Delta), landing in a three-slot map.
using Tensor3 = std::map<std::tuple<std::string, std::string, std::string>, long long>;

inline Tensor3 coproduct_left(const TensorVector& t) {
    Tensor3 r;
    for (auto& [k, c] : t.terms()) {
        const auto d = coproduct_forest(k.first);
        for (auto& [k2, c2] : d.terms()) {
            auto& slot = r[{k2.first, k2.second, k.second}];
            slot += c * c2;
        }
    }
    for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
    return r;
}

inline Tensor3 coproduct_right(const TensorVector& t) {
    Tensor3 r;
    for (auto& [k, c] : t.terms()) {
        const auto d = coproduct_forest(k.second);
        for (auto& [k2, c2] : d.terms()) {
            auto& slot = r[{k.first, k2.first, k2.second}];
            slot += c * c2;
        }
    }
    for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
    return r;
}

// ---------------------------------------------------------------- antipode

namespace detail {

inline std::vector<std::string> component_keys(const std::string& key) {
    std::vector<std::string> out;
    if (key == kUnit) return out;
    for (auto& c : parse_forest(key).components()) out.push_back(canonical_text(c));
    return out;
}

template <class TreeFn>
HopfVector multiplicative_extension(const std::string& key, TreeFn&& on_tree) {
    HopfVector r = HopfVector::unit();
    for (auto& c : component_keys(key)) r = multiply(r, on_tree(c));
    return r;
}

}  // namespace detail

// S(T) = -T - sum_cuts Roo . S(Lea), extended multiplicatively.
class Antipode {
public:
    HopfVector operator()(const HopfVector& h) {
        HopfVector r;
        for (auto& [k, c] : h.terms()) r.add(of_forest(k), c);
        return r;
    }

    HopfVector of_forest(const std::string& key) {
        if (key == kUnit) return HopfVector::unit();
        return detail::multiplicative_extension(key, [this](const std::string& t) { return of_tree(t); });
    }

    HopfVector of_tree(const std::string& key) {
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        HopfVector r;
        r.add(key, -1);
        auto t = parse_forest(key);
        for (auto& c : admissible_cuts(t)) {
            auto [roo, lea] = split(t, c);
            HopfVector term = multiply(HopfVector(roo), of_forest(canonical_text(lea)));
            r.add(term, -1);
        }
        memo_.emplace(key, r);
        return r;
    }

private:
    std::map<std::string, HopfVector> memo_;
};

inline HopfVector antipode(const HopfVector& h) { return Antipode{}(h); }

// Closed multiple-cut form:
// S(T) = -T - sum_{v_1|=...|=v_l} (-1)^{|v_1|+...+|v_l|} Roo . prod Lea pieces.
inline HopfVector antipode_expanded_tree(const DecoratedForest& t) {
    HopfVector r(t, -1);
    for (auto& mc : multiple_cuts(t)) {
        auto pieces = chop(t, mc);
        int count = 0;
        for (auto& lv : mc.levels) count += static_cast<int>(lv.size());
        HopfVector term(pieces.root_part);
        for (auto& lea : pieces.leaves) term = multiply(term, HopfVector(lea));
        long long sign = (count % 2 == 0) ? 1 : -1;
        r.add(term, -sign);
    }
    return r;
}

inline HopfVector antipode_expanded(const HopfVector& h) {
    HopfVector r;
    for (auto& [k, c] : h.terms()) {
        if (k == kUnit) {
            r.add(kUnit, c);
            continue;
        }
        r.add(detail::multiplicative_extension(
                  k, [](const std::string& tk) { return antipode_expanded_tree(parse_forest(tk)); }),
              c);
    }
    return r;
}

// ---------------------------------------------------------------- characters

// Multiplicative functional given by its values on trees.
template <class Scalar>
struct Character {
    std::function<Scalar(const DecoratedForest& tree)> on_tree;

    Scalar operator()(const DecoratedForest& f) const {
        Scalar r(1);
        if (f.empty()) return r;
        for (auto& c : f.components()) r *= on_tree(c);
        return r;
    }
    Scalar operator()(const std::string& key) const { return (*this)(parse_forest(key)); }

    Scalar operator()(const HopfVector& h) const {
        Scalar r(0);
        for (auto& [k, c] : h.terms()) r += Scalar(c) * (*this)(k);
        return r;
    }
};

// (f * g)(T) = f(T)g(e) + f(e)g(T) + sum_cuts f(Roo) g(Lea).
template <class Scalar, class F, class G>
Scalar convolve(const F& f, const G& g, const DecoratedForest& t) {
    DecoratedForest e;
    if (t.empty()) return f(e) * g(e);
    Scalar r = f(t) * g(e) + f(e) * g(t);
    for (auto& c : admissible_cuts(t)) {
        auto [roo, lea] = split(t, c);
        r += f(roo) * g(lea);
    }
    return r;
}

// ---------------------------------------------------------------- shuffle algebra

using ShuffleWord = std::vector<int>;

inline DecoratedForest word_forest(const ShuffleWord& w) {
    if (w.empty()) return {};
    return trunk(static_cast<int>(w.size()), w);
}

inline std::string word_key(const ShuffleWord& w) { return canonical_text(word_forest(w)); }

// Inverse of word_key on trunk trees.
inline ShuffleWord key_word(const std::string& key) {
    ShuffleWord w;
    if (key == kUnit) return w;
    auto f = parse_forest(key);
    if (!f.is_tree()) throw std::invalid_argument("not a trunk tree: " + key);
    int v = f.root();
    while (true) {
        w.push_back(f.label(v));
        auto ch = f.children(v);
        if (ch.empty()) break;
        if (ch.size() != 1) throw std::invalid_argument("not a trunk tree: " + key);
        v = ch[0];
    }
    return w;
}

// All shuffles of a and b, each as a word.
inline std::vector<ShuffleWord> shuffles(const ShuffleWord& a, const ShuffleWord& b) {
    std::vector<ShuffleWord> out;
    ShuffleWord cur;
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
        if (i == a.size() && j == b.size()) {
            out.push_back(cur);
            return;
        }
        if (i < a.size()) {
            cur.push_back(a[i]);
            self(self, i + 1, j);
            cur.pop_back();
        }
        if (j < b.size()) {
            cur.push_back(b[j]);
            self(self, i, j + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

inline HopfVector shuffle_product(const ShuffleWord& a, const ShuffleWord& b) {
    HopfVector r;
    for (auto& w : shuffles(a, b)) r.add(word_key(w), 1);
    return r;
}

// Bilinear extension over trunk-tree combinations.
inline HopfVector shuffle_product(const HopfVector& x, const HopfVector& y) {
    HopfVector r;
    for (auto& [a, ca] : x.terms())
        for (auto& [b, cb] : y.terms()) r.add(shuffle_product(key_word(a), key_word(b)), ca * cb);
    return r;
}

// S(w) = (-1)^|w| reverse(w).
inline HopfVector sh_antipode(const ShuffleWord& a) {
    ShuffleWord r(a.rbegin(), a.rend());
    return HopfVector(word_forest(r), a.size() % 2 == 0 ? 1 : -1);
}

inline HopfVector sh_antipode(const HopfVector& h) {
    HopfVector r;
    for (auto& [k, c] : h.terms()) r.add(sh_antipode(key_word(k)), c);
    return r;
}

// Deconcatenation coproduct on Sh.
inline TensorVector sh_coproduct(const HopfVector& h) {
    TensorVector t;
    for (auto& [k, c] : h.terms()) {
        auto w = key_word(k);
        for (std::size_t i = 0; i <= w.size(); ++i) {
            ShuffleWord l(w.begin(), w.begin() + static_cast<long>(i));
            ShuffleWord r(w.begin() + static_cast<long>(i), w.end());
            t.add({word_key(l), word_key(r)}, c);
        }
    }
    return t;
}

// Linear extensions of a forest's tree order, as words of decorations.
inline std::vector<ShuffleWord> linear_extensions(const DecoratedForest& f) {
    std::vector<ShuffleWord> out;
    std::vector<int> ids = f.ids();
    std::set<int> placed;
    ShuffleWord cur;
    auto rec = [&](auto&& self) -> void {
        if (placed.size() == ids.size()) {
            out.push_back(cur);
            return;
        }
        for (int v : ids) {
            if (placed.count(v)) continue;
            int p = f.parent(v);
            if (p != 0 && !placed.count(p)) continue;
            placed.insert(v);
            cur.push_back(f.label(v));
            self(self);
            cur.pop_back();
            placed.erase(v);
        }
    };
    rec(rec);
    return out;
}

// Pi: tree -> sum of trunk trees over linear extensions; forests via the
// shuffle product of their components.
inline HopfVector project_pi_tree(const DecoratedForest& t) {
    HopfVector r;
    for (auto& w : linear_extensions(t)) r.add(word_key(w), 1);
    return r;
}

inline HopfVector project_pi(const HopfVector& h) {
    HopfVector r;
    for (auto& [k, c] : h.terms()) {
        HopfVector img = HopfVector::unit();
        if (k != kUnit)
            for (auto& comp : parse_forest(k).components()) img = shuffle_product(img, project_pi_tree(comp));
        r.add(img, c);
    }
    return r;
}

inline TensorVector project_pi(const TensorVector& t) {
    TensorVector r;
    for (auto& [k, c] : t.terms()) {
        auto a = project_pi(HopfVector::of(k.first));
        auto b = project_pi(HopfVector::of(k.second));
        for (auto& [ka, ca] : a.terms())
            for (auto& [kb, cb] : b.terms()) r.add({ka, kb}, c * ca * cb);
    }
    return r;
}

// ---------------------------------------------------------------- F oracle

// prod_v 1 / (xi_v + sum_{w ->> v} xi_w), xi keyed by vertex id.
inline Rational f_rational(const DecoratedForest& t, const std::map<int, Rational>& xi) {
    Rational r = 1;
    for (int v : t.ids()) {
        Rational d = xi.at(v);
        for (int w : t.above(v)) d += xi.at(w);
        if (d == 0) throw std::domain_error("f_rational: vanishing denominator at vertex " + std::to_string(v));
        r /= d;
    }
    return r;
}

// Same with xi keyed by decoration; meant for forests whose decorations are
// a permutation of 1..n.
inline Rational f_rational_by_label(const DecoratedForest& t, const std::map<int, Rational>& xi) {
    std::map<int, Rational> by_id;
    for (int v : t.ids()) by_id[v] = xi.at(t.label(v));
    return f_rational(t, by_id);
}

inline Rational f_rational(const HopfVector& h, const std::map<int, Rational>& xi_by_label) {
    Rational r = 0;
    for (auto& [k, c] : h.terms()) {
        if (k == kUnit) {
            r += c;
            continue;
        }
        r += Rational(c) * f_rational_by_label(parse_forest(k), xi_by_label);
    }
    return r;
}

}  // namespace fno
