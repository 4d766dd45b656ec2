#pragma once

// Nested trapezoid quadrature for tree iterated integrals of sampled paths.
// This is the independent oracle the spectral code is checked against.
//
//   I_T(Gamma)_{ts} = int_s^t dGamma_{x}(l(root)) prod_{c child} I_{T_c}(Gamma)_{x s}
//
// evaluated with the cumulative rule H_{i+1} = H_i + (f_i + f_{i+1})/2 * dGamma_i.

#include <fno/tree.hpp>

#include <vector>

namespace fno {

// channels[c][i]: sample i of channel c; labels are 1-based channel indices.
using Channels = std::vector<std::vector<double>>;

namespace detail {

// H_v on indices s..t (inclusive, either direction), H_v(s) = 0.
inline std::vector<double> cumulative_vertex(const DecoratedForest& f, int v, const Channels& ch, int s, int t) {
    const int len = (t >= s ? t - s : s - t) + 1;
    const int dir = t >= s ? 1 : -1;
    std::vector<double> prod(len, 1.0);
    for (int c : f.children(v)) {
        auto h = cumulative_vertex(f, c, ch, s, t);
        for (int i = 0; i < len; ++i) prod[i] *= h[i];
    }
    const auto& g = ch.at(f.label(v) - 1);
    std::vector<double> out(len, 0.0);
    for (int i = 0; i + 1 < len; ++i) {
        int a = s + dir * i, b = a + dir;
        out[i + 1] = out[i] + 0.5 * (prod[i] + prod[i + 1]) * (g[b] - g[a]);
    }
    return out;
}

}  // namespace detail

// Forest integral between grid indices s and t (product over components).
inline double tree_integral_quadrature(const DecoratedForest& f, const Channels& ch, int s, int t) {
    double r = 1.0;
    for (int root : f.roots()) {
        auto h = detail::cumulative_vertex(f, root, ch, s, t);
        r *= h.back();
    }
    return r;
}

// Trunk-word integral from a fixed base index s to every grid index i,
// i.e. out[i] = I_word(Gamma)_{i s}; used by the canonical lift.
inline std::vector<double> trunk_cumulative(const std::vector<int>& word, const Channels& ch, int s) {
    const int m = static_cast<int>(ch.at(0).size());
    // Innermost letter first; sweep forward and backward from s.
    std::vector<double> h(m, 1.0);
    for (int j = static_cast<int>(word.size()) - 1; j >= 0; --j) {
        const auto& g = ch.at(word[j] - 1);
        std::vector<double> out(m, 0.0);
        for (int i = s; i + 1 < m; ++i) out[i + 1] = out[i] + 0.5 * (h[i] + h[i + 1]) * (g[i + 1] - g[i]);
        for (int i = s; i > 0; --i) out[i - 1] = out[i] + 0.5 * (h[i] + h[i - 1]) * (g[i - 1] - g[i]);
        h.swap(out);
    }
    return h;
}

}  // namespace fno
