#pragma once

// Permutation graphs. Reordering the simplex integral
//   int_{s < x_n < ... < x_1 < t} dGamma(l(1))_{x_1} ... dGamma(l(n))_{x_n}
// so that the integration order is x_{sigma(1)}, ..., x_{sigma(n)} and writing
// each inner range as a difference of integrals based at s yields a signed
// sum of forests. Vertex j stands for x_{sigma(j)}; it is a root when its
// upper bound is t and a child of j- when its upper bound is x_{sigma(j-)}.

#include <fno/hopf.hpp>
#include <fno/quadrature.hpp>
#include <fno/tree.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fno {

struct OrderedForestTerm {
    int sign;
    DecoratedForest forest;  // vertex ids 1..n
    TotalOrder order;        // j -> j
    std::vector<int> source;  // source[j-1] = sigma(j), the original variable
};

struct SignedOrderedForestSum {
    std::vector<OrderedForestTerm> terms;

    HopfVector as_hopf() const {
        HopfVector h;
        for (auto& t : terms) h.add(canonical_text(t.forest), t.sign);
        return h;
    }
};

enum class SplitOrder { LowerFirst, UpperFirst };

// sigma is given 1-based: sigma[j-1] = sigma(j). labels[i-1] = l(i).
inline SignedOrderedForestSum permutation_graph(int n, const std::vector<int>& sigma, const std::vector<int>& labels,
                                                SplitOrder split_order = SplitOrder::LowerFirst) {
    if (n <= 0 || static_cast<int>(sigma.size()) != n || static_cast<int>(labels.size()) != n)
        throw std::invalid_argument("permutation_graph: size mismatch");
    {
        auto s = sigma;
        std::sort(s.begin(), s.end());
        for (int i = 0; i < n; ++i)
            if (s[i] != i + 1) throw std::invalid_argument("permutation_graph: sigma is not a bijection of 1..n");
    }
    std::vector<int> pos(n + 1);  // pos[variable] = new index
    for (int j = 1; j <= n; ++j) pos[sigma[j - 1]] = j;

    // Each partial term: sign and tau[j] (0 = t, else parent index).
    struct Partial {
        int sign;
        std::vector<int> tau;
    };
    std::vector<Partial> cur{{1, {0}}};
    for (int j = 2; j <= n; ++j) {
        const int var = sigma[j - 1];
        int lower = 0, upper = 0;  // nearest fixed variables around var
        for (int p = 1; p < j; ++p) {
            int u = sigma[p - 1];
            if (u > var && (lower == 0 || u < lower)) lower = u;
            if (u < var && (upper == 0 || u > upper)) upper = u;
        }
        const int tau_upper = upper == 0 ? 0 : pos[upper];
        const int tau_lower = lower == 0 ? -1 : pos[lower];
        // Signed list of upper limits replacing int_{s_j}^{t_j}.
        std::vector<std::pair<int, int>> pieces;
        if (split_order == SplitOrder::LowerFirst || tau_upper == 0) {
            pieces.push_back({1, tau_upper});
            if (tau_lower >= 0) pieces.push_back({-1, tau_lower});
        } else {
            // int_{s_j}^{t} - int_{t_j}^{t}, each based back at s.
            pieces.push_back({1, 0});
            if (tau_lower >= 0) pieces.push_back({-1, tau_lower});
            pieces.push_back({-1, 0});
            pieces.push_back({1, tau_upper});
        }
        std::vector<Partial> next;
        for (auto& pt : cur)
            for (auto& [sg, tau] : pieces) {
                Partial q = pt;
                q.sign *= sg;
                q.tau.push_back(tau);
                next.push_back(q);
            }
        cur.swap(next);
    }
    SignedOrderedForestSum out;
    for (auto& pt : cur) {
        OrderedForestTerm term;
        term.sign = pt.sign;
        for (int j = 1; j <= n; ++j) {
            term.forest.add_vertex(j, labels[sigma[j - 1] - 1], pt.tau[j - 1]);
            term.order[j] = j;
            term.source.push_back(sigma[j - 1]);
        }
        out.terms.push_back(term);
    }
    return out;
}

// All permutations of 1..n in lexicographic order.
inline std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i + 1;
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// |I_n^l(Gamma)_{ts} - sum_j g(sigma,j) I_{T_j}(Gamma)_{ts}| by nested
// trapezoid quadrature on both sides; s, t are grid indices.
inline double verify_fubini(const Channels& path, int n, const std::vector<int>& sigma, const std::vector<int>& labels,
                            int s, int t) {
    double lhs = tree_integral_quadrature(trunk(n, labels), path, s, t);
    double rhs = 0.0;
    for (auto& term : permutation_graph(n, sigma, labels).terms)
        rhs += term.sign * tree_integral_quadrature(term.forest, path, s, t);
    return std::abs(lhs - rhs);
}

}  // namespace fno
