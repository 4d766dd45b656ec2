#include <fno/tree.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>

using namespace fno;

namespace {

// All rooted forests on vertex ids 1..n with parent(i) < i (every labelled
// shape up to relabelling appears), decorated by the given label function.
std::vector<DecoratedForest> forests_up_to(int n, const std::function<int(int)>& label) {
    std::vector<DecoratedForest> out;
    for (int size = 1; size <= n; ++size) {
        std::vector<int> par(size + 1, 0);
        std::function<void(int)> rec = [&](int v) {
            if (v > size) {
                DecoratedForest f;
                for (int i = 1; i <= size; ++i) f.add_vertex(i, label(i), par[i]);
                out.push_back(f);
                return;
            }
            for (int p = 0; p < v; ++p) {
                par[v] = p;
                rec(v + 1);
            }
        };
        rec(1);
    }
    return out;
}

std::set<std::vector<int>> brute_antichains(const DecoratedForest& t) {
    std::set<std::vector<int>> out;
    std::vector<int> cand;
    for (int id : t.ids())
        if (!t.is_root(id)) cand.push_back(id);
    for (unsigned mask = 1; mask < (1u << cand.size()); ++mask) {
        std::vector<int> s;
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (mask >> i & 1) s.push_back(cand[i]);
        bool ok = true;
        for (int a : s)
            for (int b : s)
                if (a != b && t.comparable(a, b)) ok = false;
        if (ok) out.insert(s);
    }
    return out;
}

}  // namespace

TEST(Trunk, SingleVertex) {
    auto t = trunk(1, {7});
    EXPECT_EQ(t.size(), 1);
    EXPECT_EQ(t.label(1), 7);
    EXPECT_TRUE(t.is_root(1));
}

TEST(Trunk, ChainOfThree) {
    auto t = trunk(3, {1, 2, 3});
    EXPECT_EQ(t.root(), 1);
    EXPECT_EQ(t.parent(2), 1);
    EXPECT_EQ(t.parent(3), 2);
    EXPECT_EQ(to_text(t), "1(2(3))");
}

TEST(Trunk, RepeatedLabels) {
    auto t = trunk(2, {5, 5});
    EXPECT_EQ(t.label(1), 5);
    EXPECT_EQ(t.label(2), 5);
    EXPECT_EQ(t.parent(2), 1);
}

TEST(Trunk, RejectsZero) { EXPECT_THROW(trunk(0, {}), std::invalid_argument); }

TEST(TextFormat, RoundTrip) {
    for (std::string s : {"1", "1(2,3)", "4(2(3),1) 5", "1(1(1(1)))", "2 3 1(7)"}) {
        auto f = parse_forest(s);
        EXPECT_EQ(to_text(f), s);
    }
    EXPECT_EQ(canonical_text(parse_forest("1(3,2)")), canonical_text(parse_forest("1(2,3)")));
    EXPECT_TRUE(same_forest(parse_forest("2 1(3)"), parse_forest("1(3) 2")));
    EXPECT_FALSE(same_forest(parse_forest("1(2)"), parse_forest("2(1)")));
    EXPECT_THROW(parse_forest("1(2"), std::invalid_argument);
}

TEST(AdmissibleCuts, SingleVertexHasNone) { EXPECT_TRUE(admissible_cuts(trunk(1, {1})).empty()); }

TEST(AdmissibleCuts, TrunkThree) {
    auto cuts = admissible_cuts(trunk(3, {1, 2, 3}));
    ASSERT_EQ(cuts.size(), 2u);
    EXPECT_EQ(cuts[0].chosen, std::vector<int>{2});
    EXPECT_EQ(cuts[1].chosen, std::vector<int>{3});
}

TEST(AdmissibleCuts, Cherry) {
    auto t = parse_forest("1(2,3)");
    auto cuts = admissible_cuts(t);
    std::set<std::vector<int>> got;
    for (auto& c : cuts) got.insert(c.chosen);
    EXPECT_EQ(got, (std::set<std::vector<int>>{{2}, {3}, {2, 3}}));
}

TEST(AdmissibleCuts, TrunkCountIsNMinusOne) {
    for (int n = 1; n <= 8; ++n) EXPECT_EQ(static_cast<int>(admissible_cuts(trunk(n, std::vector<int>(n, 1))).size()), n - 1);
}

TEST(AdmissibleCuts, MatchesBruteForceOnSmallTrees) {
    for (auto& f : forests_up_to(5, [](int i) { return i; })) {
        if (!f.is_tree()) continue;
        std::set<std::vector<int>> got;
        for (auto& c : admissible_cuts(f)) {
            EXPECT_TRUE(is_antichain(f, c.chosen));
            got.insert(c.chosen);
        }
        EXPECT_EQ(got, brute_antichains(f)) << to_text(f);
    }
}

TEST(AdmissibleCuts, ForestExcludesTrivialCombinations) {
    // Two single vertices: choices (root, empty) and (empty, root) remain.
    auto f = parse_forest("1 2");
    auto cuts = admissible_cuts(f);
    ASSERT_EQ(cuts.size(), 2u);
    for (auto& c : cuts) {
        auto [roo, lea] = split(f, c);
        EXPECT_EQ(roo.size(), 1);
        EXPECT_EQ(lea.size(), 1);
    }
    // Chain plus vertex: 3 x 2 combinations minus 2 trivial ones.
    EXPECT_EQ(admissible_cuts(parse_forest("1(2) 3")).size(), 4u);
}

TEST(Split, TrunkAtVertex) {
    auto t = trunk(4, {1, 2, 3, 4});
    auto [roo, lea] = split(t, std::vector<int>{3});
    EXPECT_EQ(roo.ids(), (std::vector<int>{1, 2}));
    EXPECT_EQ(lea.ids(), (std::vector<int>{3, 4}));
    EXPECT_TRUE(lea.is_root(3));
    EXPECT_EQ(lea.parent(4), 3);
}

TEST(Split, LeafOfThreeVertexTree) {
    // Root with two leaves, ordered so the cut leaf is vertex 2.
    DecoratedForest t;
    t.add_vertex(1, 2);
    t.add_vertex(2, 3, 1);
    t.add_vertex(3, 1, 1);
    auto [roo, lea] = split(t, std::vector<int>{2});
    EXPECT_EQ(roo.ids(), (std::vector<int>{1, 3}));
    EXPECT_EQ(roo.parent(3), 1);
    EXPECT_EQ(lea.ids(), (std::vector<int>{2}));
}

TEST(Split, CherryBothLeaves) {
    auto t = parse_forest("1(2,3)");
    auto [roo, lea] = split(t, std::vector<int>{2, 3});
    EXPECT_EQ(to_text(roo), "1");
    EXPECT_EQ(lea.roots(), (std::vector<int>{2, 3}));
}

TEST(Split, RejectsComparablePair) {
    auto t = trunk(3, {1, 2, 3});
    EXPECT_THROW(split(t, std::vector<int>{2, 3}), std::invalid_argument);
    EXPECT_THROW(split(t, std::vector<int>{1}), std::invalid_argument);
}

TEST(Split, PartitionsVerticesWithoutCrossingEdges) {
    for (auto& f : forests_up_to(5, [](int) { return 1; })) {
        for (auto& c : admissible_cuts(f)) {
            auto [roo, lea] = split(f, c);
            auto a = roo.ids(), b = lea.ids();
            std::vector<int> all(a);
            all.insert(all.end(), b.begin(), b.end());
            std::sort(all.begin(), all.end());
            EXPECT_EQ(all, f.ids());
            for (int v : b) {
                int p = f.parent(v);
                if (p != 0 && !lea.contains(p)) {
                    // Only severed edges may leave Lea, and only at cut vertices or roots.
                    EXPECT_TRUE(std::find(c.chosen.begin(), c.chosen.end(), v) != c.chosen.end());
                }
            }
            for (int v : a) {
                int p = f.parent(v);
                if (p != 0) {
                    EXPECT_TRUE(roo.contains(p));
                }
            }
        }
    }
}

TEST(MultipleCuts, SingleVertex) { EXPECT_TRUE(multiple_cuts(trunk(1, {1})).empty()); }

TEST(MultipleCuts, TrunkThree) {
    auto mcs = multiple_cuts(trunk(3, {1, 2, 3}));
    ASSERT_EQ(mcs.size(), 3u);
    EXPECT_EQ(mcs[2].levels, (std::vector<std::vector<int>>{{2}, {3}}));
}

TEST(MultipleCuts, TrunkCount) {
    for (int n = 1; n <= 5; ++n)
        EXPECT_EQ(static_cast<int>(multiple_cuts(trunk(n, std::vector<int>(n, 1))).size()), (1 << (n - 1)) - 1);
}

TEST(MultipleCuts, LevelOneEqualsAdmissibleCuts) {
    for (auto& f : forests_up_to(5, [](int i) { return i; })) {
        if (!f.is_tree()) continue;
        std::set<std::vector<int>> one, cuts;
        for (auto& mc : multiple_cuts(f))
            if (mc.levels.size() == 1) one.insert(mc.levels[0]);
        for (auto& c : admissible_cuts(f)) cuts.insert(c.chosen);
        EXPECT_EQ(one, cuts);
    }
}

TEST(MultipleCuts, LevelsAreNestedAdmissibleCuts) {
    for (auto& f : forests_up_to(5, [](int) { return 1; })) {
        if (!f.is_tree()) continue;
        for (auto& mc : multiple_cuts(f)) {
            DecoratedForest cur = f;
            for (std::size_t j = mc.levels.size(); j-- > 0;) {
                ASSERT_NO_THROW(make_cut(cur, mc.levels[j]));
                cur = split(cur, mc.levels[j]).first;
            }
        }
    }
}

TEST(Structure, FigureFiveTree) {
    // 1(2(3,4),5(6)), ids in preorder.
    auto t = parse_forest("1(2(3,4),5(6))");
    auto s = structure_queries(t, id_order(t));
    EXPECT_EQ(s.leaves, (std::vector<int>{3, 4, 6}));
    EXPECT_EQ(s.nodes, (std::vector<int>{1, 2}));
    EXPECT_EQ(s.uppermost_nodes, (std::vector<int>{2}));
    EXPECT_EQ(branch_between(s, 6, 1), (std::vector<int>{6, 5}));
    EXPECT_EQ(branch_between(s, 2, 1), (std::vector<int>{2}));
    EXPECT_EQ(s.leaf_set.at(2), (std::vector<int>{3, 4}));
    EXPECT_EQ(s.w_max.at(2), 4);
}

TEST(Structure, Trunk) {
    const int n = 5;
    auto t = trunk(n, std::vector<int>(n, 1));
    auto s = structure_queries(t, id_order(t));
    EXPECT_EQ(s.leaves, std::vector<int>{n});
    EXPECT_TRUE(s.nodes.empty());
    EXPECT_EQ(s.branches.size(), 1u);
    for (int v = 1; v <= n; ++v) EXPECT_EQ(s.w_max.at(v), n);
}

TEST(Structure, SingleVertex) {
    auto t = trunk(1, {3});
    auto s = structure_queries(t, id_order(t));
    EXPECT_EQ(s.leaves, std::vector<int>{1});
    EXPECT_EQ(s.w_max.at(1), 1);
}

TEST(Structure, RejectsIncompatibleOrder) {
    auto t = trunk(2, {1, 1});
    EXPECT_THROW(structure_queries(t, TotalOrder{{1, 2}, {2, 1}}), std::invalid_argument);
}
