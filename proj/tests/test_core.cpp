#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

namespace dynbaker {
namespace {

using testing::cycle_graph;
using testing::path_graph;

// ---- dyn-graph ----

TEST(DynGraph, AddVertex) {
  DynGraph g;
  g.add_vertex(0, 5);
  EXPECT_EQ(g.num_vertices(), 1u);
  EXPECT_EQ(g.degree(0), 0u);
  g.add_vertex(1, 0);
  EXPECT_EQ(g.weight(1), 0);
  EXPECT_THROW(g.add_vertex(0, 5), Error);
}

TEST(DynGraph, AddRemoveEdge) {
  DynGraph g = path_graph({1, 1});
  auto before = g.edge_labels();
  EdgeLabel l = g.add_edge(0, 1);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_NE(l, before[0]);
  g.remove_edge(l);
  EXPECT_EQ(g.edge_labels(), before);
  EXPECT_THROW(g.add_edge(0, 0), Error);
  EXPECT_THROW(g.add_edge(0, 7), Error);
  EXPECT_THROW(g.remove_edge(999), Error);
}

TEST(DynGraph, BfsLayers) {
  auto la = bfs_layers(path_graph({1, 1, 1, 1}), 2);
  EXPECT_EQ(la.layer, (std::vector<int>{0, 1, 0, 1}));

  DynGraph two;
  for (int i = 0; i < 4; ++i) two.add_vertex(i, 1);
  two.add_edge(0, 1);
  two.add_edge(2, 3);
  EXPECT_EQ(bfs_layers(two, 2).layer, (std::vector<int>{0, 1, 0, 1}));

  EXPECT_EQ(bfs_layers(cycle_graph({1, 1, 1, 1, 1}), 3).layer, (std::vector<int>{0, 1, 2, 2, 1}));
}

TEST(DynGraph, LayersDifferByAtMostOne) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    DynGraph g = testing::random_graph(15, 0.2, rng);
    for (int k = 1; k <= 4; ++k) {
      auto la = bfs_layers(g, k);
      EXPECT_EQ(la.layer, bfs_layers(g, k).layer);
      for (EdgeLabel l : g.edge_labels()) {
        auto e = g.endpoints(l);
        int d = ((la.at(e.u) - la.at(e.v)) % k + k) % k;
        EXPECT_TRUE(d == 0 || d == 1 || d == k - 1);
      }
    }
  }
}

TEST(DynGraph, Components) {
  EXPECT_TRUE(components(DynGraph{}).empty());
  EXPECT_EQ(components(path_graph({1, 1, 1})).size(), 1u);
  DynGraph g = path_graph({1, 1});
  g.add_vertex(2, 1);
  auto c = components(g);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (std::vector<VertexId>{0, 1}));
  EXPECT_EQ(c[1], (std::vector<VertexId>{2}));
}

TEST(DynGraph, Neighborhoods) {
  DynGraph g = path_graph({1, 1, 1, 1});
  EXPECT_EQ(open_neighborhood(g, {1, 2}), (std::vector<VertexId>{0, 3}));
  EXPECT_EQ(open_neighborhood(g, {0}), (std::vector<VertexId>{1}));
}

// ---- csp-core ----

TEST(Csp, EncodeMwis) {
  DynGraph one;
  one.add_vertex(0, 5);
  EXPECT_EQ(brute_csp(encode_mwis(one)), 5);
  EXPECT_EQ(brute_csp(encode_mwis(path_graph({5, 7}))), 7);
  EXPECT_EQ(brute_csp(encode_mwis(DynGraph{})), 0);
}

TEST(Csp, Induced) {
  CspInstance I = encode_mwis(path_graph({2, 1, 3}));
  EXPECT_TRUE(equivalent(induced(I, I.vertices()), I));
  EXPECT_EQ(solve_csp(induced(I, {})), 0);
  CspInstance ac = induced(I, {0, 2});
  EXPECT_EQ(ac.graph().num_edges(), 0u);
  EXPECT_EQ(brute_csp(ac), 5);
}

TEST(Csp, Evaluate) {
  CspInstance I = encode_mwis(path_graph({5, 7}));
  EXPECT_EQ(evaluate(I, {0, 0}), std::optional<Weight>(0));
  EXPECT_EQ(evaluate(I, {1, 1}), std::nullopt);
  EXPECT_EQ(evaluate(I, {0, 1}), std::optional<Weight>(7));
  EXPECT_THROW(evaluate(I, {2, 0}), Error);
}

TEST(Csp, CompressIdentity) {
  CspInstance I = encode_mwis(path_graph({2, 1, 3}));
  KeyedCsp c = compress(I, I.vertices());
  EXPECT_TRUE(equivalent(c.inst, c.key, I, identity_keys(I)));
}

TEST(Csp, CompressPathAtMiddle) {
  CspInstance I = encode_mwis(path_graph({2, 1, 3}));
  KeyedCsp c = compress(I, {1});
  ASSERT_EQ(c.inst.num_vertices(), 2u);
  VertexId s = 3;
  EXPECT_EQ(c.key.at(s), VertexKey::of_set({1}));
  EXPECT_EQ(c.inst.revenue(s), (std::vector<Weight>{0, 5, 0}));  // 0, then b=0, b=1
  EXPECT_EQ(solve_csp(c.inst), 5);
}

TEST(Csp, CompressEverything) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    CspInstance I = testing::random_csp(8, 0.3, 3, rng);
    KeyedCsp c = compress(I, {});
    ASSERT_EQ(c.inst.num_vertices(), 1u);
    VertexId x = c.inst.vertices()[0];
    EXPECT_EQ(c.inst.revenue(x).size(), 2u);
    EXPECT_EQ(c.inst.revenue(x)[1], solve_csp(I));
  }
}

TEST(Csp, Equivalent) {
  CspInstance I = encode_mwis(path_graph({2, 1, 3}));
  CspInstance J = I;
  J.add_vertex(9, {0, 0});
  EXPECT_TRUE(equivalent(I, J));
  CspInstance K = I;
  K.set_revenue(1, {0, 4});
  EXPECT_FALSE(equivalent(I, K));
}

TEST(Csp, CompressionPreservesOptimumAndSizes) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    CspInstance I = testing::random_csp(10, 0.25, 3, rng);
    auto Y = testing::random_subset(I.vertices(), 0.4, rng);
    KeyedCsp c = compress(I, Y);
    EXPECT_EQ(brute_csp(c.inst), brute_csp(I));
    KeyedCsp b = compress(I, Y, brute_subsolver);
    EXPECT_TRUE(equivalent(c.inst, c.key, b.inst, b.key));
    // per-component sums and domain sizes
    std::set<std::vector<VertexId>> groups;
    for (const auto& [v, k] : c.key)
      if (k.kind == VertexKey::contracted) {
        groups.insert(k.set);
        std::uint64_t prod = 1;
        for (VertexId s : k.set) prod *= I.domain_size(s);
        EXPECT_EQ(c.inst.domain_size(v), prod + 1);
      }
    EXPECT_EQ(c.inst.num_vertices(), Y.size() + groups.size());
  }
}

// ---- decomp ----

TEST(Decomp, HeuristicSmall) {
  DynGraph one;
  one.add_vertex(0, 1);
  auto td = heuristic_td(one, 10);
  EXPECT_EQ(td.size(), 1u);
  EXPECT_EQ(td.width(), 0);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    DynGraph tree = gen_host(HostKind::tree, 30, rng());
    auto tt = heuristic_td(tree, 10);
    validate(tree, tt);
    EXPECT_EQ(tt.width(), 1);
  }
  DynGraph grid = grid_graph(3, 3, std::vector<Weight>(9, 1));
  auto gt = heuristic_td(grid, 10);
  validate(grid, gt);
  EXPECT_LE(gt.width(), 3);
  EXPECT_THROW(heuristic_td(grid, 1), WidthExceeded);
}

TEST(Decomp, ValidateRejects) {
  DynGraph g = path_graph({1, 1, 1});
  TreeDecomposition bad{{{0, 1}, {2}}, {-1, 0}};
  EXPECT_THROW(validate(g, bad), InvalidDecomposition);
  TreeDecomposition split{{{0}, {1, 2}, {0, 1}}, {-1, 0, 1}};
  EXPECT_THROW(validate(g, split), InvalidDecomposition);
}

constexpr double kBalanceHeightFactor = 3.0;

TEST(Decomp, BalancePath) {
  DynGraph g = path_graph(std::vector<Weight>(64, 1));
  TreeDecomposition td;
  for (int i = 0; i + 1 < 64; ++i) {
    td.bags.push_back({static_cast<VertexId>(i), static_cast<VertexId>(i + 1)});
    td.parent.push_back(i - 1);
  }
  auto b = balance(td);
  validate(g, b);
  EXPECT_LE(b.width(), 5);
  EXPECT_LE(b.height(), kBalanceHeightFactor * 7);

  TreeDecomposition single{{{0, 1, 2}}, {-1}};
  DynGraph tri = cycle_graph({1, 1, 1});
  auto sb = balance(single);
  EXPECT_EQ(sb.bags, single.bags);
}

TEST(Decomp, BalanceRandomTrees) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    int n = 100;
    DynGraph g = gen_host(HostKind::tree, n, rng());
    auto td = heuristic_td(g, 10);
    auto b = balance(td);
    validate(g, b);
    EXPECT_LE(b.width(), 3 * td.width() + 2);
    EXPECT_LE(b.height(), kBalanceHeightFactor * std::log2(td.size() + 1) + 1);
  }
}

TEST(Decomp, EliminationForestTriangle) {
  DynGraph g = cycle_graph({1, 1, 1});
  TreeDecomposition td{{{0, 1, 2}}, {-1}};
  auto f = elimination_forest(g, td);
  EXPECT_EQ(f.parent[0], kNoVertex);
  EXPECT_EQ(f.parent[1], 0u);
  EXPECT_EQ(f.parent[2], 1u);
  EXPECT_EQ(f.reach[2], (std::vector<VertexId>{0, 1}));
  EXPECT_EQ(f.reach[1], (std::vector<VertexId>{0}));
}

TEST(Decomp, EliminationForestSmall) {
  DynGraph one;
  one.add_vertex(0, 1);
  auto f1 = elimination_forest(one, heuristic_td(one, 5));
  EXPECT_EQ(f1.roots, (std::vector<VertexId>{0}));
  EXPECT_TRUE(f1.reach[0].empty());

  DynGraph p = path_graph({1, 1, 1});
  auto f = elimination_forest(p, heuristic_td(p, 5));
  EXPECT_EQ(testing::forest_problems(p, f), "");
  for (VertexId v : p.vertices()) EXPECT_LE(f.reach[v].size(), 1u);
}

TEST(Decomp, ForestPropertiesRandom) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    DynGraph g = testing::random_host_subgraph(static_cast<HostKind>(t % 3), 40, rng);
    auto td = heuristic_td(g, 20);
    auto f = elimination_forest(g, td);
    EXPECT_EQ(testing::forest_problems(g, f), "");
    for (VertexId u : f.order) EXPECT_LE(f.reach[u].size(), static_cast<std::size_t>(3 * td.width() + 3));
    // bags {u} + Reach(u) form a decomposition
    TreeDecomposition fd;
    std::vector<int> node(g.id_bound(), -1);
    for (VertexId u : f.order) {
      node[u] = static_cast<int>(fd.size());
      fd.bags.push_back(sorted_union({u}, f.reach[u]));
      fd.parent.push_back(f.is_root(u) ? -1 : node[f.parent[u]]);
    }
    validate(g, fd);
    // distinct parents imply distinct Reach sets
    for (VertexId u : f.order)
      for (VertexId v : f.order)
        if (!f.is_root(u) && !f.is_root(v) && f.parent[u] != f.parent[v]) {
          EXPECT_NE(f.reach[u], f.reach[v]);
        }
  }
}

TEST(Decomp, Appendices) {
  DynGraph p = path_graph({1, 1, 1});
  TreeDecomposition td{{{0, 1, 2}}, {-1}};
  auto f = elimination_forest(p, td);  // chain 0 -> 1 -> 2
  EXPECT_EQ(appendices(f, {}), f.roots);
  EXPECT_EQ(appendices(f, mask_of(3, {0})), (std::vector<VertexId>{1}));
  EXPECT_TRUE(appendices(f, mask_of(3, {0, 1, 2})).empty());
  EXPECT_THROW(appendices(f, mask_of(3, {1})), PrefixViolation);
}

TEST(Decomp, AppendicesMatchComponents) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    DynGraph g = testing::random_host_subgraph(HostKind::grid, 36, rng);
    auto f = elimination_forest(g, heuristic_td(g, 20));
    // ancestor-closed random prefix
    std::vector<char> z(g.id_bound(), 0);
    std::bernoulli_distribution coin(0.4);
    for (VertexId u : f.order)
      if ((f.is_root(u) || z[f.parent[u]]) && coin(rng)) z[u] = 1;
    auto app = appendices(f, z);
    std::vector<char> rest(g.id_bound(), 0);
    for (VertexId v : g.vertices()) rest[v] = !z[v];
    auto comps = components(GraphView(g, &rest));
    std::set<std::vector<VertexId>> want(comps.begin(), comps.end()), got;
    for (VertexId a : app) got.insert(f.descendants(a));
    EXPECT_EQ(got, want);
  }
}

// ---- exact-dp (2CSP) ----

TEST(ExactDp, SolveCspExamples) {
  CspInstance edge = encode_mwis(path_graph({5, 7}));
  EXPECT_EQ(solve_csp(edge, heuristic_td(edge.graph(), 5)), 7);
  CspInstance zero = encode_mwis(path_graph({0, 0, 0}));
  EXPECT_EQ(solve_csp(zero, heuristic_td(zero.graph(), 5)), 0);
  CspInstance c5 = encode_mwis(cycle_graph({1, 1, 1, 1, 1}));
  EXPECT_EQ(solve_csp(c5, heuristic_td(c5.graph(), 5)), 2);
  TreeDecomposition bad{{{0}, {1}}, {-1, 0}};
  EXPECT_THROW(solve_csp(edge, bad), InvalidDecomposition);
}

TEST(ExactDp, TablesByHand) {
  CspInstance I = encode_mwis(path_graph({5, 7}));  // u = 0, r = 1
  TreeDecomposition td{{{0, 1}}, {-1}};
  // chain in ascending id puts 0 on top; use a bag order that roots r
  EliminationForest f;
  f.present = {1, 1};
  f.parent = {1, kNoVertex};
  detail::finalize_forest(f);
  detail::compute_reach(I.graph(), f);
  auto tb = compute_tables(I, f);
  EXPECT_EQ(tb.T[0][1], 0);  // r = 1
  EXPECT_EQ(tb.T[0][0], 5);  // r = 0
  EXPECT_EQ(tb.T[1][0], 7);
  (void)td;

  CspInstance iso;
  iso.add_vertex(0, {0, 3});
  auto fi = elimination_forest(iso.graph(), heuristic_td(iso.graph(), 3));
  EXPECT_EQ(compute_tables(iso, fi).T[0][0], 3);

  CspInstance p = encode_mwis(path_graph({2, 1, 3}));
  auto fp = elimination_forest(p.graph(), heuristic_td(p.graph(), 3));
  EXPECT_EQ(sum_roots(compute_tables(p, fp), fp), 5);
}

TEST(ExactDp, SolveCspMatchesBrute) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 150; ++t) {
    int n = 3 + static_cast<int>(rng() % 10);
    CspInstance I = testing::random_csp(n, 0.3, 4, rng);
    Weight want = brute_csp(I);
    EXPECT_EQ(solve_csp(I), want);
    auto f = elimination_forest(I.graph(), heuristic_td(I.graph(), 64));
    auto tb = compute_tables(I, f);
    EXPECT_EQ(sum_roots(tb, f), want);
    for (VertexId u : f.order) {
      auto up = sorted_union(f.reach[u], {u});
      for (VertexId c : f.children[u])
        EXPECT_TRUE(std::includes(up.begin(), up.end(), f.reach[c].begin(), f.reach[c].end()));
    }
    auto phi = solve_csp_witness(I, I.graph());
    EXPECT_EQ(evaluate(I, phi), std::optional<Weight>(want));
  }
}

TEST(ExactDp, MwisOraclesAgree) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    DynGraph g = testing::random_graph(1 + static_cast<int>(rng() % 12), 0.3, rng);
    Weight b = brute_mwis(g);
    EXPECT_EQ(brute_csp(encode_mwis(g)), b);
    EXPECT_EQ(solve_csp(encode_mwis(g)), b);
    EXPECT_EQ(frontier_mwis(g), b);
  }
}

}  // namespace
}  // namespace dynbaker
