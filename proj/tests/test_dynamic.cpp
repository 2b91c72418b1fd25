#include <gtest/gtest.h>

#include "dynbaker/baker.hpp"
#include "dynbaker/compress_dyn.hpp"
#include "helpers.hpp"

namespace dynbaker {
namespace {

using testing::cycle_graph;
using testing::path_graph;

// ---- baker-static ----

TEST(Baker, CspExamples) {
  EXPECT_EQ(baker_csp(encode_mwis(cycle_graph({1, 1, 1})), Rational(1, 2)), 1);
  DynGraph one;
  one.add_vertex(0, 9);
  EXPECT_EQ(baker_csp(encode_mwis(one), Rational(1, 2)), 9);
  EXPECT_EQ(baker_csp(encode_mwis(one), Rational(1, 7)), 9);
  EXPECT_EQ(baker_csp(encode_mwis(path_graph({1, 1, 1, 1})), Rational(1, 2)), 2);
  EXPECT_EQ(baker_csp(encode_mwis(DynGraph{}), Rational(1, 2)), 0);
  EXPECT_THROW(baker_csp(encode_mwis(one), Rational(0)), InvalidEpsilon);
  EXPECT_THROW(baker_csp(encode_mwis(one), Rational(3, 2)), InvalidEpsilon);
}

TEST(Baker, DominationExamples) {
  auto path3 = encode_mwds(path_graph({1, 1, 1}));
  EXPECT_EQ(baker_domination(path3, Rational(1, 2)), Cost(1));
  // V_0 = {b, c}: clearing it leaves optimum 1 as well.
  EXPECT_EQ(solve_domination(clear(path3, {1, 2})), Cost(1));
  DynGraph one;
  one.add_vertex(0, 4);
  EXPECT_EQ(baker_domination(encode_mwds(one), Rational(1, 2)), Cost(4));
  Cost p = baker_domination(encode_mwds(cycle_graph({1, 1, 1, 1})), Rational(1, 2));
  EXPECT_GE(p, Cost(1));
  EXPECT_LE(p, Cost(2));
}

TEST(Baker, CspSandwichRandom) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 120; ++t) {
    HostKind kind = static_cast<HostKind>(t % 3);
    DynGraph g = testing::random_host_subgraph(kind, 6 + static_cast<int>(rng() % 14), rng);
    Weight opt = brute_mwis(g);
    for (Rational eps : {Rational(1, 2), Rational(1, 3), Rational(1, 10)}) {
      Weight p = baker_csp(encode_mwis(g), eps);
      EXPECT_LE(p, opt);
      EXPECT_GE(Rational(p), (Rational(1) - eps) * Rational(opt));
    }
  }
}

TEST(Baker, DominationSandwichRandom) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 80; ++t) {
    HostKind kind = static_cast<HostKind>(t % 3);
    DynGraph g = testing::random_host_subgraph(kind, 4 + static_cast<int>(rng() % 12), rng);
    Cost opt = brute_mwds(g);
    for (Rational d : {Rational(1, 2), Rational(1, 3), Rational(1, 10)}) {
      Cost p = baker_domination(encode_mwds(g), d);
      EXPECT_LE(p, opt);
      EXPECT_GE(Rational(p.value()), (Rational(1) - d) * Rational(opt.value()));
      Cost ps = baker_domination(SlottedMwds::encode(g, 4), d);
      EXPECT_EQ(ps, p);
    }
  }
}

// ---- compress-dyn: 2CSP ----

TEST(CspCompression, InitHoldsOptimum) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    DynGraph g = testing::random_host_subgraph(HostKind::grid, 8 + static_cast<int>(rng() % 20), rng);
    auto I = encode_mwis(g);
    CspCompression cs(I);
    const auto& star = cs.compressed();
    ASSERT_EQ(star.num_vertices(), 1u);
    VertexId x = star.vertices().front();
    const auto& rev = star.revenue(x);
    EXPECT_EQ(*std::max_element(rev.begin(), rev.end()), solve_csp(I));
  }
  CspCompression empty{CspInstance{}};
  EXPECT_EQ(empty.compressed().num_vertices(), 0u);
}

TEST(CspCompression, GrowPathByHand) {
  auto I = encode_mwis(path_graph({2, 1, 3}));
  TreeDecomposition td;
  td.bags = {{0, 1}, {1, 2}};
  td.parent = {-1, 0};
  CspCompression cs(I, td);
  ASSERT_EQ(cs.forest().parent[1], 0u);
  ASSERT_EQ(cs.forest().parent[2], 1u);
  cs.grow_stash(0);
  const auto& star = cs.compressed();
  std::vector<VertexId> live;
  for (VertexId v : star.vertices())
    if (!star.isolated_zero(v)) live.push_back(v);
  ASSERT_EQ(live.size(), 2u);
  VertexId a = cs.star_id(0);
  VertexId x = live[0] == a ? live[1] : live[0];
  EXPECT_EQ(star.revenue(x), (std::vector<Weight>{0, 3, 3}));
  EXPECT_EQ(solve_csp(star), 5);
  EXPECT_THROW(cs.grow_stash(2), PrefixViolation);
  EXPECT_THROW(cs.grow_stash(0), PrefixViolation);
}

TEST(CspCompression, GrowEverything) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 20; ++t) {
    auto I = testing::random_csp(4 + static_cast<int>(rng() % 8), 0.3, 3, rng);
    CspCompression cs(I);
    for (VertexId v : cs.forest().order) cs.grow_stash(v);
    auto snap = cs.snapshot();
    std::string why;
    EXPECT_TRUE(equivalent(snap.inst, snap.key, I, identity_keys(I), &why)) << why;
  }
  DynGraph one;
  one.add_vertex(0, 4);
  CspCompression cs(encode_mwis(one));
  cs.grow_stash(0);
  EXPECT_EQ(cs.compressed().graph().num_edges(), 0u);
  EXPECT_EQ(cs.compressed().revenue(cs.star_id(0)), (std::vector<Weight>{0, 4}));
}

TEST(CspCompression, UpdateCounts) {
  DynGraph g = gen_host(HostKind::grid, 40, 5);
  CspCompression cs(encode_mwis(g));
  auto b = cs.apply_update(CspAddVertex{100, {0, 7}});
  EXPECT_EQ(cs.stash().size(), 1u);
  EXPECT_EQ(b.size(), 1u);
  const auto& f = cs.forest();
  // deepest vertex and a vertex in another branch
  VertexId u = f.order.back(), v = f.order.front();
  std::size_t before = cs.grow_calls();
  auto e = g.find_edge(u, v);
  CspUpdate upd = e ? CspUpdate(CspRemoveEdge{*e})
                    : CspUpdate(CspAddEdge{u, v, cs.current().graph().next_label(), Relation::exclusive(2, 2)});
  cs.apply_update(upd);
  EXPECT_LE(cs.grow_calls() - before, static_cast<std::size_t>(2 * f.height));
  before = cs.grow_calls();
  auto relay = cs.apply_update(CspUpdateRevenue{u, {0, 1}});
  EXPECT_EQ(cs.grow_calls(), before);
  EXPECT_EQ(relay.size(), 1u);
}

// Live vertices of a snapshot that summarize something outside the stash.
template <class Keyed>
int live_summaries(const Keyed& k) {
  int n = 0;
  for (VertexId v : k.inst.vertices())
    if (!k.inst.isolated_zero(v) && k.key.at(v).kind != VertexKey::original) ++n;
  return n;
}

int csp_mixed_steps = 0, dom_mixed_steps = 0;

void check_csp_sequence(std::uint64_t seed, int steps) {
  std::mt19937_64 rng(seed);
  CspInstance I = seed % 2 ? encode_mwis(testing::random_host_subgraph(static_cast<HostKind>(seed % 3),
                                                                       6 + static_cast<int>(rng() % 20), rng))
                           : testing::random_csp(3 + static_cast<int>(rng() % 9), 0.3, 3, rng);
  CspCompression cs(I);
  for (int s = 0; s < steps; ++s) {
    CspUpdate upd = testing::random_csp_update(cs.current(), rng);
    cs.apply_update(upd);
    auto scratch = compress(cs.current(), cs.stash());
    auto snap = cs.snapshot();
    std::string why;
    ASSERT_TRUE(equivalent(snap.inst, snap.key, scratch.inst, scratch.key, &why))
        << "seed " << seed << " step " << s << ": " << why;
    ASSERT_EQ(solve_csp(snap.inst), solve_csp(cs.current())) << "seed " << seed << " step " << s;
    if (live_summaries(snap) > 0 && !cs.stash().empty()) ++csp_mixed_steps;
  }
}

TEST(CspCompression, IncrementalMatchesScratch) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) check_csp_sequence(seed, 30);
  EXPECT_GT(csp_mixed_steps, 600);
}

// ---- compress-dyn: domination ----

TEST(DomCompression, InitExamples) {
  DomCompression cs(encode_mwds(path_graph({1, 1, 1})));
  const auto& star = cs.compressed();
  ASSERT_EQ(star.num_vertices(), 1u);
  EXPECT_EQ(star.costs(star.vertices().front()), (std::vector<Cost>{Cost(1)}));
  DomCompression empty{DominationInstance{}};
  EXPECT_EQ(solve_domination(empty.compressed()), Cost(0));
}

TEST(DomCompression, GrowEverything) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    DynGraph g = testing::random_host_subgraph(HostKind::outerplanar, 4 + static_cast<int>(rng() % 10), rng);
    auto I = SlottedMwds::encode(g, 4);
    DomCompression cs(I);
    for (VertexId v : cs.forest().order) cs.grow_stash(v);
    auto snap = cs.snapshot();
    std::string why;
    EXPECT_TRUE(equivalent(snap.inst, snap.key, I, identity_keys(I), &why)) << why;
  }
}

void check_dom_sequence(std::uint64_t seed, int steps) {
  std::mt19937_64 rng(seed);
  HostKind kind = static_cast<HostKind>(seed % 3);
  DynGraph host = gen_host(kind, 6 + static_cast<int>(rng() % 14), rng(), 9);
  SlottedMwds enc(4);
  for (VertexId v : host.vertices()) enc.add_vertex(v, host.weight(v));
  for (EdgeLabel l : host.edge_labels())
    if (rng() % 3) enc.add_edge(host.endpoints(l).u, host.endpoints(l).v, l);
  DomCompression cs(enc.instance());
  for (int s = 0; s < steps; ++s) {
    for (const auto& upd : testing::random_mwds_update(enc, host, rng)) {
      cs.apply_update(upd);
      auto scratch = compress_domination(cs.current(), cs.stash());
      auto snap = cs.snapshot();
      std::string why;
      ASSERT_TRUE(equivalent(snap.inst, snap.key, scratch.inst, scratch.key, &why))
          << "seed " << seed << " step " << s << ": " << why;
      if (live_summaries(snap) > 0 && !cs.stash().empty()) ++dom_mixed_steps;
    }
    ASSERT_TRUE(equivalent(cs.current(), enc.instance()));
    ASSERT_EQ(solve_domination(cs.compressed()), solve_domination(cs.current())) << "seed " << seed;
  }
}

TEST(DomCompression, IncrementalMatchesScratch) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) check_dom_sequence(seed, 20);
  EXPECT_GT(dom_mixed_steps, 400);
}

TEST(DomCompression, RelieveCounts) {
  auto full = encode_mwds(path_graph({1, 2, 3, 4}));
  // V = {1}: relieve 1 (degree 2, both neighbors outside V).
  DomCompression cs(clear(full, {1}));
  for (VertexId v : cs.forest().order) cs.grow_stash(v);
  auto b = cs.relieve_in_universe(1, full, [](VertexId) { return false; });
  int removes = 0, adds = 0;
  for (const auto& u : b) {
    removes += std::holds_alternative<DomRemoveEdge>(u);
    adds += std::holds_alternative<DomAddEdge>(u);
  }
  EXPECT_EQ(removes, 2);
  EXPECT_EQ(adds, 2);
  EXPECT_EQ(b.size(), 4u);
  EXPECT_TRUE(equivalent(cs.current(), full));

  DynGraph iso;
  iso.add_vertex(0, 1);
  auto fi = encode_mwds(iso);
  DomCompression ci(clear(fi, {0}));
  EXPECT_TRUE(ci.relieve_in_universe(0, fi, [](VertexId) { return false; }).empty());
}

TEST(DomCompression, RelieveMatchesClear) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 40; ++t) {
    DynGraph g = testing::random_host_subgraph(static_cast<HostKind>(t % 3), 6 + static_cast<int>(rng() % 12), rng);
    auto full = SlottedMwds::encode(g, 4);
    auto V = testing::random_subset(full.vertices(), 0.5, rng);
    std::vector<char> inV = mask_of(full.graph().id_bound(), V);
    DomCompression cs(clear(full, V));
    std::shuffle(V.begin(), V.end(), rng);
    for (std::size_t i = 0; i < V.size() / 2 + 1 && i < V.size(); ++i) {
      VertexId v = V[i];
      inV[v] = 0;
      cs.relieve_in_universe(v, full, [&](VertexId w) { return inV[w] != 0; });
      std::vector<VertexId> rest;
      for (VertexId x : full.vertices())
        if (inV[x]) rest.push_back(x);
      std::string why;
      ASSERT_TRUE(equivalent(cs.current(), identity_keys(cs.current()), clear(full, rest), identity_keys(full), &why))
          << why;
      auto scratch = compress_domination(cs.current(), cs.stash());
      auto snap = cs.snapshot();
      ASSERT_TRUE(equivalent(snap.inst, snap.key, scratch.inst, scratch.key, &why)) << why;
    }
  }
}

}  // namespace
}  // namespace dynbaker
