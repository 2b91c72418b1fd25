#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "dynbaker/graph_view.hpp"

namespace dynbaker {

struct TreeDecomposition {
  std::vector<std::vector<VertexId>> bags;  // each sorted
  std::vector<int> parent;                  // -1 for roots

  std::size_t size() const { return bags.size(); }
  int width() const {
    int w = -1;
    for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
    return w;
  }
  std::vector<std::vector<int>> children() const {
    std::vector<std::vector<int>> ch(bags.size());
    for (std::size_t i = 0; i < bags.size(); ++i)
      if (parent[i] >= 0) ch[parent[i]].push_back(static_cast<int>(i));
    return ch;
  }
  std::vector<int> roots() const {
    std::vector<int> r;
    for (std::size_t i = 0; i < bags.size(); ++i)
      if (parent[i] < 0) r.push_back(static_cast<int>(i));
    return r;
  }
  // Number of nodes on the longest root-to-leaf path.
  int height() const {
    std::vector<int> d(bags.size(), 0);
    int h = 0;
    for (std::size_t i = 0; i < bags.size(); ++i) h = std::max(h, depth_of(static_cast<int>(i), d));
    return h;
  }

 private:
  int depth_of(int i, std::vector<int>& d) const {
    std::vector<int> path;
    int x = i;
    while (x >= 0 && d[x] == 0) {
      path.push_back(x);
      x = parent[x];
      if (path.size() > bags.size()) throw InvalidDecomposition("cycle in decomposition tree");
    }
    int base = x >= 0 ? d[x] : 0;
    for (auto it = path.rbegin(); it != path.rend(); ++it) d[*it] = ++base;
    return d[i];
  }
};

inline std::vector<VertexId> sorted_union(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
  std::vector<VertexId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}
inline std::vector<VertexId> sorted_intersection(const std::vector<VertexId>& a,
                                                 const std::vector<VertexId>& b) {
  std::vector<VertexId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Throws InvalidDecomposition unless td is a tree decomposition of the view.
inline void validate(const GraphView& view, const TreeDecomposition& td) {
  if (td.parent.size() != td.bags.size()) throw InvalidDecomposition("parent array size");
  (void)td.height();  // cycle check
  std::vector<int> count(view.id_bound(), 0), tops(view.id_bound(), 0);
  for (std::size_t i = 0; i < td.size(); ++i) {
    const auto& b = td.bags[i];
    if (!std::is_sorted(b.begin(), b.end()) || std::adjacent_find(b.begin(), b.end()) != b.end())
      throw InvalidDecomposition("bag not sorted");
    const std::vector<VertexId>* pb = td.parent[i] >= 0 ? &td.bags[td.parent[i]] : nullptr;
    for (VertexId v : b) {
      if (!view.has(v)) throw InvalidDecomposition("bag holds a foreign vertex");
      ++count[v];
      if (!pb || !std::binary_search(pb->begin(), pb->end(), v)) ++tops[v];
    }
  }
  for (VertexId v : view.vertices()) {
    if (count[v] == 0) throw InvalidDecomposition("vertex " + std::to_string(v) + " not covered");
    if (tops[v] != 1) throw InvalidDecomposition("vertex " + std::to_string(v) + " has a disconnected trace");
  }
  std::unordered_set<std::uint64_t> covered;
  for (const auto& b : td.bags)
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j)
        covered.insert((static_cast<std::uint64_t>(b[i]) << 32) | b[j]);
  for (VertexId v : view.vertices())
    view.for_each_incidence(v, [&](const Incidence& inc) {
      VertexId a = std::min(v, inc.nbr), c = std::max(v, inc.nbr);
      if (!covered.count((static_cast<std::uint64_t>(a) << 32) | c))
        throw InvalidDecomposition("edge not covered");
    });
}

namespace detail {

// Path decomposition whose bags are pairs of consecutive BFS layers, per component.
inline TreeDecomposition layered_decomposition(const GraphView& view) {
  TreeDecomposition td;
  std::vector<int> dist(view.id_bound(), -1);
  for (const auto& comp : components(view)) {
    std::vector<std::vector<VertexId>> layers;
    std::deque<VertexId> q{comp.front()};
    dist[comp.front()] = 0;
    while (!q.empty()) {
      VertexId x = q.front();
      q.pop_front();
      if (static_cast<int>(layers.size()) <= dist[x]) layers.emplace_back();
      layers[dist[x]].push_back(x);
      view.for_each_incidence(x, [&](const Incidence& inc) {
        if (dist[inc.nbr] < 0) {
          dist[inc.nbr] = dist[x] + 1;
          q.push_back(inc.nbr);
        }
      });
    }
    for (auto& l : layers) std::sort(l.begin(), l.end());
    int prev = -1;
    std::size_t count = layers.size() == 1 ? 1 : layers.size() - 1;
    for (std::size_t i = 0; i < count; ++i) {
      td.bags.push_back(i + 1 < layers.size() ? sorted_union(layers[i], layers[i + 1]) : layers[i]);
      td.parent.push_back(prev);
      prev = static_cast<int>(td.bags.size()) - 1;
    }
  }
  return td;
}

}  // namespace detail

// Tree decomposition from the elimination order itself: node i has bag {v_i} ∪ N+(v_i).
// Vertices in `first` are eliminated before everything else, in ascending id order.
inline TreeDecomposition elimination_decomposition(const GraphView& view,
                                                   const std::vector<char>* first = nullptr) {
  std::vector<VertexId> verts = view.vertices();
  const int n = static_cast<int>(verts.size());
  std::vector<int> idx(view.id_bound(), -1);
  for (int i = 0; i < n; ++i) idx[verts[i]] = i;
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    view.for_each_incidence(verts[i], [&](const Incidence& inc) { adj[i].push_back(idx[inc.nbr]); });
    std::sort(adj[i].begin(), adj[i].end());
    adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
  }
  auto adjacent = [&](int a, int b) { return std::binary_search(adj[a].begin(), adj[a].end(), b); };
  auto fill_of = [&](int x) {
    long f = 0;
    const auto& a = adj[x];
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j)
        if (!adjacent(a[i], a[j])) ++f;
    return f;
  };
  auto is_first = [&](int x) { return first && GraphView::in(first, verts[x]); };

  using Key = std::tuple<int, long, std::size_t, int>;  // (group, fill, degree, index)
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> pq;
  std::vector<Key> current(n);
  std::vector<char> gone(n, 0);
  auto push = [&](int x) {
    current[x] = Key{is_first(x) ? 0 : 1, is_first(x) ? 0 : fill_of(x), is_first(x) ? 0 : adj[x].size(), x};
    pq.push(current[x]);
  };
  for (int i = 0; i < n; ++i) push(i);

  std::vector<int> pos(n, -1);
  std::vector<std::vector<int>> later(n);
  int step = 0;
  std::vector<int> touched_mark(n, -1);
  while (!pq.empty()) {
    Key top = pq.top();
    pq.pop();
    int v = std::get<3>(top);
    if (gone[v] || top != current[v]) continue;
    gone[v] = 1;
    pos[v] = step++;
    later[v] = adj[v];
    const auto nb = adj[v];
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j)
        if (!adjacent(nb[i], nb[j])) {
          auto& a = adj[nb[i]];
          a.insert(std::lower_bound(a.begin(), a.end(), nb[j]), nb[j]);
          auto& b = adj[nb[j]];
          b.insert(std::lower_bound(b.begin(), b.end(), nb[i]), nb[i]);
        }
    for (int x : nb) {
      auto& a = adj[x];
      a.erase(std::lower_bound(a.begin(), a.end(), v));
    }
    std::vector<int> upd;
    for (int x : nb) {
      if (touched_mark[x] != v) touched_mark[x] = v, upd.push_back(x);
      for (int y : adj[x])
        if (touched_mark[y] != v) touched_mark[y] = v, upd.push_back(y);
    }
    for (int x : upd)
      if (!gone[x]) push(x);
  }

  TreeDecomposition td;
  td.bags.resize(n);
  td.parent.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    int node = pos[v];
    std::vector<VertexId> bag{verts[v]};
    int best = -1;
    for (int x : later[v]) {
      bag.push_back(verts[x]);
      if (best < 0 || pos[x] < pos[best]) best = x;
    }
    std::sort(bag.begin(), bag.end());
    td.bags[node] = std::move(bag);
    td.parent[node] = best < 0 ? -1 : pos[best];
  }
  return td;
}

// Greedy min-fill (min-degree tie-break) decomposition with a layered fallback.
inline TreeDecomposition heuristic_td(const GraphView& view, int width_cap,
                                      const std::vector<char>* first = nullptr) {
  TreeDecomposition td = elimination_decomposition(view, first);
  if (td.width() <= width_cap) return td;
  TreeDecomposition alt = detail::layered_decomposition(view);
  if (alt.width() <= width_cap) return alt;
  throw WidthExceeded(std::min(td.width(), alt.width()));
}

// Recursive splitting into pieces with at most two attachment nodes: each new bag is the
// split node's bag plus the shared parts of the attachment bags, so width <= 3w+2, and the
// piece size halves at least every second level.
inline TreeDecomposition balance(const TreeDecomposition& td) {
  const int n = static_cast<int>(td.size());
  std::vector<std::vector<int>> tadj(n);
  for (int i = 0; i < n; ++i)
    if (td.parent[i] >= 0) {
      tadj[i].push_back(td.parent[i]);
      tadj[td.parent[i]].push_back(i);
    }
  struct Piece {
    std::vector<int> nodes;
    std::vector<int> attach;
    int out_parent;
  };
  TreeDecomposition out;
  std::vector<int> mark(n, -1), comp(n, -1), bfs_par(n, -1), sub(n, 0), dist(n, -1), from(n, -1);
  std::vector<char> on_path(n, 0);
  int stamp = 0;
  std::vector<Piece> stack;
  {
    std::vector<char> seen(n, 0);
    for (int s = 0; s < n; ++s) {
      if (seen[s]) continue;
      Piece p{{}, {}, -1};
      std::vector<int> st{s};
      seen[s] = 1;
      while (!st.empty()) {
        int x = st.back();
        st.pop_back();
        p.nodes.push_back(x);
        for (int y : tadj[x])
          if (!seen[y]) seen[y] = 1, st.push_back(y);
      }
      stack.push_back(std::move(p));
    }
  }
  while (!stack.empty()) {
    Piece P = std::move(stack.back());
    stack.pop_back();
    const int id = ++stamp;
    for (int x : P.nodes) mark[x] = id;
    auto in_piece = [&](int x) { return mark[x] == id; };
    // BFS order from the first node, for subtree sizes.
    std::vector<int> order{P.nodes.front()};
    bfs_par[P.nodes.front()] = -1;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (int y : tadj[order[i]])
        if (in_piece(y) && y != bfs_par[order[i]]) bfs_par[y] = order[i], order.push_back(y);
    const int total = static_cast<int>(order.size());
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      sub[*it] = 1;
      for (int y : tadj[*it])
        if (in_piece(y) && y != bfs_par[*it]) sub[*it] += sub[y];
    }
    int centroid = order.front(), best = total + 1;
    for (int x : order) {
      int worst = total - sub[x];
      for (int y : tadj[x])
        if (in_piece(y) && y != bfs_par[x]) worst = std::max(worst, sub[y]);
      if (worst < best) best = worst, centroid = x;
    }
    auto attached_node = [&](int a) {
      for (int y : tadj[a])
        if (in_piece(y)) return y;
      throw Error("attachment not adjacent to piece");
    };
    int x = centroid;
    if (P.attach.size() == 2) {
      int p1 = attached_node(P.attach[0]), p2 = attached_node(P.attach[1]);
      // path p1..p2 via BFS parents from p1
      std::vector<int> q{p1};
      for (int y : P.nodes) dist[y] = -1, from[y] = -1;
      dist[p1] = 0;
      for (std::size_t i = 0; i < q.size(); ++i)
        for (int y : tadj[q[i]])
          if (in_piece(y) && dist[y] < 0) dist[y] = dist[q[i]] + 1, from[y] = q[i], q.push_back(y);
      for (int y : P.nodes) on_path[y] = 0;
      for (int y = p2; y >= 0; y = from[y]) on_path[y] = 1;
      // nearest path node to the centroid
      for (int y : P.nodes) dist[y] = -1;
      std::vector<int> q2{centroid};
      dist[centroid] = 0;
      for (std::size_t i = 0; i < q2.size(); ++i) {
        if (on_path[q2[i]]) {
          x = q2[i];
          break;
        }
        for (int y : tadj[q2[i]])
          if (in_piece(y) && dist[y] < 0) dist[y] = 0, q2.push_back(y);
      }
    }
    std::vector<VertexId> bag = td.bags[x];
    for (int a : P.attach) bag = sorted_union(bag, sorted_intersection(td.bags[a], td.bags[attached_node(a)]));
    const int node = static_cast<int>(out.bags.size());
    out.bags.push_back(std::move(bag));
    out.parent.push_back(P.out_parent);
    // split off the remaining components
    std::vector<int> cand = P.attach;
    cand.push_back(x);
    std::vector<Piece> pieces;
    for (int s : P.nodes) {
      if (s == x || comp[s] == id) continue;
      Piece K{{}, {}, node};
      std::vector<int> st{s};
      comp[s] = id;
      while (!st.empty()) {
        int y = st.back();
        st.pop_back();
        K.nodes.push_back(y);
        for (int z : tadj[y])
          if (in_piece(z) && z != x && comp[z] != id) comp[z] = id, st.push_back(z);
      }
      pieces.push_back(std::move(K));
    }
    mark[x] = -1;
    for (auto& K : pieces) {
      const int kid = ++stamp;
      for (int y : K.nodes) mark[y] = kid;
      for (int a : cand)
        for (int y : tadj[a])
          if (mark[y] == kid) {
            K.attach.push_back(a);
            break;
          }
      for (int y : K.nodes) mark[y] = -1;
      stack.push_back(std::move(K));
    }
    for (int y : P.nodes) mark[y] = -1;
  }
  return out;
}

struct EliminationForest {
  std::vector<char> present;
  std::vector<VertexId> parent;  // kNoVertex for roots
  std::vector<int> depth;        // roots have depth 0
  std::vector<std::vector<VertexId>> children;
  std::vector<std::vector<VertexId>> reach;  // sorted
  std::vector<VertexId> order;               // every parent precedes its children
  std::vector<VertexId> roots;
  int height = 0;  // vertices on the longest root-to-leaf path

  bool contains(VertexId v) const { return v < present.size() && present[v]; }
  bool is_root(VertexId v) const { return parent[v] == kNoVertex; }
  std::size_t size() const { return order.size(); }

  // Root-to-v path, inclusive.
  std::vector<VertexId> path_to(VertexId v) const {
    std::vector<VertexId> p;
    for (VertexId x = v; x != kNoVertex; x = parent[x]) p.push_back(x);
    std::reverse(p.begin(), p.end());
    return p;
  }
  bool is_ancestor(VertexId a, VertexId v) const {  // a strict ancestor of v
    if (!contains(a) || !contains(v)) return false;
    for (VertexId x = parent[v]; x != kNoVertex; x = parent[x])
      if (x == a) return true;
    return false;
  }
  std::vector<VertexId> descendants(VertexId v) const {  // inclusive, sorted
    std::vector<VertexId> out{v};
    for (std::size_t i = 0; i < out.size(); ++i)
      for (VertexId c : children[out[i]]) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
  }
};

namespace detail {

inline void finalize_forest(EliminationForest& f) {
  const std::size_t bound = f.present.size();
  f.depth.assign(bound, -1);
  f.children.assign(bound, {});
  f.order.clear();
  f.roots.clear();
  f.height = 0;
  std::vector<VertexId> path;
  for (VertexId v = 0; v < bound; ++v) {
    if (!f.present[v] || f.depth[v] >= 0) continue;
    path.clear();
    VertexId x = v;
    while (x != kNoVertex && f.depth[x] < 0) {
      path.push_back(x);
      x = f.parent[x];
      if (path.size() > bound) throw InvalidDecomposition("cycle in elimination forest");
    }
    int d = x == kNoVertex ? -1 : f.depth[x];
    for (auto it = path.rbegin(); it != path.rend(); ++it) f.depth[*it] = ++d;
  }
  for (VertexId v = 0; v < bound; ++v) {
    if (!f.present[v]) continue;
    if (f.parent[v] == kNoVertex)
      f.roots.push_back(v);
    else
      f.children[f.parent[v]].push_back(v);
    f.order.push_back(v);
    f.height = std::max(f.height, f.depth[v] + 1);
  }
  std::stable_sort(f.order.begin(), f.order.end(),
                   [&](VertexId a, VertexId b) { return f.depth[a] < f.depth[b]; });
}

// Reach(u) = N(desc[u]); neighbors outside the forest count as external ancestors.
inline void compute_reach(const GraphView& view, EliminationForest& f) {
  f.reach.assign(f.present.size(), {});
  for (auto it = f.order.rbegin(); it != f.order.rend(); ++it) {
    VertexId u = *it;
    std::vector<VertexId> r;
    view.for_each_incidence(u, [&](const Incidence& inc) {
      VertexId w = inc.nbr;
      if (!f.contains(w) || f.depth[w] < f.depth[u]) r.push_back(w);
    });
    for (VertexId c : f.children[u])
      for (VertexId w : f.reach[c])
        if (w != u) r.push_back(w);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    f.reach[u] = std::move(r);
  }
}

}  // namespace detail

// Chains the vertices first appearing in each bag (ascending id) below the nearest
// ancestor bag that introduced something.
inline EliminationForest straighten(const GraphView& view, const TreeDecomposition& td) {
  EliminationForest f;
  f.present.assign(view.id_bound(), 0);
  f.parent.assign(view.id_bound(), kNoVertex);
  auto ch = td.children();
  std::vector<VertexId> last(td.size(), kNoVertex);  // last chained vertex at or above node
  std::vector<int> stack = td.roots();
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    VertexId above = td.parent[t] >= 0 ? last[td.parent[t]] : kNoVertex;
    const std::vector<VertexId>* pb = td.parent[t] >= 0 ? &td.bags[td.parent[t]] : nullptr;
    for (VertexId v : td.bags[t]) {
      if (pb && std::binary_search(pb->begin(), pb->end(), v)) continue;
      if (f.present[v]) throw InvalidDecomposition("vertex introduced twice");
      f.present[v] = 1;
      f.parent[v] = above;
      above = v;
    }
    last[t] = above;
    for (int c : ch[t]) stack.push_back(c);
  }
  detail::finalize_forest(f);
  detail::compute_reach(view, f);
  return f;
}

// Re-hangs every vertex u under the deepest neighbor of C_u, the component of G[desc[u]]
// holding u; afterwards every desc set is connected and parent(u) is the deepest of Reach(u).
inline EliminationForest normalize(const GraphView& view, const EliminationForest& f) {
  const std::size_t bound = f.present.size();
  std::vector<VertexId> dsu(bound);
  for (VertexId v = 0; v < bound; ++v) dsu[v] = v;
  auto find = [&](VertexId x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };
  using Entry = std::pair<int, VertexId>;  // (depth, vertex)
  std::vector<std::priority_queue<Entry>> nbrs(bound);
  EliminationForest g;
  g.present = f.present;
  g.parent.assign(bound, kNoVertex);
  for (auto it = f.order.rbegin(); it != f.order.rend(); ++it) {
    const VertexId u = *it;
    const int du = f.depth[u];
    view.for_each_incidence(u, [&](const Incidence& inc) {
      const VertexId w = inc.nbr;
      if (!f.contains(w)) return;
      if (f.depth[w] < du) {
        nbrs[find(u)].push({f.depth[w], w});
        return;
      }
      VertexId a = find(u), b = find(w);
      if (a == b) return;
      if (nbrs[a].size() < nbrs[b].size()) std::swap(a, b);
      while (!nbrs[b].empty()) {
        nbrs[a].push(nbrs[b].top());
        nbrs[b].pop();
      }
      dsu[b] = a;
    });
    auto& q = nbrs[find(u)];
    while (!q.empty() && q.top().first >= du) q.pop();
    if (!q.empty()) g.parent[u] = q.top().second;
  }
  detail::finalize_forest(g);
  detail::compute_reach(view, g);
  return g;
}

// Balanced, straightened, normalized forest: Reach sets of size <= 3w+3.
inline EliminationForest elimination_forest(const GraphView& view, const TreeDecomposition& td) {
  return normalize(view, straighten(view, balance(td)));
}

// Same without balancing; Reach(u) stays inside one input bag (size <= w+1).
inline EliminationForest elimination_forest_unbalanced(const GraphView& view, const TreeDecomposition& td) {
  return normalize(view, straighten(view, td));
}

inline std::vector<VertexId> appendices(const EliminationForest& f, const std::vector<char>& z) {
  auto inz = [&](VertexId v) { return v < z.size() && z[v]; };
  std::vector<VertexId> out;
  for (VertexId v : f.order) {
    VertexId p = f.parent[v];
    if (inz(v)) {
      if (p != kNoVertex && !inz(p)) throw PrefixViolation();
    } else if (p == kNoVertex || inz(p)) {
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dynbaker
