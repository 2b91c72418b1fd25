#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynbaker/types.hpp"

namespace dynbaker {

struct Incidence {
  VertexId nbr;
  EdgeLabel label;
};

// Vertex-weighted undirected multigraph with labeled edges and no self-loops.
class DynGraph {
 public:
  struct Edge {
    VertexId u, v;
  };

  void add_vertex(VertexId id, Weight w = 0) {
    if (w < 0) throw Error("negative weight");
    if (id == kNoVertex) throw Error("reserved vertex id");
    if (has_vertex(id)) throw Error("duplicate vertex " + std::to_string(id));
    if (id >= present_.size()) {
      present_.resize(id + 1, 0);
      weight_.resize(id + 1, 0);
      adj_.resize(id + 1);
    }
    present_[id] = 1;
    weight_[id] = w;
    ++num_vertices_;
  }

  // Drops an isolated vertex; only used internally for garbage collection.
  void erase_isolated_vertex(VertexId id) {
    require(id);
    if (!adj_[id].empty()) throw Error("vertex is not isolated");
    present_[id] = 0;
    weight_[id] = 0;
    --num_vertices_;
  }

  bool has_vertex(VertexId id) const { return id < present_.size() && present_[id]; }
  Weight weight(VertexId id) const {
    require(id);
    return weight_[id];
  }
  void set_weight(VertexId id, Weight w) {
    require(id);
    if (w < 0) throw Error("negative weight");
    weight_[id] = w;
  }

  EdgeLabel add_edge(VertexId u, VertexId v) {
    EdgeLabel l = next_label_;
    add_edge_labeled(u, v, l);
    return l;
  }

  void add_edge_labeled(VertexId u, VertexId v, EdgeLabel label) {
    require(u);
    require(v);
    if (u == v) throw Error("self-loop");
    if (edges_.count(label)) throw Error("duplicate edge label");
    edges_.emplace(label, Edge{u, v});
    adj_[u].push_back({v, label});
    adj_[v].push_back({u, label});
    next_label_ = std::max(next_label_, label + 1);
  }

  void remove_edge(EdgeLabel label) {
    auto it = edges_.find(label);
    if (it == edges_.end()) throw Error("unknown edge label");
    auto [u, v] = it->second;
    edges_.erase(it);
    drop(adj_[u], label);
    drop(adj_[v], label);
  }

  bool has_edge(EdgeLabel label) const { return edges_.count(label) != 0; }
  Edge endpoints(EdgeLabel label) const {
    auto it = edges_.find(label);
    if (it == edges_.end()) throw Error("unknown edge label");
    return it->second;
  }
  VertexId other(EdgeLabel label, VertexId x) const {
    Edge e = endpoints(label);
    return e.u == x ? e.v : e.u;
  }

  std::optional<EdgeLabel> find_edge(VertexId u, VertexId v) const {
    if (!has_vertex(u) || !has_vertex(v)) return std::nullopt;
    const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    VertexId target = adj_[u].size() <= adj_[v].size() ? v : u;
    std::optional<EdgeLabel> best;
    for (const auto& inc : a)
      if (inc.nbr == target && (!best || inc.label < *best)) best = inc.label;
    return best;
  }

  const std::vector<Incidence>& incident(VertexId id) const {
    require(id);
    return adj_[id];
  }
  std::size_t degree(VertexId id) const { return incident(id).size(); }

  std::vector<VertexId> neighbors(VertexId id) const {
    std::vector<VertexId> out;
    for (const auto& inc : incident(id)) out.push_back(inc.nbr);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    out.reserve(num_vertices_);
    for (VertexId i = 0; i < present_.size(); ++i)
      if (present_[i]) out.push_back(i);
    return out;
  }

  std::vector<EdgeLabel> edge_labels() const {
    std::vector<EdgeLabel> out;
    out.reserve(edges_.size());
    for (const auto& [l, e] : edges_) out.push_back(l);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_edges() const { return edges_.size(); }
  // One past the largest id ever used.
  VertexId id_bound() const { return static_cast<VertexId>(present_.size()); }
  EdgeLabel next_label() const { return next_label_; }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (VertexId i = 0; i < present_.size(); ++i)
      if (present_[i]) d = std::max(d, adj_[i].size());
    return d;
  }

 private:
  void require(VertexId id) const {
    if (!has_vertex(id)) throw Error("missing vertex " + std::to_string(id));
  }
  static void drop(std::vector<Incidence>& v, EdgeLabel label) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i].label == label) {
        v[i] = v.back();
        v.pop_back();
        return;
      }
  }

  std::vector<char> present_;
  std::vector<Weight> weight_;
  std::vector<std::vector<Incidence>> adj_;
  std::unordered_map<EdgeLabel, Edge> edges_;
  std::size_t num_vertices_ = 0;
  EdgeLabel next_label_ = 0;
};

struct LayerAssignment {
  int k = 1;
  std::vector<int> layer;  // indexed by VertexId, -1 for absent ids
  int at(VertexId v) const { return v < layer.size() ? layer[v] : -1; }
};

// BFS distance from the smallest id of each component; -1 for absent ids.
inline std::vector<int> bfs_distances(const DynGraph& g) {
  std::vector<int> dist(g.id_bound(), -1);
  std::deque<VertexId> q;
  for (VertexId s : g.vertices()) {
    if (dist[s] >= 0) continue;
    dist[s] = 0;
    q.push_back(s);
    while (!q.empty()) {
      VertexId x = q.front();
      q.pop_front();
      for (const auto& inc : g.incident(x))
        if (dist[inc.nbr] < 0) {
          dist[inc.nbr] = dist[x] + 1;
          q.push_back(inc.nbr);
        }
    }
  }
  return dist;
}

inline LayerAssignment bfs_layers(const DynGraph& g, int k) {
  if (k < 1) throw Error("layer modulus must be positive");
  LayerAssignment la;
  la.k = k;
  la.layer = bfs_distances(g);
  for (int& d : la.layer)
    if (d >= 0) d %= k;
  return la;
}

// Connected components of the subgraph induced by `keep` (all vertices if empty),
// each sorted, ordered by smallest member.
inline std::vector<std::vector<VertexId>> components(const DynGraph& g,
                                                     const std::vector<char>& keep = {}) {
  auto in = [&](VertexId v) { return keep.empty() || (v < keep.size() && keep[v]); };
  std::vector<char> seen(g.id_bound(), 0);
  std::vector<std::vector<VertexId>> out;
  std::vector<VertexId> stack;
  for (VertexId s : g.vertices()) {
    if (seen[s] || !in(s)) continue;
    out.emplace_back();
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      out.back().push_back(x);
      for (const auto& inc : g.incident(x))
        if (!seen[inc.nbr] && in(inc.nbr)) {
          seen[inc.nbr] = 1;
          stack.push_back(inc.nbr);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

// Vertices outside `set` adjacent to it, sorted.
inline std::vector<VertexId> open_neighborhood(const DynGraph& g, const std::vector<VertexId>& set) {
  std::vector<char> in(g.id_bound(), 0);
  for (VertexId v : set) in[v] = 1;
  std::vector<VertexId> out;
  for (VertexId v : set)
    for (const auto& inc : g.incident(v))
      if (!in[inc.nbr]) {
        in[inc.nbr] = 2;
        out.push_back(inc.nbr);
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<char> mask_of(VertexId bound, const std::vector<VertexId>& set) {
  std::vector<char> m(bound, 0);
  for (VertexId v : set) {
    if (v >= m.size()) m.resize(v + 1, 0);
    m[v] = 1;
  }
  return m;
}

}  // namespace dynbaker
