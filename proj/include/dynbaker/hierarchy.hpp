#pragma once

#include <cmath>
#include <memory>
#include <optional>

#include "dynbaker/baker.hpp"
#include "dynbaker/compress_dyn.hpp"

namespace dynbaker {

enum class Problem { mwis, mwds };

inline constexpr double kDeltaAbs = 0.5;  // absolute constant in the level count
inline constexpr int kRecurrenceC = 1;    // C in g(q-1) = g(q)^{Ck} and friends
inline constexpr int kEpochC = 1;         // c in tau_q = n^{(q-1)/L} / (k log n)^c

inline void check_epsilon(const Rational& eps) {
  if (!(eps > Rational(0)) || !(eps < Rational(1))) throw InvalidEpsilon("epsilon must lie in (0, 1)");
}

// Static mode (1) below the threshold n <= 2^{2^{1/eps^2}}, else the closed form.
inline int select_L(std::uint64_t n, const Rational& eps) {
  check_epsilon(eps);
  const double e = static_cast<double>(eps.num()) / static_cast<double>(eps.den());
  const double inv2 = 1.0 / (e * e);
  if (inv2 >= 6.0 || std::log2(static_cast<double>(std::max<std::uint64_t>(n, 1))) <= std::pow(2.0, inv2)) return 1;
  const double l1 = std::log2(std::max(static_cast<double>(n), 2.0));
  const double l2 = std::log2(std::max(l1, 2.0));
  const double l3 = std::log2(std::max(l2, 2.0));
  return std::max(1, static_cast<int>(std::floor(l2 / l3 * e * kDeltaAbs)));
}

inline int universes_for(Problem p, int L, const Rational& eps) {
  if (p == Problem::mwis) return static_cast<int>((Rational(L) / eps).ceil());
  Rational delta = eps / (Rational(1) + eps);
  return static_cast<int>((Rational(L) / delta).ceil());
}

// Per-level parameters, indexed by level q = 1..L (index 0 unused).
struct LevelTables {
  int L = 1, k = 1;
  std::vector<std::uint64_t> g, s_hat, d_hat, tau;
};

inline constexpr std::uint64_t kTableBudget = std::uint64_t{1} << 62;

// s and d are the degree and domain bounds of the top-level domination instance (0 for MWIS).
inline LevelTables config_tables(int L, int k, std::uint64_t n, std::uint64_t s = 0, std::uint64_t d = 0,
                                 std::uint64_t budget = kTableBudget) {
  LevelTables t;
  t.L = L;
  t.k = k;
  t.g.assign(L + 1, 0);
  t.s_hat.assign(L + 1, 0);
  t.d_hat.assign(L + 1, 0);
  t.tau.assign(L + 1, 0);
  auto overflow = [&](const char* what) { throw ParameterOverflow(std::string(what) + " exceeds the budget"); };
  const double lb = std::log2(static_cast<double>(budget));
  t.g[L] = 2;
  t.s_hat[L] = s;
  t.d_hat[L] = d;
  for (int q = L; q >= 2; --q) {
    double bits = std::log2(static_cast<double>(t.g[q])) * kRecurrenceC * k;
    if (bits > lb) overflow("g");
    t.g[q - 1] = std::uint64_t{1} << static_cast<int>(std::llround(bits));
    if (s > 0) {
      double sh = static_cast<double>(t.s_hat[q]) * kRecurrenceC * k;
      if (sh > static_cast<double>(budget)) overflow("s_hat");
      t.s_hat[q - 1] = t.s_hat[q] * kRecurrenceC * k;
      double e4 = 2.0 * kRecurrenceC * static_cast<double>(t.s_hat[q]) * k;
      if (e4 >= lb) overflow("d_hat");
      std::uint64_t add = std::uint64_t{1} << static_cast<int>(e4);
      if (t.d_hat[q] > budget - add) overflow("d_hat");
      t.d_hat[q - 1] = t.d_hat[q] + add;
    }
  }
  const double lg = std::log2(std::max(static_cast<double>(n), 2.0));
  for (int q = 2; q <= L; ++q) {
    double v = std::pow(static_cast<double>(n), static_cast<double>(q - 1) / L) / std::pow(k * lg, kEpochC);
    t.tau[q] = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(v)));
  }
  return t;
}

struct HierarchyConfig {
  Problem problem = Problem::mwis;
  Rational eps{1, 2};
  std::size_t delta = 4;  // degree bound for MWDS
  std::optional<int> force_L;
  std::optional<std::uint64_t> force_tau;
  bool adaptive_epochs = true;
  // Build the root over the whole graph at once instead of inserting its edges one by one.
  bool bulk_init = false;
  BakerOptions baker;
};

struct HierarchyStats {
  std::uint64_t updates = 0;               // public updates
  std::vector<std::uint64_t> epochs;       // rebuilds per level
  std::vector<std::uint64_t> early_epochs;  // rebuilds triggered by the size cap
  std::uint64_t cap_violations = 0;        // a child above its cap after an update
  std::uint64_t forced_violations = 0;     // of those, a single update from a fresh epoch
  std::uint64_t reset_violations = 0;      // a child with more than one vertex right after a rebuild
  double max_fill = 0;                     // largest child size / cap seen
};

namespace detail {

struct Shared {
  Problem problem;
  int L = 1, k = 1;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> cap;  // n^{q/L} per level
  std::vector<std::uint64_t> tau;
  Rational level_eps;               // eps/L or delta/L
  int width_cap = 0;
  bool adaptive = true;
  BakerOptions baker;
  HierarchyStats stats;
};

template <class Batch>
void append(Batch& a, Batch b) {
  for (auto& u : b) a.push_back(std::move(u));
}

inline void record_sizes(Shared& sh, int q, std::size_t size, bool fresh) {
  const double cap = static_cast<double>(sh.cap[q]);
  sh.stats.max_fill = std::max(sh.stats.max_fill, static_cast<double>(size) / cap);
  if (static_cast<double>(size) > cap) {
    ++sh.stats.cap_violations;
    if (fresh) ++sh.stats.forced_violations;
  }
}

}  // namespace detail

// One node of the MWIS hierarchy.
class CspNode {
 public:
  CspNode(int q, CspInstance inst, detail::Shared* sh) : q_(q), cur_(std::move(inst)), sh_(sh) {
    if (q_ >= 2) rebuild();
  }

  int level() const { return q_; }
  const CspInstance& instance() const { return cur_; }
  Weight value() const { return p_; }
  std::size_t size() const { return cur_.num_vertices(); }
  // Updates since the last rebuild.
  std::uint64_t epoch_position() const { return counter_; }
  const std::vector<CspCompression>& universes() const { return uni_; }
  const std::vector<std::unique_ptr<CspNode>>& children() const { return child_; }
  // Universe whose removed layer holds v, -1 if none.
  int layer_of(VertexId v) const { return v < layer_.size() ? layer_[v] : -1; }

  template <class F>
  void visit(F&& f) const {
    f(*this);
    for (const auto& c : child_) c->visit(f);
  }

  void apply_batch(const CspBatch& b) {
    for (const auto& u : b) apply(u);
  }

  void apply(const CspUpdate& upd) {
    dirty_ = true;
    if (q_ == 1) {
      dynbaker::apply(cur_, upd);
      return;
    }
    const auto T = touched(cur_, upd);
    auto receives = [&](int i) {
      for (VertexId t : T)
        if (layer_of(t) == i) return false;
      return true;
    };
    const std::uint64_t cap = sh_->cap[q_ - 1];
    if (sh_->adaptive && counter_ > 0) {
      for (int i = 0; i < sh_->k; ++i)
        if (receives(i) && child_[i]->size() + uni_[i].predict_growth(T) > cap) {
          ++sh_->stats.early_epochs[q_];
          rebuild();
          break;
        }
    }
    const bool fresh = counter_ == 0;
    for (int i = 0; i < sh_->k; ++i) {
      if (!receives(i)) continue;
      CspBatch b;
      for (VertexId t : T)
        if (cur_.has_vertex(t) && !uni_[i].current().has_vertex(t))
          detail::append(b, uni_[i].apply_update(CspAddVertex{t, cur_.revenue(t)}));
      detail::append(b, uni_[i].apply_update(upd));
      child_[i]->apply_batch(b);
    }
    dynbaker::apply(cur_, upd);
    for (const auto& c : child_) detail::record_sizes(*sh_, q_ - 1, c->size(), fresh);
    if (++counter_ >= sh_->tau[q_]) rebuild();
  }

  Weight settle() {
    if (!dirty_) return p_;
    if (q_ == 1) {
      BakerOptions o = sh_->baker;
      if (!o.width_cap) o.width_cap = 8 * sh_->k + 8;
      p_ = baker_csp(cur_, sh_->level_eps, o);
    } else {
      p_ = 0;
      for (auto& c : child_) p_ = std::max(p_, c->settle());
    }
    dirty_ = false;
    return p_;
  }

 private:
  void rebuild() {
    ++sh_->stats.epochs[q_];
    const VertexId bound = cur_.graph().id_bound();
    std::vector<VertexId> live;
    for (VertexId v : cur_.vertices())
      if (!cur_.isolated_zero(v)) live.push_back(v);
    LayerAssignment la = bfs_layers(cur_.graph(), sh_->k);
    layer_.assign(bound, -1);
    for (VertexId v : live) layer_[v] = la.at(v);
    uni_.clear();
    child_.clear();
    uni_.reserve(sh_->k);
    std::vector<VertexId> keep;
    for (int i = 0; i < sh_->k; ++i) {
      keep.clear();
      for (VertexId v : live)
        if (layer_[v] != i) keep.push_back(v);
      uni_.emplace_back(induced(cur_, keep), sh_->width_cap);
      child_.push_back(std::make_unique<CspNode>(q_ - 1, uni_.back().compressed(), sh_));
      if (child_.back()->size() > 1) ++sh_->stats.reset_violations;
    }
    counter_ = 0;
    dirty_ = true;
  }

  int q_;
  CspInstance cur_;
  detail::Shared* sh_;
  std::vector<int> layer_;
  std::vector<CspCompression> uni_;
  std::vector<std::unique_ptr<CspNode>> child_;
  std::uint64_t counter_ = 0;
  Weight p_ = 0;
  bool dirty_ = true;
};

// One node of the MWDS hierarchy; V_j = A_{4j+1} + A_{4j+2} shrink as updates touch them.
class DomNode {
 public:
  DomNode(int q, DominationInstance inst, detail::Shared* sh) : q_(q), cur_(std::move(inst)), sh_(sh) {
    if (q_ >= 2) rebuild();
  }

  int level() const { return q_; }
  const DominationInstance& instance() const { return cur_; }
  Cost value() const { return p_; }
  std::size_t size() const { return cur_.num_vertices(); }
  // Updates since the last rebuild.
  std::uint64_t epoch_position() const { return counter_; }
  const std::vector<DomCompression>& universes() const { return uni_; }
  const std::vector<std::unique_ptr<DomNode>>& children() const { return child_; }
  int layer_of(VertexId v) const { return v < vset_.size() ? vset_[v] : -1; }

  template <class F>
  void visit(F&& f) const {
    f(*this);
    for (const auto& c : child_) c->visit(f);
  }

  // Whether N[V_0], ..., N[V_{k-1}] are pairwise disjoint in the current instance.
  bool layers_disjoint() const {
    if (q_ == 1) return true;
    std::vector<int> owner(cur_.graph().id_bound(), -1);
    auto claim = [&](VertexId x, int j) {
      if (owner[x] >= 0 && owner[x] != j) return false;
      owner[x] = j;
      return true;
    };
    for (VertexId v : cur_.vertices()) {
      int j = layer_of(v);
      if (j < 0) continue;
      if (!claim(v, j)) return false;
      for (const auto& inc : cur_.graph().incident(v))
        if (!claim(inc.nbr, j)) return false;
    }
    return true;
  }

  void apply_batch(const DomBatch& b) {
    for (const auto& u : b) apply(u);
  }

  void apply(const DomUpdate& upd) {
    dirty_ = true;
    if (q_ == 1) {
      dynbaker::apply(cur_, upd);
      return;
    }
    const auto T = touched(cur_, upd);
    const int k = sh_->k;
    const std::uint64_t cap = sh_->cap[q_ - 1];
    if (sh_->adaptive && counter_ > 0) {
      for (int j = 0; j < k; ++j) {
        std::vector<VertexId> tj = T;
        for (VertexId t : T)
          if (layer_of(t) == j)
            for (const auto& inc : cur_.graph().incident(t))
              if (layer_of(inc.nbr) == j) tj.push_back(inc.nbr);
        if (child_[j]->size() + uni_[j].predict_growth(tj) > cap) {
          ++sh_->stats.early_epochs[q_];
          rebuild();
          break;
        }
      }
    }
    const bool fresh = counter_ == 0;
    std::vector<DomBatch> batch(k);
    for (VertexId t : T) {
      int j = layer_of(t);
      if (j < 0) continue;
      vset_[t] = -1;
      detail::append(batch[j], uni_[j].relieve_in_universe(t, cur_, [&](VertexId w) { return layer_of(w) == j; }));
    }
    for (int j = 0; j < k; ++j) {
      for (VertexId t : T)
        if (cur_.has_vertex(t) && !uni_[j].current().has_vertex(t))
          detail::append(batch[j], uni_[j].apply_update(DomAddVertex{t, cur_.costs(t), cur_.implicit_edges(t)}));
      detail::append(batch[j], uni_[j].apply_update(upd));
      child_[j]->apply_batch(batch[j]);
    }
    dynbaker::apply(cur_, upd);
    for (const auto& c : child_) detail::record_sizes(*sh_, q_ - 1, c->size(), fresh);
    if (++counter_ >= sh_->tau[q_]) rebuild();
  }

  Cost settle() {
    if (!dirty_) return p_;
    if (q_ == 1) {
      BakerOptions o = sh_->baker;
      if (!o.width_cap) o.width_cap = 8 * sh_->k + 8;
      p_ = baker_domination(cur_, sh_->level_eps, o);
    } else {
      bool first = true;
      for (auto& c : child_) {
        Cost v = c->settle();
        if (first || p_ < v) p_ = v;
        first = false;
      }
    }
    dirty_ = false;
    return p_;
  }

 private:
  void rebuild() {
    ++sh_->stats.epochs[q_];
    const int k = sh_->k;
    const VertexId bound = cur_.graph().id_bound();
    std::vector<VertexId> live;
    for (VertexId v : cur_.vertices())
      if (!cur_.isolated_zero(v)) live.push_back(v);
    LayerAssignment la = bfs_layers(cur_.graph(), 4 * k);
    vset_.assign(bound, -1);
    for (VertexId v : live) {
      int l = la.at(v);
      if (l % 4 == 1 || l % 4 == 2) vset_[v] = l / 4;
    }
    DominationInstance base = induced(cur_, live);
    uni_.clear();
    child_.clear();
    uni_.reserve(k);
    std::vector<VertexId> vj;
    for (int j = 0; j < k; ++j) {
      vj.clear();
      for (VertexId v : live)
        if (vset_[v] == j) vj.push_back(v);
      uni_.emplace_back(clear(base, vj), sh_->width_cap);
      child_.push_back(std::make_unique<DomNode>(q_ - 1, uni_.back().compressed(), sh_));
      if (child_.back()->size() > 1) ++sh_->stats.reset_violations;
    }
    counter_ = 0;
    dirty_ = true;
  }

  int q_;
  DominationInstance cur_;
  detail::Shared* sh_;
  std::vector<int> vset_;
  std::vector<DomCompression> uni_;
  std::vector<std::unique_ptr<DomNode>> child_;
  std::uint64_t counter_ = 0;
  Cost p_ = 0;
  bool dirty_ = true;
};

namespace detail {

inline std::unique_ptr<Shared> make_shared_params(Problem problem, const HierarchyConfig& cfg, std::uint64_t n,
                                                  std::uint64_t s, std::uint64_t d, LevelTables& tables) {
  check_epsilon(cfg.eps);
  auto sh = std::make_unique<Shared>();
  sh->problem = problem;
  sh->n = n;
  int L = cfg.force_L ? *cfg.force_L : select_L(n, cfg.eps);
  if (L < 1) throw Error("level count must be positive");
  for (;; --L) {
    try {
      tables = config_tables(L, universes_for(problem, L, cfg.eps), n, s, d);
      break;
    } catch (const ParameterOverflow&) {
      if (L == 1) throw;
    }
  }
  sh->L = L;
  sh->k = tables.k;
  sh->cap.assign(L + 1, 0);
  for (int q = 0; q <= L; ++q)
    sh->cap[q] = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(std::max<std::uint64_t>(n, 1)),
                                                          static_cast<double>(q) / L) + 1e-9)));
  sh->tau = tables.tau;
  if (cfg.force_tau)
    for (int q = 2; q <= L; ++q) sh->tau[q] = std::max<std::uint64_t>(1, *cfg.force_tau);
  Rational e = problem == Problem::mwis ? cfg.eps : cfg.eps / (Rational(1) + cfg.eps);
  sh->level_eps = e / Rational(L);
  sh->width_cap = cfg.baker.width_cap.value_or(8 * sh->k + 8);
  sh->adaptive = cfg.adaptive_epochs;
  sh->baker = cfg.baker;
  sh->stats.epochs.assign(L + 1, 0);
  sh->stats.early_epochs.assign(L + 1, 0);
  return sh;
}

}  // namespace detail

// Fully dynamic (1-eps)-approximate maximum weight independent set value.
class DynamicMwis {
 public:
  explicit DynamicMwis(const DynGraph& g, const HierarchyConfig& cfg = {}) : g_(g), eps_(cfg.eps) {
    sh_ = detail::make_shared_params(Problem::mwis, cfg, g.num_vertices(), 0, 0, tables_);
    if (cfg.bulk_init) {
      root_ = std::make_unique<CspNode>(sh_->L, encode_mwis(g), sh_.get());
    } else {
      CspInstance empty;
      for (VertexId v : g.vertices()) empty.add_vertex(v, {0, g.weight(v)});
      root_ = std::make_unique<CspNode>(sh_->L, std::move(empty), sh_.get());
      for (EdgeLabel l : g.edge_labels()) {
        auto e = g.endpoints(l);
        root_->apply(CspAddEdge{e.u, e.v, l, Relation::exclusive(2, 2)});
      }
    }
    root_->settle();
  }

  void add_edge(VertexId u, VertexId v) {
    if (u == v || g_.find_edge(u, v)) throw Error("edge already present or a loop");
    EdgeLabel l = g_.add_edge(u, v);
    root_->apply(CspAddEdge{u, v, l, Relation::exclusive(2, 2)});
    finish();
  }
  void remove_edge(VertexId u, VertexId v) {
    auto l = g_.find_edge(u, v);
    if (!l) throw Error("no such edge");
    g_.remove_edge(*l);
    root_->apply(CspRemoveEdge{*l});
    finish();
  }
  void update_weight(VertexId u, Weight w) {
    if (w < 0) throw Error("negative weight");
    g_.set_weight(u, w);
    root_->apply(CspUpdateRevenue{u, {0, w}});
    finish();
  }

  Weight query() const { return root_->value(); }
  const DynGraph& graph() const { return g_; }
  const HierarchyStats& stats() const { return sh_->stats; }
  const LevelTables& tables() const { return tables_; }
  int levels() const { return sh_->L; }
  int universes() const { return sh_->k; }
  std::uint64_t cap(int q) const { return sh_->cap[q]; }
  const Rational& eps() const { return eps_; }
  const CspNode& root() const { return *root_; }

 private:
  void finish() {
    ++sh_->stats.updates;
    root_->settle();
  }

  DynGraph g_;
  Rational eps_;
  LevelTables tables_;
  std::unique_ptr<detail::Shared> sh_;
  std::unique_ptr<CspNode> root_;
};

// Fully dynamic (1+eps)-approximate minimum weight dominating set value under a degree bound.
class DynamicMwds {
 public:
  explicit DynamicMwds(const DynGraph& g, const HierarchyConfig& cfg = {})
      : g_(g), eps_(cfg.eps), enc_(cfg.delta) {
    if (g.max_degree() > cfg.delta) throw DegreeBoundExceeded("graph exceeds the degree bound");
    sh_ = detail::make_shared_params(Problem::mwds, cfg, g.num_vertices(), cfg.delta, cfg.delta + 1, tables_);
    for (VertexId v : g.vertices()) enc_.add_vertex(v, g.weight(v));
    if (cfg.bulk_init) {
      for (EdgeLabel l : g.edge_labels()) enc_.add_edge(g.endpoints(l).u, g.endpoints(l).v, l);
      root_ = std::make_unique<DomNode>(sh_->L, enc_.instance(), sh_.get());
    } else {
      root_ = std::make_unique<DomNode>(sh_->L, enc_.instance(), sh_.get());
      for (EdgeLabel l : g.edge_labels()) root_->apply_batch(enc_.add_edge(g.endpoints(l).u, g.endpoints(l).v, l));
    }
    root_->settle();
  }

  void add_edge(VertexId u, VertexId v) {
    if (u == v || g_.find_edge(u, v)) throw Error("edge already present or a loop");
    if (g_.degree(u) >= enc_.delta() || g_.degree(v) >= enc_.delta())
      throw DegreeBoundExceeded("edge would exceed the degree bound");
    EdgeLabel l = g_.add_edge(u, v);
    root_->apply_batch(enc_.add_edge(u, v, l));
    finish();
  }
  void remove_edge(VertexId u, VertexId v) {
    auto l = g_.find_edge(u, v);
    if (!l) throw Error("no such edge");
    g_.remove_edge(*l);
    root_->apply_batch(enc_.remove_edge(*l));
    finish();
  }
  void update_weight(VertexId u, Weight w) {
    if (w < 0) throw Error("negative weight");
    g_.set_weight(u, w);
    root_->apply_batch(enc_.update_weight(u, w));
    finish();
  }

  // p / (1 - delta) = p (1 + eps), exact.
  Rational query() const {
    Cost p = root_->value();
    if (p.is_inf()) throw Error("infeasible instance");
    return Rational(p.value()) * (Rational(1) + eps_);
  }
  Cost lower_bound() const { return root_->value(); }
  const DynGraph& graph() const { return g_; }
  const HierarchyStats& stats() const { return sh_->stats; }
  const LevelTables& tables() const { return tables_; }
  int levels() const { return sh_->L; }
  int universes() const { return sh_->k; }
  std::uint64_t cap(int q) const { return sh_->cap[q]; }
  const Rational& eps() const { return eps_; }
  const DomNode& root() const { return *root_; }

 private:
  void finish() {
    ++sh_->stats.updates;
    root_->settle();
  }

  DynGraph g_;
  Rational eps_;
  SlottedMwds enc_;
  LevelTables tables_;
  std::unique_ptr<detail::Shared> sh_;
  std::unique_ptr<DomNode> root_;
};

}  // namespace dynbaker
