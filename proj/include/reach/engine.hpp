#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "reach/depmatrix.hpp"
#include "reach/ldd.hpp"
#include "reach/semantics.hpp"

// Symbolic reachability over a pluggable next-state provider: breadth-first
// search and chaining, both learning partial transition relations on the
// fly. One provider call covers one (group, read-projected state) pair and
// is never repeated; call counts are the engine's primary cost metric.

namespace reach {

// Static model description exchanged with a provider (and over the wire).
struct ModelInfo {
  std::vector<std::string> var_names;
  std::vector<Domain> domains;
  std::vector<std::string> group_names;
  std::vector<std::vector<bool>> rm;
  std::vector<std::vector<bool>> wm;
  std::vector<StateVector> initial;

  size_t var_count() const { return var_names.size(); }
  size_t group_count() const { return group_names.size(); }

  std::string state_name(const StateVector& s) const {
    std::string out;
    for (size_t j = 0; j < var_names.size(); ++j) {
      if (j) out += " ";
      out += var_names[j] + "=" + domains[j].value_name(s[j]);
    }
    return out;
  }

  bool operator==(const ModelInfo& o) const {
    return var_names == o.var_names && domains == o.domains &&
           group_names == o.group_names && rm == o.rm && wm == o.wm &&
           initial == o.initial;
  }
};

inline ModelInfo model_info(const ElaboratedMachine& em,
                            const DependencyMatrices& dm) {
  ModelInfo mi;
  mi.var_names = em.var_names;
  mi.domains = em.domains;
  for (const auto& g : em.groups) mi.group_names.push_back(g.name);
  mi.rm = dm.rm;
  mi.wm = dm.wm;
  mi.initial = em.initial_states;
  return mi;
}

// Synchronous next-state source. next_state must be a pure function of
// (group, src_proj): repeated calls return equal target lists. The base
// class owns the per-group call counters.
class NextStateProvider {
 public:
  virtual ~NextStateProvider() = default;

  virtual const ModelInfo& init() = 0;

  std::vector<StateVector> next_state(size_t group, const StateVector& src) {
    ++calls_[group];
    return next_state_impl(group, src);
  }

  const std::vector<uint64_t>& calls_per_group() const { return calls_; }
  uint64_t total_calls() const {
    uint64_t t = 0;
    for (uint64_t c : calls_) t += c;
    return t;
  }

 protected:
  virtual std::vector<StateVector> next_state_impl(size_t group,
                                                   const StateVector& src) = 0;
  void reset_counters(size_t groups) { calls_.assign(groups, 0); }

 private:
  std::vector<uint64_t> calls_;
};

// In-process provider over the explicit semantics. A read-projected state is
// expanded to a representative full state with domain index 0 at every
// read-independent position; by read independence the choice of filler does
// not affect the write-projected successors.
class LocalProvider final : public NextStateProvider {
 public:
  LocalProvider(const ElaboratedMachine& em, const DependencyMatrices& dm)
      : em_(em), info_(model_info(em, dm)) {
    reset_counters(em.group_count());
  }

  const ModelInfo& init() override { return info_; }

 protected:
  std::vector<StateVector> next_state_impl(size_t group,
                                           const StateVector& src) override {
    StateVector rep(em_.var_count(), 0);
    size_t k = 0;
    for (size_t j = 0; j < em_.var_count(); ++j)
      if (info_.rm[group][j]) rep[j] = src[k++];
    if (k != src.size())
      throw ModelError("provider: projected state has the wrong length");
    std::vector<StateVector> out;
    for (const auto& t : successors(em_, group, rep)) {
      StateVector proj;
      for (size_t j = 0; j < em_.var_count(); ++j)
        if (info_.wm[group][j]) proj.push_back(t[j]);
      out.push_back(std::move(proj));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  const ElaboratedMachine& em_;
  ModelInfo info_;
};

enum class Strategy { Bfs, Chaining, Explicit };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Bfs: return "bfs";
    case Strategy::Chaining: return "chaining";
    case Strategy::Explicit: return "explicit";
  }
  return "?";
}

struct ReachReport {
  Strategy strategy = Strategy::Bfs;
  ldd::NodeRef reachable = ldd::kFalse;
  uint64_t state_count = 0;
  uint64_t iterations = 0;
  std::vector<uint64_t> frontier_sizes;
  std::vector<ldd::PartialRelation> relations;
  std::vector<uint64_t> calls_per_group;
  uint64_t total_calls = 0;
  double wall_ms = 0.0;
};

namespace detail {

inline std::string vec_str(const StateVector& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

// One group's share of LearnTrans: project the frontier, send each unseen
// projection to the provider exactly once, extend the partial relation with
// the whole batch and fold the projections into the visited set. Provider
// failures are rethrown with the offending group and source attached.
inline void learn_group(NextStateProvider& provider, const ModelInfo& info,
                        ldd::Store& store, ldd::NodeRef frontier, size_t i,
                        ldd::PartialRelation& rel) {
  ldd::NodeRef lp = store.project(frontier, rel.read_mask);
  ldd::NodeRef fresh = store.minus(lp, rel.visited_sources);
  std::vector<StateVector> pairs;
  store.enumerate(fresh, [&](const StateVector& src) {
    std::vector<StateVector> dsts;
    try {
      dsts = provider.next_state(i, src);
    } catch (const Error& e) {
      throw ModelError("next-state failed for group '" + info.group_names[i] +
                       "' at projected state [" + vec_str(src) +
                       "]: " + e.what());
    }
    for (const auto& d : dsts) {
      if (d.size() != rel.target_len())
        throw ModelError("provider returned a target of the wrong length for "
                         "group '" +
                         info.group_names[i] + "'");
      StateVector pair = src;
      pair.insert(pair.end(), d.begin(), d.end());
      pairs.push_back(std::move(pair));
    }
    return true;
  });
  rel.rel = store.set_union(rel.rel, store.from_vectors(std::move(pairs)));
  rel.visited_sources = store.set_union(rel.visited_sources, lp);
}

// Alg. LearnTrans over all groups.
inline void learn_trans(NextStateProvider& provider, const ModelInfo& info,
                        ldd::Store& store, ldd::NodeRef frontier,
                        std::vector<ldd::PartialRelation>& rels) {
  for (size_t i = 0; i < rels.size(); ++i)
    learn_group(provider, info, store, frontier, i, rels[i]);
}

inline std::vector<ldd::PartialRelation> fresh_relations(const ModelInfo& info) {
  std::vector<ldd::PartialRelation> rels(info.group_count());
  for (size_t i = 0; i < rels.size(); ++i) {
    rels[i].group = static_cast<int>(i);
    rels[i].read_mask = info.rm[i];
    rels[i].write_mask = info.wm[i];
  }
  return rels;
}

inline void finish_report(ReachReport& rep, ldd::Store& store,
                          NextStateProvider& provider,
                          std::chrono::steady_clock::time_point t0) {
  rep.state_count = store.sat_count(rep.reachable);
  rep.calls_per_group = provider.calls_per_group();
  rep.total_calls = provider.total_calls();
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
}

}  // namespace detail

// Breadth-first symbolic reachability: per iteration, learn over the whole
// frontier, then apply every group's relation to it.
inline ReachReport reach_bfs(NextStateProvider& provider, ldd::Store& store) {
  auto t0 = std::chrono::steady_clock::now();
  const ModelInfo& info = provider.init();
  ReachReport rep;
  rep.strategy = Strategy::Bfs;
  rep.relations = detail::fresh_relations(info);

  ldd::NodeRef reached = store.from_vectors(info.initial);
  ldd::NodeRef frontier = reached;
  while (frontier != ldd::kFalse) {
    ++rep.iterations;
    rep.frontier_sizes.push_back(store.sat_count(frontier));
    detail::learn_trans(provider, info, store, frontier, rep.relations);
    ldd::NodeRef fresh = ldd::kFalse;
    for (const auto& rel : rep.relations)
      fresh = store.set_union(fresh, store.next(frontier, rel));
    frontier = store.minus(fresh, reached);
    reached = store.set_union(reached, fresh);
  }
  rep.reachable = reached;
  detail::finish_report(rep, store, provider, t0);
  return rep;
}

// Chaining: within an iteration the groups are applied in sequence and each
// group sees the states produced by the previous ones. Same fixed point as
// BFS, usually in fewer outer iterations.
inline ReachReport reach_chaining(NextStateProvider& provider,
                                  ldd::Store& store) {
  auto t0 = std::chrono::steady_clock::now();
  const ModelInfo& info = provider.init();
  ReachReport rep;
  rep.strategy = Strategy::Chaining;
  rep.relations = detail::fresh_relations(info);

  ldd::NodeRef reached = store.from_vectors(info.initial);
  ldd::NodeRef frontier = reached;
  while (frontier != ldd::kFalse) {
    ++rep.iterations;
    rep.frontier_sizes.push_back(store.sat_count(frontier));
    for (size_t i = 0; i < rep.relations.size(); ++i) {
      // learn group i over the accumulated frontier before applying it
      detail::learn_group(provider, info, store, frontier, i, rep.relations[i]);
      frontier =
          store.set_union(frontier, store.next(frontier, rep.relations[i]));
    }
    frontier = store.minus(frontier, reached);
    reached = store.set_union(reached, frontier);
  }
  rep.reachable = reached;
  detail::finish_report(rep, store, provider, t0);
  return rep;
}

// Reachable states with no successor in any group, computed from the learned
// relations only: a state is live iff some group's relation has a target for
// its read projection. Requires a completed run (relations cover R).
inline ldd::NodeRef symbolic_deadlocks(const ReachReport& rep,
                                       ldd::Store& store) {
  ldd::NodeRef dead = rep.reachable;
  for (const auto& rel : rep.relations) {
    if (dead == ldd::kFalse) break;
    dead = store.minus(
        dead, store.match_projection(rep.reachable, store.rel_sources(rel),
                                     rel.read_mask));
  }
  return dead;
}

// Reachable states falsifying some non-typing INVARIANT conjunct, in
// lexicographic order.
inline std::vector<StateVector> invariant_violations(
    const ReachReport& rep, const ElaboratedMachine& em, ldd::Store& store,
    uint64_t enumeration_cap = 10'000'000) {
  if (store.sat_count(rep.reachable) > enumeration_cap)
    throw ModelError("invariant check: reachable set exceeds enumeration cap");
  std::vector<StateVector> out;
  store.enumerate(rep.reachable, [&](const StateVector& s) {
    for (const auto& p : em.properties) {
      if (!eval_pred(em, *p, s)) {
        out.push_back(s);
        break;
      }
    }
    return true;
  });
  return out;
}

}  // namespace reach
