#pragma once

#include <algorithm>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reach/elaborate.hpp"

// Reference interpreter over an ElaboratedMachine: guard evaluation,
// successor computation and explicit-state BFS. This is the oracle the
// symbolic engine is checked against and the backing of the local
// next-state provider.

namespace reach {

namespace detail {

struct VecHash {
  size_t operator()(const StateVector& v) const {
    uint64_t h = 1469598103934665603ull;
    for (uint32_t x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

}  // namespace detail

// Evaluates a resolved expression. Intermediate arithmetic is over plain
// 64-bit integers; only assignment targets are range-checked.
inline long eval_expr(const ElaboratedMachine& em, const Expr& e,
                      const StateVector& state, const std::vector<long>& frame) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit:
    case Expr::Kind::EnumLit: return e.value;
    case Expr::Kind::Name:
      if (e.ref == Expr::RefKind::Param)
        return frame[static_cast<size_t>(e.index)];
      if (e.ref == Expr::RefKind::Var) {
        size_t j = static_cast<size_t>(e.index);
        return em.domains[j].value_at(state[j]);
      }
      throw ModelError("evaluating an unresolved name '" + e.name + "'");
    case Expr::Kind::Add:
      return eval_expr(em, *e.lhs, state, frame) +
             eval_expr(em, *e.rhs, state, frame);
    case Expr::Kind::Sub:
      return eval_expr(em, *e.lhs, state, frame) -
             eval_expr(em, *e.rhs, state, frame);
    case Expr::Kind::Mul:
      return eval_expr(em, *e.lhs, state, frame) *
             eval_expr(em, *e.rhs, state, frame);
    case Expr::Kind::Min:
      return std::min(eval_expr(em, *e.lhs, state, frame),
                      eval_expr(em, *e.rhs, state, frame));
    case Expr::Kind::Max:
      return std::max(eval_expr(em, *e.lhs, state, frame),
                      eval_expr(em, *e.rhs, state, frame));
  }
  throw ModelError("unreachable expression kind");
}

inline bool eval_pred(const ElaboratedMachine& em, const Pred& p,
                      const StateVector& state,
                      const std::vector<long>& frame = {}) {
  switch (p.kind) {
    case Pred::Kind::True: return true;
    case Pred::Kind::Not: return !eval_pred(em, *p.a, state, frame);
    case Pred::Kind::And:
      return eval_pred(em, *p.a, state, frame) &&
             eval_pred(em, *p.b, state, frame);
    case Pred::Kind::Or:
      return eval_pred(em, *p.a, state, frame) ||
             eval_pred(em, *p.b, state, frame);
    case Pred::Kind::Cmp: {
      long l = eval_expr(em, *p.lhs, state, frame);
      long r = eval_expr(em, *p.rhs, state, frame);
      switch (p.op) {
        case Pred::CmpOp::Eq: return l == r;
        case Pred::CmpOp::Ne: return l != r;
        case Pred::CmpOp::Lt: return l < r;
        case Pred::CmpOp::Le: return l <= r;
        case Pred::CmpOp::Gt: return l > r;
        case Pred::CmpOp::Ge: return l >= r;
      }
      return false;
    }
    case Pred::Kind::Member: {
      long v = eval_expr(em, *p.lhs, state, frame);
      bool in = false;
      switch (p.mrhs) {
        case Pred::MemberRhs::Elems:
          for (const auto& e : p.elems)
            if (eval_expr(em, *e, state, frame) == v) {
              in = true;
              break;
            }
          break;
        case Pred::MemberRhs::Range:
          in = v >= p.lo_e->value && v <= p.hi_e->value;
          break;
        case Pred::MemberRhs::SetName:
          in = true;  // type-correct membership in a full set or BOOL
          break;
      }
      return p.negated ? !in : in;
    }
  }
  return false;
}

namespace detail {

// Runs a statement, invoking fn(successor) once per execution path. Writes
// only happen at the leaves (parallel assignment lists), so each path carries
// exactly one write set.
template <typename Fn>
void exec_stmt(const ElaboratedMachine& em, const std::string& op_name,
               const Stmt& s, const StateVector& state,
               std::vector<long>& frame, Fn&& fn) {
  switch (s.kind) {
    case Stmt::Kind::Skip:
      fn(state);
      return;
    case Stmt::Kind::Parallel: {
      StateVector t = state;
      for (const auto& a : s.assigns) {
        long v = eval_expr(em, *a.value, state, frame);
        size_t j = static_cast<size_t>(a.var_index);
        auto idx = em.domains[j].index_of(v);
        if (!idx)
          throw ModelError("operation '" + op_name +
                           "' assigns out-of-domain value " + std::to_string(v) +
                           " to variable '" + a.target + "'");
        t[j] = *idx;
      }
      fn(t);
      return;
    }
    case Stmt::Kind::If:
      if (eval_pred(em, *s.cond, state, frame))
        exec_stmt(em, op_name, *s.then_s, state, frame, fn);
      else if (s.else_s)
        exec_stmt(em, op_name, *s.else_s, state, frame, fn);
      else
        fn(state);
      return;
    case Stmt::Kind::Any: {
      uint64_t tuples = 1;
      for (const auto& d : s.param_domains) {
        tuples *= d.size();
        if (tuples > em.options.any_cap)
          throw ModelError("operation '" + op_name +
                           "': ANY enumeration exceeds the candidate cap");
      }
      size_t k = s.params.size();
      std::vector<uint32_t> idx(k, 0);
      size_t base = frame.size();
      frame.resize(base + k);
      while (true) {
        for (size_t i = 0; i < k; ++i)
          frame[base + i] = s.param_domains[i].value_at(idx[i]);
        if (!s.where || eval_pred(em, *s.where, state, frame))
          exec_stmt(em, op_name, *s.body, state, frame, fn);
        size_t i = 0;
        for (; i < k; ++i) {
          if (++idx[i] < s.param_domains[i].size()) break;
          idx[i] = 0;
        }
        if (i == k) break;
      }
      frame.resize(base);
      return;
    }
  }
}

}  // namespace detail

// All successors of `state` under transition group `group`: empty iff the
// group is disabled there. Handles both normalized groups and the reference
// (non-normalized) form with top-level parameters.
template <typename Fn>
void for_each_successor(const ElaboratedMachine& em, size_t group,
                        const StateVector& state, Fn&& fn) {
  const Group& g = em.groups[group];
  std::vector<long> frame;
  if (g.param_names.empty()) {
    if (!eval_pred(em, *g.guard, state, frame)) return;
    detail::exec_stmt(em, g.name, *g.body, state, frame, fn);
    return;
  }
  uint64_t tuples = 1;
  for (const auto& d : g.param_domains) {
    tuples *= d.size();
    if (tuples > em.options.any_cap)
      throw ModelError("operation '" + g.name +
                       "': parameter enumeration exceeds the candidate cap");
  }
  size_t k = g.param_names.size();
  std::vector<uint32_t> idx(k, 0);
  frame.resize(k);
  while (true) {
    for (size_t i = 0; i < k; ++i)
      frame[i] = g.param_domains[i].value_at(idx[i]);
    if (eval_pred(em, *g.guard, state, frame))
      detail::exec_stmt(em, g.name, *g.body, state, frame, fn);
    size_t i = 0;
    for (; i < k; ++i) {
      if (++idx[i] < g.param_domains[i].size()) break;
      idx[i] = 0;
    }
    if (i == k) break;
  }
}

// Successor set, deduplicated and in lexicographic order.
inline std::vector<StateVector> successors(const ElaboratedMachine& em,
                                           size_t group,
                                           const StateVector& state) {
  std::vector<StateVector> out;
  for_each_successor(em, group, state, [&](const StateVector& t) {
    out.push_back(t);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Transition {
  uint32_t src;
  uint32_t group;
  uint32_t dst;
};

struct ExplicitReachResult {
  std::vector<StateVector> states;      // in BFS discovery order
  std::vector<Transition> transitions;  // indices into `states`
  uint64_t nextstate_calls = 0;
  std::vector<StateVector> deadlocks;   // lexicographically sorted
  uint64_t levels = 0;
  std::vector<uint64_t> level_sizes;

  std::vector<StateVector> sorted_states() const {
    std::vector<StateVector> s = states;
    std::sort(s.begin(), s.end());
    return s;
  }
};

struct ExplicitOptions {
  uint64_t state_cap = 10'000'000;
  bool record_transitions = true;
};

// Explicit-state BFS over all groups from the initial states. Every group is
// evaluated in every discovered state, so nextstate_calls == |states| * M.
// Queue order within a level is lexicographic, which makes discovery order
// (and therefore the transition dump) deterministic.
inline ExplicitReachResult explicit_reach(const ElaboratedMachine& em,
                                          const ExplicitOptions& opts = {}) {
  ExplicitReachResult res;
  std::unordered_map<StateVector, uint32_t, detail::VecHash> index;
  std::vector<StateVector> level = em.initial_states;  // already sorted

  for (const auto& s : level) {
    index.emplace(s, static_cast<uint32_t>(res.states.size()));
    res.states.push_back(s);
  }
  while (!level.empty()) {
    ++res.levels;
    res.level_sizes.push_back(level.size());
    std::vector<StateVector> next_level;
    for (const auto& s : level) {
      uint32_t sid = index.at(s);
      bool has_succ = false;
      for (size_t i = 0; i < em.group_count(); ++i) {
        ++res.nextstate_calls;
        for (const auto& t : successors(em, i, s)) {
          has_succ = true;
          auto [it, fresh] =
              index.try_emplace(t, static_cast<uint32_t>(res.states.size()));
          if (fresh) {
            if (res.states.size() >= opts.state_cap)
              throw ModelError("state-count limit exceeded (" +
                               std::to_string(opts.state_cap) + ")");
            res.states.push_back(t);
            next_level.push_back(t);
          }
          if (opts.record_transitions)
            res.transitions.push_back({sid, static_cast<uint32_t>(i),
                                       it->second});
        }
      }
      if (!has_succ) res.deadlocks.push_back(s);
    }
    std::sort(next_level.begin(), next_level.end());
    level = std::move(next_level);
  }
  std::sort(res.deadlocks.begin(), res.deadlocks.end());
  return res;
}

// Stable text dump of the explicit transition graph: a state table followed
// by one line per edge.
inline std::string graph_dump(const ElaboratedMachine& em,
                              const ExplicitReachResult& r) {
  std::string out;
  out += "states " + std::to_string(r.states.size()) + "\n";
  for (size_t i = 0; i < r.states.size(); ++i) {
    out += std::to_string(i) + " " + em.state_name(r.states[i]) + "\n";
  }
  out += "transitions " + std::to_string(r.transitions.size()) + "\n";
  for (const auto& t : r.transitions) {
    out += std::to_string(t.src) + " " + em.groups[t.group].name + " " +
           std::to_string(t.dst) + "\n";
  }
  return out;
}

}  // namespace reach
