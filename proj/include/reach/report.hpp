#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reach/engine.hpp"
#include "reach/ordering.hpp"

// Run-report serialization: a plain-text summary and a machine-readable JSON
// object with stable key names. Both carry the same numbers; timing is in
// the "time_ms" key only so equality checks can drop it.

namespace reach {

struct RunSummary {
  ModelInfo info;
  Strategy strategy = Strategy::Bfs;
  std::string order = "natural";
  uint64_t states = 0;
  uint64_t iterations = 0;
  uint64_t calls_total = 0;
  std::vector<uint64_t> calls_per_group;
  std::vector<uint64_t> frontier_sizes;
  std::optional<uint64_t> deadlocks;              // set when checked
  std::vector<StateVector> deadlock_witnesses;    // lex smallest, capped
  std::optional<uint64_t> invariant_violations;   // set when checked
  std::vector<StateVector> invariant_witnesses;
  std::vector<std::string> order_names;           // non-natural orders
  std::optional<OrderMetrics> metrics_before;
  std::optional<OrderMetrics> metrics_after;
  std::optional<ldd::StoreStats> store;           // with --stats
  double wall_ms = 0.0;
};

inline RunSummary summarize(const ModelInfo& info, const ReachReport& rep) {
  RunSummary s;
  s.info = info;
  s.strategy = rep.strategy;
  s.states = rep.state_count;
  s.iterations = rep.iterations;
  s.calls_total = rep.total_calls;
  s.calls_per_group = rep.calls_per_group;
  s.frontier_sizes = rep.frontier_sizes;
  s.wall_ms = rep.wall_ms;
  return s;
}

inline RunSummary summarize_explicit(const ModelInfo& info,
                                     const ExplicitReachResult& res,
                                     double wall_ms) {
  RunSummary s;
  s.info = info;
  s.strategy = Strategy::Explicit;
  s.states = res.states.size();
  s.iterations = res.levels;
  s.calls_total = res.nextstate_calls;
  s.calls_per_group.assign(info.group_count(), res.states.size());
  s.frontier_sizes = res.level_sizes;
  s.wall_ms = wall_ms;
  return s;
}

namespace detail {

inline std::vector<std::string> witness_values(const ModelInfo& info,
                                               const StateVector& s) {
  std::vector<std::string> out;
  for (size_t j = 0; j < s.size(); ++j)
    out.push_back(info.domains[j].value_name(s[j]));
  return out;
}

}  // namespace detail

inline nlohmann::ordered_json render_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["strategy"] = to_string(s.strategy);
  j["order"] = s.order;
  j["variables"] = s.info.var_names;
  j["groups"] = s.info.group_names;
  j["states"] = s.states;
  j["iterations"] = s.iterations;
  j["calls_total"] = s.calls_total;
  nlohmann::ordered_json calls;
  for (size_t i = 0; i < s.calls_per_group.size(); ++i)
    calls[s.info.group_names[i]] = s.calls_per_group[i];
  j["calls_per_group"] = std::move(calls);
  j["frontier_sizes"] = s.frontier_sizes;
  if (s.deadlocks) {
    j["deadlocks"] = *s.deadlocks;
    nlohmann::ordered_json w = nlohmann::ordered_json::array();
    for (const auto& v : s.deadlock_witnesses)
      w.push_back(detail::witness_values(s.info, v));
    j["deadlock_witnesses"] = std::move(w);
  }
  if (s.invariant_violations) {
    j["invariant_violations"] = *s.invariant_violations;
    nlohmann::ordered_json w = nlohmann::ordered_json::array();
    for (const auto& v : s.invariant_witnesses)
      w.push_back(detail::witness_values(s.info, v));
    j["invariant_witnesses"] = std::move(w);
  }
  if (!s.order_names.empty()) {
    j["order_names"] = s.order_names;
    if (s.metrics_before) {
      j["bandwidth_before"] = s.metrics_before->bandwidth;
      j["event_span_before"] = s.metrics_before->total_event_span;
    }
    if (s.metrics_after) {
      j["bandwidth_after"] = s.metrics_after->bandwidth;
      j["event_span_after"] = s.metrics_after->total_event_span;
    }
  }
  if (s.store) {
    nlohmann::ordered_json st;
    st["nodes"] = s.store->nodes;
    st["cache_hits"] = s.store->cache_hits;
    st["cache_misses"] = s.store->cache_misses;
    st["table_resizes"] = s.store->table_resizes;
    j["store"] = std::move(st);
  }
  j["time_ms"] = s.wall_ms;
  return j;
}

inline std::string render_text(const RunSummary& s) {
  std::string out =
      "states=" + std::to_string(s.states) + " calls=" +
      std::to_string(s.calls_total);
  if (s.deadlocks) out += " deadlocks=" + std::to_string(*s.deadlocks);
  if (s.invariant_violations)
    out += " invariant_violations=" + std::to_string(*s.invariant_violations);
  out += "\n";
  out += "strategy: " + std::string(to_string(s.strategy)) + "\n";
  out += "order: " + s.order + "\n";
  if (!s.order_names.empty()) {
    out += "order_names:";
    for (const auto& n : s.order_names) out += " " + n;
    out += "\n";
    if (s.metrics_before && s.metrics_after) {
      out += "bandwidth: " + std::to_string(s.metrics_before->bandwidth) +
             " -> " + std::to_string(s.metrics_after->bandwidth) + "\n";
      out += "event_span: " +
             std::to_string(s.metrics_before->total_event_span) + " -> " +
             std::to_string(s.metrics_after->total_event_span) + "\n";
    }
  }
  out += "iterations: " + std::to_string(s.iterations) + "\n";
  for (size_t i = 0; i < s.calls_per_group.size(); ++i)
    out += "calls[" + s.info.group_names[i] +
           "]: " + std::to_string(s.calls_per_group[i]) + "\n";
  for (const auto& v : s.deadlock_witnesses)
    out += "deadlock: " + s.info.state_name(v) + "\n";
  for (const auto& v : s.invariant_witnesses)
    out += "violation: " + s.info.state_name(v) + "\n";
  if (s.store) {
    out += "store_nodes: " + std::to_string(s.store->nodes) + "\n";
    out += "cache_hits: " + std::to_string(s.store->cache_hits) + "\n";
    out += "cache_misses: " + std::to_string(s.store->cache_misses) + "\n";
  }
  out += "time_ms: " + std::to_string(s.wall_ms) + "\n";
  return out;
}

// Lexicographically smallest `cap` vectors of a set.
inline std::vector<StateVector> first_witnesses(ldd::Store& store,
                                                ldd::NodeRef set, size_t cap) {
  std::vector<StateVector> out;
  store.enumerate(set, [&](const StateVector& v) {
    out.push_back(v);
    return out.size() < cap;
  });
  return out;
}

}  // namespace reach
