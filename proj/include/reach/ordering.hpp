#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "reach/depmatrix.hpp"

// Variable-order improvement. Variables become vertices of a co-occurrence
// graph (adjacent iff some group touches both); Sloan's profile-reduction
// heuristic orders each connected component between a pseudo-peripheral
// start/end pair. Weights are the classic W1=1, W2=2; all ties break towards
// the smaller original index so orders are deterministic.

namespace reach {

struct VariableOrder {
  // perm[new_position] = original variable index
  std::vector<size_t> perm;

  std::vector<size_t> inverse() const {
    std::vector<size_t> inv(perm.size());
    for (size_t p = 0; p < perm.size(); ++p) inv[perm[p]] = p;
    return inv;
  }

  static VariableOrder identity(size_t n) {
    VariableOrder o;
    o.perm.resize(n);
    std::iota(o.perm.begin(), o.perm.end(), 0);
    return o;
  }
};

// Cellwise OR of the read and write matrices.
inline std::vector<std::vector<bool>> combined_matrix(
    const DependencyMatrices& dm) {
  std::vector<std::vector<bool>> cm(dm.groups, std::vector<bool>(dm.vars));
  for (size_t i = 0; i < dm.groups; ++i)
    for (size_t j = 0; j < dm.vars; ++j) cm[i][j] = dm.rm[i][j] || dm.wm[i][j];
  return cm;
}

namespace detail {

inline std::vector<std::vector<size_t>> adjacency(
    const std::vector<std::vector<bool>>& cm, size_t n) {
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& row : cm) {
    for (size_t j = 0; j < n; ++j) {
      if (!row[j]) continue;
      for (size_t k = j + 1; k < n; ++k)
        if (row[k]) adj[j][k] = adj[k][j] = true;
    }
  }
  std::vector<std::vector<size_t>> out(n);
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < n; ++k)
      if (adj[j][k]) out[j].push_back(k);
  return out;
}

// Distances from `root` within the vertex set (graph is unweighted).
inline std::vector<int> bfs_levels(const std::vector<std::vector<size_t>>& adj,
                                   size_t root, size_t n) {
  std::vector<int> dist(n, -1);
  std::vector<size_t> queue{root};
  dist[root] = 0;
  for (size_t h = 0; h < queue.size(); ++h) {
    size_t v = queue[h];
    for (size_t w : adj[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

// George-Liu style pseudo-peripheral pair: from a min-degree seed, hop to a
// min-degree vertex of the deepest BFS level while that increases the
// eccentricity. comp is sorted, so ties keep the smaller index.
inline std::pair<size_t, size_t> pseudo_peripheral(
    const std::vector<std::vector<size_t>>& adj,
    const std::vector<size_t>& comp) {
  size_t n = adj.size();
  size_t s = comp.front();
  for (size_t v : comp)
    if (adj[v].size() < adj[s].size()) s = v;
  while (true) {
    std::vector<int> dist_s = bfs_levels(adj, s, n);
    int h_s = 0;
    for (size_t v : comp) h_s = std::max(h_s, dist_s[v]);
    size_t e = n;
    for (size_t v : comp) {
      if (dist_s[v] != h_s) continue;
      if (e == n || adj[v].size() < adj[e].size()) e = v;
    }
    std::vector<int> dist_e = bfs_levels(adj, e, n);
    int h_e = 0;
    for (size_t v : comp) h_e = std::max(h_e, dist_e[v]);
    if (h_e > h_s) {
      s = e;
      continue;
    }
    return {s, e};
  }
}

// Sloan's numbering of one component given the end vertex of the
// pseudo-peripheral pair. Priorities start at W1*dist(v,e) - W2*(deg+1) and
// gain W2 as neighbourhoods activate.
inline std::vector<size_t> sloan_component(
    const std::vector<std::vector<size_t>>& adj,
    const std::vector<size_t>& comp, size_t start, size_t end) {
  constexpr long W1 = 1, W2 = 2;
  size_t n = adj.size();
  enum class St { Inactive, Preactive, Active, Postactive };
  std::vector<St> status(n, St::Inactive);
  std::vector<long> prio(n, 0);
  std::vector<int> dist = bfs_levels(adj, end, n);
  for (size_t v : comp)
    prio[v] = W1 * dist[v] - W2 * (static_cast<long>(adj[v].size()) + 1);

  std::vector<size_t> queue{start};
  status[start] = St::Preactive;
  std::vector<size_t> order;
  order.reserve(comp.size());
  while (!queue.empty()) {
    size_t best = 0;
    for (size_t k = 1; k < queue.size(); ++k) {
      if (prio[queue[k]] > prio[queue[best]] ||
          (prio[queue[k]] == prio[queue[best]] && queue[k] < queue[best]))
        best = k;
    }
    size_t v = queue[best];
    queue.erase(queue.begin() + static_cast<long>(best));
    if (status[v] == St::Preactive) {
      for (size_t w : adj[v]) {
        prio[w] += W2;
        if (status[w] == St::Inactive) {
          status[w] = St::Preactive;
          queue.push_back(w);
        }
      }
    }
    order.push_back(v);
    status[v] = St::Postactive;
    for (size_t w : adj[v]) {
      if (status[w] != St::Preactive) continue;
      status[w] = St::Active;
      prio[w] += W2;
      for (size_t x : adj[w]) {
        if (status[x] == St::Postactive) continue;
        prio[x] += W2;
        if (status[x] == St::Inactive) {
          status[x] = St::Preactive;
          queue.push_back(x);
        }
      }
    }
  }
  return order;
}

}  // namespace detail

// Orders the variable graph per connected component; components (size >= 2)
// are concatenated by ascending minimum original index and isolated
// variables are appended in original order.
inline VariableOrder sloan_order(const std::vector<std::vector<bool>>& cm) {
  size_t n = cm.empty() ? 0 : cm.front().size();
  VariableOrder out;
  if (n == 0) return out;
  auto adj = detail::adjacency(cm, n);

  std::vector<bool> seen(n, false);
  std::vector<std::vector<size_t>> components;
  std::vector<size_t> isolated;
  for (size_t v = 0; v < n; ++v) {
    if (seen[v]) continue;
    if (adj[v].empty()) {
      seen[v] = true;
      isolated.push_back(v);
      continue;
    }
    std::vector<size_t> comp{v};
    seen[v] = true;
    for (size_t h = 0; h < comp.size(); ++h)
      for (size_t w : adj[comp[h]])
        if (!seen[w]) {
          seen[w] = true;
          comp.push_back(w);
        }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  for (const auto& comp : components) {
    auto [s, e] = detail::pseudo_peripheral(adj, comp);
    for (size_t v : detail::sloan_component(adj, comp, s, e))
      out.perm.push_back(v);
  }
  for (size_t v : isolated) out.perm.push_back(v);
  return out;
}

struct OrderMetrics {
  size_t bandwidth = 0;
  size_t total_event_span = 0;
};

// bandwidth: max |pos(j) - pos(k)| over variable pairs co-occurring in a
// row; event span: per row, last set position - first set position + 1
// under the order (empty rows contribute 0).
inline OrderMetrics order_metrics(const std::vector<std::vector<bool>>& cm,
                                  const VariableOrder& order) {
  OrderMetrics m;
  if (cm.empty()) return m;
  std::vector<size_t> inv = order.inverse();
  for (const auto& row : cm) {
    size_t first = row.size(), last = 0;
    bool any = false;
    for (size_t j = 0; j < row.size(); ++j) {
      if (!row[j]) continue;
      any = true;
      first = std::min(first, inv[j]);
      last = std::max(last, inv[j]);
      for (size_t k = j + 1; k < row.size(); ++k) {
        if (!row[k]) continue;
        size_t d = inv[j] > inv[k] ? inv[j] - inv[k] : inv[k] - inv[j];
        m.bandwidth = std::max(m.bandwidth, d);
      }
    }
    if (any) m.total_event_span += last - first + 1;
  }
  return m;
}

// Permutes variable positions everywhere at once: declarations, domains,
// initial vectors, resolved variable indices inside the groups and the
// matrix columns. The reachable set is invariant under any order.
inline std::pair<ElaboratedMachine, DependencyMatrices> apply_order(
    const ElaboratedMachine& em, const DependencyMatrices& dm,
    const VariableOrder& order) {
  if (!detail::Resolver::valid_permutation(order.perm, em.var_count()))
    throw ModelError("apply_order: not a valid permutation");
  if (!em.source)
    throw ModelError("apply_order: machine lacks its source for re-elaboration");
  ElaboratedMachine em2 =
      elaborate(*em.source, em.constants, em.options, &order.perm);
  DependencyMatrices dm2;
  dm2.groups = dm.groups;
  dm2.vars = dm.vars;
  dm2.rm.assign(dm.groups, std::vector<bool>(dm.vars, false));
  dm2.wm.assign(dm.groups, std::vector<bool>(dm.vars, false));
  for (size_t i = 0; i < dm.groups; ++i)
    for (size_t p = 0; p < dm.vars; ++p) {
      dm2.rm[i][p] = dm.rm[i][order.perm[p]];
      dm2.wm[i][p] = dm.wm[i][order.perm[p]];
    }
  return {std::move(em2), std::move(dm2)};
}

}  // namespace reach
