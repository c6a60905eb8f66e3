#pragma once

#include <map>
#include <set>
#include <vector>

#include "reach/depmatrix.hpp"
#include "reach/ldd.hpp"
#include "reach/semantics.hpp"

// Brute-force reference implementations used to check the symbolic kernel
// and the dependency analysis. Everything here enumerates explicitly and is
// deliberately independent of the code paths under test.

namespace reach::testing {

using VecSet = std::set<StateVector>;

inline VecSet ldd_set(ldd::Store& store, ldd::NodeRef n) {
  VecSet out;
  store.enumerate(n, [&](const StateVector& v) {
    out.insert(v);
    return true;
  });
  return out;
}

inline VecSet set_union(const VecSet& a, const VecSet& b) {
  VecSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline VecSet set_minus(const VecSet& a, const VecSet& b) {
  VecSet out;
  for (const auto& v : a)
    if (!b.count(v)) out.insert(v);
  return out;
}

inline VecSet set_intersect(const VecSet& a, const VecSet& b) {
  VecSet out;
  for (const auto& v : a)
    if (b.count(v)) out.insert(v);
  return out;
}

inline StateVector restrict_to(const StateVector& v,
                               const std::vector<bool>& mask) {
  StateVector out;
  for (size_t j = 0; j < v.size(); ++j)
    if (mask[j]) out.push_back(v[j]);
  return out;
}

inline VecSet project_oracle(const VecSet& s, const std::vector<bool>& mask) {
  VecSet out;
  for (const auto& v : s) out.insert(restrict_to(v, mask));
  return out;
}

// Elementwise definition of the copy-aware relational product: for every
// state whose read projection is a learned source, overwrite the write
// positions with the target components and copy everything else.
inline VecSet next_oracle(const VecSet& states,
                          const std::map<StateVector, VecSet>& rel,
                          const std::vector<bool>& rmask,
                          const std::vector<bool>& wmask) {
  VecSet out;
  for (const auto& s : states) {
    auto it = rel.find(restrict_to(s, rmask));
    if (it == rel.end()) continue;
    for (const auto& dst : it->second) {
      StateVector t = s;
      size_t k = 0;
      for (size_t j = 0; j < t.size(); ++j)
        if (wmask[j]) t[j] = dst[k++];
      out.insert(t);
    }
  }
  return out;
}

// --- explicit state space helpers ---------------------------------------

inline std::vector<StateVector> all_states(const ElaboratedMachine& em) {
  std::vector<StateVector> out;
  StateVector s(em.var_count(), 0);
  while (true) {
    out.push_back(s);
    size_t j = 0;
    for (; j < em.var_count(); ++j) {
      if (++s[j] < em.domains[j].size()) break;
      s[j] = 0;
    }
    if (j == em.var_count()) break;
  }
  return out;
}

inline VecSet successor_set(const ElaboratedMachine& em, size_t group,
                            const StateVector& s) {
  auto v = successors(em, group, s);
  return {v.begin(), v.end()};
}

// --- read/write independence (the definitions, quantified in full) --------

inline bool write_independent(const ElaboratedMachine& em, size_t i, size_t j) {
  for (const auto& s : all_states(em))
    for (const auto& t : successors(em, i, s))
      if (t[j] != s[j]) return false;
  return true;
}

// s ~j s' and s ->i t imply s' ->i (t with component j copied from s').
inline bool read_copy_independent(const ElaboratedMachine& em, size_t i,
                                  size_t j) {
  for (const auto& s : all_states(em)) {
    VecSet succ = successor_set(em, i, s);
    for (uint32_t vj = 0; vj < em.domains[j].size(); ++vj) {
      StateVector s2 = s;
      s2[j] = vj;
      VecSet succ2 = successor_set(em, i, s2);
      for (const auto& t : succ) {
        StateVector t2 = t;
        t2[j] = vj;
        if (!succ2.count(t2)) return false;
      }
    }
  }
  return true;
}

// s ~j s' and s ->i t imply s' ->i t.
inline bool read_overwrite_independent(const ElaboratedMachine& em, size_t i,
                                       size_t j) {
  for (const auto& s : all_states(em)) {
    VecSet succ = successor_set(em, i, s);
    for (uint32_t vj = 0; vj < em.domains[j].size(); ++vj) {
      StateVector s2 = s;
      s2[j] = vj;
      VecSet succ2 = successor_set(em, i, s2);
      for (const auto& t : succ)
        if (!succ2.count(t)) return false;
    }
  }
  return true;
}

// Checks every 0-cell of both matrices against the quantified definitions.
inline bool matrices_sound(const ElaboratedMachine& em,
                           const DependencyMatrices& dm) {
  for (size_t i = 0; i < dm.groups; ++i) {
    for (size_t j = 0; j < dm.vars; ++j) {
      if (!dm.wm[i][j] && !write_independent(em, i, j)) return false;
      if (!dm.rm[i][j]) {
        bool ok = dm.wm[i][j] ? read_overwrite_independent(em, i, j)
                              : read_copy_independent(em, i, j);
        if (!ok) return false;
      }
    }
  }
  return true;
}

// --- graph/order helpers -----------------------------------------------

inline size_t bandwidth_oracle(const std::vector<std::vector<bool>>& cm,
                               const std::vector<size_t>& perm) {
  size_t n = cm.empty() ? 0 : cm.front().size();
  std::vector<size_t> pos(n);
  for (size_t p = 0; p < perm.size(); ++p) pos[perm[p]] = p;
  size_t bw = 0;
  for (const auto& row : cm)
    for (size_t j = 0; j < n; ++j) {
      if (!row[j]) continue;
      for (size_t k = j + 1; k < n; ++k) {
        if (!row[k]) continue;
        size_t d = pos[j] > pos[k] ? pos[j] - pos[k] : pos[k] - pos[j];
        bw = std::max(bw, d);
      }
    }
  return bw;
}

}  // namespace reach::testing
