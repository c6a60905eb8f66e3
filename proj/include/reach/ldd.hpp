#pragma once

#include <cassert>
#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "reach/base.hpp"

// Hash-consed List Decision Diagram kernel. An LDD node (value, down, right)
// represents a set of equal-length index vectors: `down` continues to the
// next vector position, `right` chains alternative values at the same
// position in strictly increasing order. Handle equality is set equality.
//
// Stores are single-owner and per-run; nodes are freed wholesale with the
// store, there is no garbage collection. Right-chains are processed
// iteratively everywhere, so recursion depth is bounded by the vector
// length, not by domain sizes.

namespace reach::ldd {

using NodeRef = uint32_t;
inline constexpr NodeRef kFalse = 0;  // the empty set
inline constexpr NodeRef kTrue = 1;  // the set {epsilon} of zero-length vectors

struct StoreConfig {
  uint32_t node_table_log2 = 22;
  uint32_t cache_log2 = 24;
  bool cache_enabled = true;

  static constexpr uint32_t kMinLog2 = 18;
  static constexpr uint32_t kMaxLog2 = 30;
};

struct StoreStats {
  uint64_t nodes = 0;         // live nodes (excluding terminals)
  uint64_t mk_calls = 0;
  uint64_t unique_hits = 0;   // mk calls answered from the unique table
  uint64_t cache_hits = 0;
  uint64_t cache_misses = 0;
  uint64_t table_resizes = 0;
};

// Learned partial transition relation for one group: relation vectors are
// the read-projected source concatenated with the write-projected target.
// visited_sources also records sources that turned out to be disabled, so a
// disabled result is cached exactly like an enabled one.
struct PartialRelation {
  int group = -1;
  NodeRef rel = kFalse;
  NodeRef visited_sources = kFalse;
  std::vector<bool> read_mask;
  std::vector<bool> write_mask;

  size_t source_len() const {
    size_t n = 0;
    for (bool b : read_mask) n += b;
    return n;
  }
  size_t target_len() const {
    size_t n = 0;
    for (bool b : write_mask) n += b;
    return n;
  }
};

class Store {
 public:
  explicit Store(StoreConfig cfg = {}) : cfg_(cfg) {
    if (cfg.node_table_log2 < StoreConfig::kMinLog2 ||
        cfg.node_table_log2 > StoreConfig::kMaxLog2 ||
        cfg.cache_log2 < StoreConfig::kMinLog2 ||
        cfg.cache_log2 > StoreConfig::kMaxLog2)
      throw ModelError("store sizing out of range: table/cache log2 must be in [" +
                       std::to_string(StoreConfig::kMinLog2) + ", " +
                       std::to_string(StoreConfig::kMaxLog2) + "]");
    nodes_.resize(2);  // terminals; never looked up
    nodes_[kFalse] = {0, 0, 0, kNoDepth};
    nodes_[kTrue] = {0, 0, 0, 0};
    table_.assign(size_t(2) << cfg.node_table_log2, 0);
    cache_size_ = size_t(1) << cfg.cache_log2;
    cache_.reset(static_cast<CacheEntry*>(
        std::calloc(cache_size_, sizeof(CacheEntry))));
    if (!cache_) throw std::bad_alloc();
  }

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const StoreStats& stats() const { return stats_; }
  const StoreConfig& config() const { return cfg_; }

  // Vector length of the set (0 for {eps}); only valid for non-empty sets.
  uint32_t depth(NodeRef n) const { return nodes_[n].depth; }

  uint32_t value(NodeRef n) const { return nodes_[n].value; }
  NodeRef down(NodeRef n) const { return nodes_[n].down; }
  NodeRef right(NodeRef n) const { return nodes_[n].right; }
  bool is_terminal(NodeRef n) const { return n <= kTrue; }

  // --- node construction -------------------------------------------------

  NodeRef mk(uint32_t value, NodeRef down, NodeRef right) {
    ++stats_.mk_calls;
    if (down == kFalse)
      throw std::logic_error("ldd: down edge of a node must not be empty");
    if (right != kFalse) {
      if (right == kTrue)
        throw std::logic_error("ldd: right edge must be a node or empty");
      if (value >= nodes_[right].value)
        throw std::logic_error("ldd: right-chain values must strictly increase");
      if (nodes_[right].depth != nodes_[down].depth + 1)
        throw std::logic_error("ldd: mixed vector lengths in right-chain");
    }
    uint64_t h = hash_node(value, down, right);
    size_t mask = table_.size() - 1;
    size_t i = static_cast<size_t>(h) & mask;
    while (true) {
      uint32_t slot = table_[i];
      if (slot == 0) break;
      const Node& n = nodes_[slot];
      if (n.value == value && n.down == down && n.right == right) {
        ++stats_.unique_hits;
        return slot;
      }
      i = (i + 1) & mask;
    }
    Node n{value, down, right, nodes_[down].depth + 1};
    NodeRef ref = static_cast<NodeRef>(nodes_.size());
    nodes_.push_back(n);
    table_[i] = ref;
    ++stats_.nodes;
    if (nodes_.size() * 4 > table_.size() * 3) grow_table();
    return ref;
  }

  // --- basic set operations ----------------------------------------------

  NodeRef singleton(const StateVector& vec) {
    NodeRef acc = kTrue;
    for (size_t j = vec.size(); j-- > 0;) acc = mk(vec[j], acc, kFalse);
    return acc;
  }

  NodeRef insert(NodeRef set, const StateVector& vec) {
    if (set != kFalse && depth(set) != vec.size())
      throw ModelError("ldd: insert with mismatched vector length");
    return set_union(set, singleton(vec));
  }

  bool member(NodeRef set, const StateVector& vec) const {
    if (set == kFalse) return false;
    if (depth(set) != vec.size())
      throw ModelError("ldd: member with mismatched vector length");
    NodeRef n = set;
    for (uint32_t v : vec) {
      n = find(n, v);
      if (n == kFalse) return false;
      n = nodes_[n].down;
    }
    return n == kTrue;
  }

  NodeRef set_union(NodeRef a, NodeRef b) {
    if (a == b) return a;
    if (a == kFalse) return b;
    if (b == kFalse) return a;
    check_same_length(a, b);
    if (a > b) std::swap(a, b);  // commutative
    if (NodeRef r; probe(OpTag::Union, a, b, 0, r)) return r;
    std::vector<Entry> spine;
    NodeRef pa = a, pb = b;
    while (pa != kFalse || pb != kFalse) {
      if (pb == kFalse ||
          (pa != kFalse && nodes_[pa].value < nodes_[pb].value)) {
        spine.push_back({nodes_[pa].value, nodes_[pa].down});
        pa = nodes_[pa].right;
      } else if (pa == kFalse || nodes_[pb].value < nodes_[pa].value) {
        spine.push_back({nodes_[pb].value, nodes_[pb].down});
        pb = nodes_[pb].right;
      } else {
        spine.push_back(
            {nodes_[pa].value, set_union(nodes_[pa].down, nodes_[pb].down)});
        pa = nodes_[pa].right;
        pb = nodes_[pb].right;
      }
    }
    NodeRef r = fold(spine);
    store(OpTag::Union, a, b, 0, r);
    return r;
  }

  NodeRef minus(NodeRef a, NodeRef b) {
    if (a == kFalse || a == b) return kFalse;
    if (b == kFalse) return a;
    check_same_length(a, b);
    if (NodeRef r; probe(OpTag::Minus, a, b, 0, r)) return r;
    std::vector<Entry> spine;
    NodeRef pa = a, pb = b;
    while (pa != kFalse) {
      if (pb == kFalse || nodes_[pa].value < nodes_[pb].value) {
        spine.push_back({nodes_[pa].value, nodes_[pa].down});
        pa = nodes_[pa].right;
      } else if (nodes_[pb].value < nodes_[pa].value) {
        pb = nodes_[pb].right;
      } else {
        NodeRef d = minus(nodes_[pa].down, nodes_[pb].down);
        if (d != kFalse) spine.push_back({nodes_[pa].value, d});
        pa = nodes_[pa].right;
        pb = nodes_[pb].right;
      }
    }
    NodeRef r = fold(spine);
    store(OpTag::Minus, a, b, 0, r);
    return r;
  }

  NodeRef intersect(NodeRef a, NodeRef b) {
    if (a == b) return a;
    if (a == kFalse || b == kFalse) return kFalse;
    check_same_length(a, b);
    if (a > b) std::swap(a, b);
    if (NodeRef r; probe(OpTag::Intersect, a, b, 0, r)) return r;
    std::vector<Entry> spine;
    NodeRef pa = a, pb = b;
    while (pa != kFalse && pb != kFalse) {
      if (nodes_[pa].value < nodes_[pb].value) {
        pa = nodes_[pa].right;
      } else if (nodes_[pb].value < nodes_[pa].value) {
        pb = nodes_[pb].right;
      } else {
        NodeRef d = intersect(nodes_[pa].down, nodes_[pb].down);
        if (d != kFalse) spine.push_back({nodes_[pa].value, d});
        pa = nodes_[pa].right;
        pb = nodes_[pb].right;
      }
    }
    NodeRef r = fold(spine);
    store(OpTag::Intersect, a, b, 0, r);
    return r;
  }

  uint64_t sat_count(NodeRef n) {
    if (n == kFalse) return 0;
    if (n == kTrue) return 1;
    uint64_t cached;
    if (probe64(OpTag::SatCount, n, 0, 0, cached)) return cached;
    uint64_t total = 0;
    for (NodeRef p = n; p != kFalse; p = nodes_[p].right)
      total += sat_count(nodes_[p].down);
    store64(OpTag::SatCount, n, 0, 0, total);
    return total;
  }

  // In-order (lexicographic) enumeration; fn(vec) returns false to stop.
  template <typename Fn>
  void enumerate(NodeRef set, Fn&& fn) const {
    if (set == kFalse) return;
    StateVector scratch;
    enumerate_rec(set, scratch, fn);
  }

  std::vector<StateVector> to_vectors(NodeRef set) const {
    std::vector<StateVector> out;
    enumerate(set, [&](const StateVector& v) {
      out.push_back(v);
      return true;
    });
    return out;
  }

  // Builds the canonical LDD of a vector set in one bottom-up pass (far
  // cheaper than repeated single inserts for large batches).
  NodeRef from_vectors(std::vector<StateVector> vs) {
    if (vs.empty()) return kFalse;
    for (const auto& v : vs)
      if (v.size() != vs.front().size())
        throw ModelError("ldd: mixed vector lengths");
    std::sort(vs.begin(), vs.end());
    return build_sorted(vs, 0, vs.size(), 0);
  }

  // --- projection and the copy-aware relational product -------------------

  // Restriction of every vector to the positions where mask is set;
  // an all-zero mask collapses any non-empty set to {eps}.
  NodeRef project(NodeRef set, const std::vector<bool>& mask) {
    if (set == kFalse) return kFalse;
    if (depth(set) != mask.size())
      throw ModelError("ldd: project mask length mismatch");
    return project_rec(set, intern_mask(mask), 0);
  }

  // States of `set` whose mask-projection lies in `proj_set`.
  NodeRef match_projection(NodeRef set, NodeRef proj_set,
                           const std::vector<bool>& mask) {
    if (set == kFalse || proj_set == kFalse) return kFalse;
    if (depth(set) != mask.size())
      throw ModelError("ldd: match mask length mismatch");
    return match_rec(set, proj_set, intern_mask(mask), 0);
  }

  // The learned sources of a relation (read-projected states with at least
  // one successor).
  NodeRef rel_sources(const PartialRelation& pr) {
    if (pr.rel == kFalse) return kFalse;
    std::vector<bool> mask(pr.source_len() + pr.target_len(), false);
    for (size_t i = 0; i < pr.source_len(); ++i) mask[i] = true;
    return project(pr.rel, mask);
  }

  // Extends a partial relation with one learned source and its
  // write-projected successors. The source is recorded as visited even when
  // the list is empty (a disabled source is a cached result too).
  PartialRelation rel_insert(const PartialRelation& pr, const StateVector& src,
                             const std::vector<StateVector>& dsts) {
    if (src.size() != pr.source_len())
      throw ModelError("ldd: relation source length mismatch");
    PartialRelation out = pr;
    StateVector pair;
    for (const auto& d : dsts) {
      if (d.size() != pr.target_len())
        throw ModelError("ldd: relation target length mismatch");
      pair = src;
      pair.insert(pair.end(), d.begin(), d.end());
      out.rel = insert(out.rel, pair);
    }
    out.visited_sources = insert(out.visited_sources, src);
    return out;
  }

  // The paper's `next`: successor states of `set` under the learned pairs of
  // `pr`. Write positions take the target components; every other position
  // (read or not) keeps the source state's value, which is exactly the
  // read-copy rule.
  NodeRef next(NodeRef set, const PartialRelation& pr) {
    if (set == kFalse || pr.rel == kFalse) return kFalse;
    if (depth(set) != pr.read_mask.size())
      throw ModelError("ldd: next applied to vectors of the wrong length");
    uint32_t rid = intern_mask(pr.read_mask);
    uint32_t wid = intern_mask(pr.write_mask);
    NodeRef srcs = intersect(project_rec(set, rid, 0), rel_sources(pr));
    NodeRef acc = kFalse;
    enumerate(srcs, [&](const StateVector& src) {
      NodeRef dsts = descend(pr.rel, src);
      acc = set_union(acc, apply_pair(set, singleton(src), dsts, rid, wid, 0));
      return true;
    });
    return acc;
  }

  // --- diagnostics ---------------------------------------------------------

  // DOT rendering with one rank per vector position; down edges solid,
  // right edges dashed.
  std::string dot(NodeRef root, const std::vector<std::string>& level_names = {}) const {
    std::string out = "digraph ldd {\n  node [shape=box];\n";
    if (root == kFalse) return out + "}\n";
    std::map<NodeRef, size_t> id;
    std::vector<NodeRef> order;
    collect_nodes(root, id, order);
    out += "  t [label=\"eps\", shape=ellipse];\n";
    for (NodeRef n : order) {
      size_t lvl = level_names.empty()
                       ? 0
                       : level_names.size() - nodes_[n].depth;
      std::string label = std::to_string(nodes_[n].value);
      if (!level_names.empty() && lvl < level_names.size())
        label = level_names[lvl] + "=" + label;
      out += "  n" + std::to_string(id[n]) + " [label=\"" + label + "\"];\n";
    }
    for (NodeRef n : order) {
      std::string me = "n" + std::to_string(id[n]);
      NodeRef d = nodes_[n].down;
      out += "  " + me + " -> " +
             (d == kTrue ? std::string("t") : "n" + std::to_string(id[d])) +
             ";\n";
      if (nodes_[n].right != kFalse)
        out += "  " + me + " -> n" + std::to_string(id[nodes_[n].right]) +
               " [style=dashed];\n";
    }
    return out + "}\n";
  }

 private:
  static constexpr uint32_t kNoDepth = 0xFFFFFFFFu;

  struct Node {
    uint32_t value;
    NodeRef down;
    NodeRef right;
    uint32_t depth;
  };

  struct CacheEntry {
    uint64_t a, b, c;
    uint64_t result;
  };

  struct Entry {
    uint32_t value;
    NodeRef down;
  };

  enum class OpTag : uint64_t {
    Union = 1, Minus, Intersect, SatCount, Project, DropTop, Apply, Match,
  };

  // --- hashing / unique table ---------------------------------------------

  static uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

  static uint64_t hash_node(uint32_t value, NodeRef down, NodeRef right) {
    return mix64((uint64_t(value) << 40) ^ (uint64_t(down) << 20) ^ right);
  }

  void grow_table() {
    ++stats_.table_resizes;
    std::vector<uint32_t> old = std::move(table_);
    table_.assign(old.size() * 2, 0);
    size_t mask = table_.size() - 1;
    for (size_t ref = 2; ref < nodes_.size(); ++ref) {
      const Node& n = nodes_[ref];
      size_t i = static_cast<size_t>(hash_node(n.value, n.down, n.right)) & mask;
      while (table_[i] != 0) i = (i + 1) & mask;
      table_[i] = static_cast<uint32_t>(ref);
    }
  }

  // --- operation cache -----------------------------------------------------

  bool probe_raw(uint64_t a, uint64_t b, uint64_t c, uint64_t& out) {
    if (!cfg_.cache_enabled) return false;
    size_t i = static_cast<size_t>(mix64(a ^ mix64(b) ^ mix64(c + 1))) &
               (cache_size_ - 1);
    const CacheEntry& e = cache_[i];
    if (e.a == a && e.b == b && e.c == c) {
      ++stats_.cache_hits;
      out = e.result;
      return true;
    }
    ++stats_.cache_misses;
    return false;
  }

  void store_raw(uint64_t a, uint64_t b, uint64_t c, uint64_t result) {
    if (!cfg_.cache_enabled) return;
    size_t i = static_cast<size_t>(mix64(a ^ mix64(b) ^ mix64(c + 1))) &
               (cache_size_ - 1);
    cache_[i] = {a, b, c, result};
  }

  static uint64_t key_a(OpTag op, NodeRef x) {
    return (static_cast<uint64_t>(op) << 56) | x;
  }

  bool probe(OpTag op, NodeRef x, uint64_t b, uint64_t c, NodeRef& out) {
    uint64_t r;
    if (!probe_raw(key_a(op, x), b, c, r)) return false;
    out = static_cast<NodeRef>(r);
    return true;
  }
  void store(OpTag op, NodeRef x, uint64_t b, uint64_t c, NodeRef result) {
    store_raw(key_a(op, x), b, c, result);
  }
  bool probe64(OpTag op, NodeRef x, uint64_t b, uint64_t c, uint64_t& out) {
    return probe_raw(key_a(op, x), b, c, out);
  }
  void store64(OpTag op, NodeRef x, uint64_t b, uint64_t c, uint64_t result) {
    store_raw(key_a(op, x), b, c, result);
  }

  // --- helpers ---------------------------------------------------------------

  void check_same_length(NodeRef a, NodeRef b) const {
    if (nodes_[a].depth != nodes_[b].depth)
      throw ModelError("ldd: operands hold vectors of different lengths");
  }

  NodeRef find(NodeRef chain, uint32_t v) const {
    while (chain != kFalse && nodes_[chain].value < v)
      chain = nodes_[chain].right;
    return (chain != kFalse && nodes_[chain].value == v) ? chain : kFalse;
  }

  // Builds a right-chain from entries sorted by value.
  NodeRef fold(const std::vector<Entry>& spine) {
    NodeRef acc = kFalse;
    for (size_t i = spine.size(); i-- > 0;)
      acc = mk(spine[i].value, spine[i].down, acc);
    return acc;
  }

  // vs[lo..hi) sorted; duplicates collapse on their own.
  NodeRef build_sorted(const std::vector<StateVector>& vs, size_t lo, size_t hi,
                       size_t level) {
    if (level == vs.front().size()) return kTrue;
    std::vector<Entry> spine;
    size_t i = lo;
    while (i < hi) {
      uint32_t v = vs[i][level];
      size_t j = i;
      while (j < hi && vs[j][level] == v) ++j;
      spine.push_back({v, build_sorted(vs, i, j, level + 1)});
      i = j;
    }
    return fold(spine);
  }

  template <typename Fn>
  bool enumerate_rec(NodeRef n, StateVector& scratch, Fn&& fn) const {
    if (n == kTrue) return fn(scratch);
    for (NodeRef p = n; p != kFalse; p = nodes_[p].right) {
      scratch.push_back(nodes_[p].value);
      bool go = enumerate_rec(nodes_[p].down, scratch, fn);
      scratch.pop_back();
      if (!go) return false;
    }
    return true;
  }

  uint32_t intern_mask(const std::vector<bool>& mask) {
    auto it = mask_ids_.find(mask);
    if (it != mask_ids_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(masks_.size());
    masks_.push_back(mask);
    mask_ids_.emplace(mask, id);
    return id;
  }

  NodeRef project_rec(NodeRef n, uint32_t mask_id, uint32_t level) {
    if (n == kTrue) return kTrue;
    uint64_t key_c = (uint64_t(mask_id) << 8) | level;
    if (NodeRef r; probe(OpTag::Project, n, key_c, 0, r)) return r;
    const std::vector<bool>& mask = masks_[mask_id];
    NodeRef result;
    if (mask[level]) {
      std::vector<Entry> spine;
      for (NodeRef p = n; p != kFalse; p = nodes_[p].right)
        spine.push_back(
            {nodes_[p].value, project_rec(nodes_[p].down, mask_id, level + 1)});
      result = fold(spine);
    } else {
      result = kFalse;
      for (NodeRef p = n; p != kFalse; p = nodes_[p].right)
        result = set_union(result, project_rec(nodes_[p].down, mask_id, level + 1));
    }
    store(OpTag::Project, n, key_c, 0, result);
    return result;
  }

  NodeRef match_rec(NodeRef s, NodeRef q, uint32_t mask_id, uint32_t level) {
    if (s == kTrue) return kTrue;  // q == kTrue as well: projection consumed
    uint64_t key_c = (uint64_t(mask_id) << 8) | level;
    if (NodeRef r; probe(OpTag::Match, s, q, key_c, r)) return r;
    const std::vector<bool>& mask = masks_[mask_id];
    std::vector<Entry> spine;
    if (mask[level]) {
      NodeRef ps = s, pq = q;
      while (ps != kFalse && pq != kFalse) {
        if (nodes_[ps].value < nodes_[pq].value) {
          ps = nodes_[ps].right;
        } else if (nodes_[pq].value < nodes_[ps].value) {
          pq = nodes_[pq].right;
        } else {
          NodeRef d =
              match_rec(nodes_[ps].down, nodes_[pq].down, mask_id, level + 1);
          if (d != kFalse) spine.push_back({nodes_[ps].value, d});
          ps = nodes_[ps].right;
          pq = nodes_[pq].right;
        }
      }
    } else {
      for (NodeRef p = s; p != kFalse; p = nodes_[p].right) {
        NodeRef d = match_rec(nodes_[p].down, q, mask_id, level + 1);
        if (d != kFalse) spine.push_back({nodes_[p].value, d});
      }
    }
    NodeRef result = fold(spine);
    store(OpTag::Match, s, q, key_c, result);
    return result;
  }

  // Union of the down-sets across a whole right-chain (drops one level).
  NodeRef drop_top(NodeRef n) {
    if (NodeRef r; probe(OpTag::DropTop, n, 0, 0, r)) return r;
    NodeRef result = kFalse;
    for (NodeRef p = n; p != kFalse; p = nodes_[p].right)
      result = set_union(result, nodes_[p].down);
    store(OpTag::DropTop, n, 0, 0, result);
    return result;
  }

  // Relation sub-diagram after consuming a concrete source prefix.
  NodeRef descend(NodeRef rel, const StateVector& src) const {
    NodeRef n = rel;
    for (uint32_t v : src) {
      n = find(n, v);
      assert(n != kFalse && "descend: source not present in relation");
      n = nodes_[n].down;
    }
    return n;
  }

  // One (source, targets) pair applied to a state set: match the source at
  // read positions, copy at non-write positions, emit target values at write
  // positions. `src` is the interned singleton path of the source (its
  // node identity doubles as the cache key component).
  NodeRef apply_pair(NodeRef s, NodeRef src, NodeRef dsts, uint32_t rid,
                     uint32_t wid, uint32_t level) {
    const std::vector<bool>& rmask = masks_[rid];
    if (level == rmask.size()) return kTrue;  // s, src, dsts all at {eps}
    uint64_t key_b = (uint64_t(src) << 32) | dsts;
    uint64_t key_c = (uint64_t(rid) << 40) | (uint64_t(wid) << 16) | level;
    if (NodeRef r; probe(OpTag::Apply, s, key_b, key_c, r)) return r;
    const std::vector<bool>& wmask = masks_[wid];
    bool rd = rmask[level], wr = wmask[level];
    NodeRef result = kFalse;
    std::vector<Entry> spine;
    if (rd) {
      NodeRef sn = find(s, nodes_[src].value);
      if (sn != kFalse) {
        NodeRef sd = nodes_[sn].down;
        NodeRef src_rest = nodes_[src].down;
        if (wr) {
          for (NodeRef p = dsts; p != kFalse; p = nodes_[p].right) {
            NodeRef inner =
                apply_pair(sd, src_rest, nodes_[p].down, rid, wid, level + 1);
            if (inner != kFalse) spine.push_back({nodes_[p].value, inner});
          }
          result = fold(spine);
        } else {
          NodeRef inner = apply_pair(sd, src_rest, dsts, rid, wid, level + 1);
          if (inner != kFalse) result = mk(nodes_[src].value, inner, kFalse);
        }
      }
    } else if (wr) {
      NodeRef su = drop_top(s);
      for (NodeRef p = dsts; p != kFalse; p = nodes_[p].right) {
        NodeRef inner = apply_pair(su, src, nodes_[p].down, rid, wid, level + 1);
        if (inner != kFalse) spine.push_back({nodes_[p].value, inner});
      }
      result = fold(spine);
    } else {
      for (NodeRef p = s; p != kFalse; p = nodes_[p].right) {
        NodeRef inner =
            apply_pair(nodes_[p].down, src, dsts, rid, wid, level + 1);
        if (inner != kFalse) spine.push_back({nodes_[p].value, inner});
      }
      result = fold(spine);
    }
    store(OpTag::Apply, s, key_b, key_c, result);
    return result;
  }

  void collect_nodes(NodeRef n, std::map<NodeRef, size_t>& id,
                     std::vector<NodeRef>& order) const {
    if (n <= kTrue || id.count(n)) return;
    id.emplace(n, id.size());
    order.push_back(n);
    collect_nodes(nodes_[n].down, id, order);
    collect_nodes(nodes_[n].right, id, order);
  }

  struct FreeDeleter {
    void operator()(CacheEntry* p) const { std::free(p); }
  };

  StoreConfig cfg_;
  std::vector<Node> nodes_;
  std::vector<uint32_t> table_;
  std::unique_ptr<CacheEntry[], FreeDeleter> cache_;
  size_t cache_size_ = 0;
  StoreStats stats_;
  std::vector<std::vector<bool>> masks_;
  std::map<std::vector<bool>, uint32_t> mask_ids_;
};

}  // namespace reach::ldd
