#pragma once

#include <set>
#include <string>
#include <vector>

#include "reach/elaborate.hpp"

// Syntactic read/write analysis per transition group and the M x N
// dependency matrices. A 0 in the read (write) matrix certifies read
// (write) independence; construction is conservative: may-written variables
// are marked both read- and write-dependent, and IF conditions count as
// action reads even when the branches write identically.

namespace reach {

struct RWSets {
  std::set<size_t> guard_reads;
  std::set<size_t> action_reads;
  std::set<size_t> must_write;
  std::set<size_t> may_write;
};

namespace detail {

inline void collect_var_reads(const ExprPtr& e, std::set<size_t>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Name && e->ref == Expr::RefKind::Var)
    out.insert(static_cast<size_t>(e->index));
  collect_var_reads(e->lhs, out);
  collect_var_reads(e->rhs, out);
}

inline void collect_var_reads(const PredPtr& p, std::set<size_t>& out) {
  if (!p) return;
  switch (p->kind) {
    case Pred::Kind::True: return;
    case Pred::Kind::Not: collect_var_reads(p->a, out); return;
    case Pred::Kind::And:
    case Pred::Kind::Or:
      collect_var_reads(p->a, out);
      collect_var_reads(p->b, out);
      return;
    case Pred::Kind::Cmp:
      collect_var_reads(p->lhs, out);
      collect_var_reads(p->rhs, out);
      return;
    case Pred::Kind::Member:
      collect_var_reads(p->lhs, out);
      for (const auto& e : p->elems) collect_var_reads(e, out);
      collect_var_reads(p->lo_e, out);
      collect_var_reads(p->hi_e, out);
      return;
  }
}

inline void collect_stmt_reads(const StmtPtr& s, std::set<size_t>& out) {
  if (!s) return;
  switch (s->kind) {
    case Stmt::Kind::Skip: return;
    case Stmt::Kind::Parallel:
      for (const auto& a : s->assigns) collect_var_reads(a.value, out);
      return;
    case Stmt::Kind::If:
      collect_var_reads(s->cond, out);
      collect_stmt_reads(s->then_s, out);
      collect_stmt_reads(s->else_s, out);
      return;
    case Stmt::Kind::Any:
      collect_var_reads(s->where, out);
      collect_stmt_reads(s->body, out);
      return;
  }
}

struct StmtWrites {
  std::set<size_t> must;
  std::set<size_t> may;  // written on some but not all paths
};

inline StmtWrites collect_writes(const StmtPtr& s) {
  StmtWrites w;
  if (!s) return w;
  switch (s->kind) {
    case Stmt::Kind::Skip: return w;
    case Stmt::Kind::Parallel:
      for (const auto& a : s->assigns)
        w.must.insert(static_cast<size_t>(a.var_index));
      return w;
    case Stmt::Kind::If: {
      StmtWrites a = collect_writes(s->then_s);
      StmtWrites b = collect_writes(s->else_s);  // missing else writes nothing
      std::set<size_t> all;
      all.insert(a.must.begin(), a.must.end());
      all.insert(a.may.begin(), a.may.end());
      all.insert(b.must.begin(), b.must.end());
      all.insert(b.may.begin(), b.may.end());
      for (size_t j : all) {
        if (a.must.count(j) && b.must.count(j))
          w.must.insert(j);
        else
          w.may.insert(j);
      }
      return w;
    }
    case Stmt::Kind::Any:
      return collect_writes(s->body);
  }
  return w;
}

}  // namespace detail

// Requires a normalized group (parameter conjuncts already moved into the
// action); the guard reads are then exactly the frees of the parameter-free
// guard.
inline RWSets rw_sets(const Group& g) {
  if (!g.param_names.empty())
    throw ModelError("rw_sets requires a normalized operation");
  RWSets rw;
  detail::collect_var_reads(g.guard, rw.guard_reads);
  detail::collect_stmt_reads(g.body, rw.action_reads);
  detail::StmtWrites w = detail::collect_writes(g.body);
  rw.must_write = std::move(w.must);
  rw.may_write = std::move(w.may);
  return rw;
}

enum class ReadClass { Dep, CopyIndep, OverwriteIndep };
enum class WriteClass { Dep, Indep };

struct DependencyMatrices {
  size_t groups = 0;
  size_t vars = 0;
  std::vector<std::vector<bool>> rm;  // read matrix
  std::vector<std::vector<bool>> wm;  // write matrix

  ReadClass read_class(size_t i, size_t j) const {
    if (rm[i][j]) return ReadClass::Dep;
    return wm[i][j] ? ReadClass::OverwriteIndep : ReadClass::CopyIndep;
  }
  WriteClass write_class(size_t i, size_t j) const {
    return wm[i][j] ? WriteClass::Dep : WriteClass::Indep;
  }
};

// RM[i][j] = read in guard or action, or may-written; WM[i][j] = written on
// any path. A conditional write forces the read bit because the successor
// depends on whether the old value survives.
inline DependencyMatrices build_matrices(const ElaboratedMachine& em) {
  DependencyMatrices dm;
  dm.groups = em.group_count();
  dm.vars = em.var_count();
  dm.rm.assign(dm.groups, std::vector<bool>(dm.vars, false));
  dm.wm.assign(dm.groups, std::vector<bool>(dm.vars, false));
  for (size_t i = 0; i < dm.groups; ++i) {
    RWSets rw = rw_sets(em.groups[i]);
    for (size_t j : rw.guard_reads) dm.rm[i][j] = true;
    for (size_t j : rw.action_reads) dm.rm[i][j] = true;
    for (size_t j : rw.must_write) dm.wm[i][j] = true;
    for (size_t j : rw.may_write) {
      dm.wm[i][j] = true;
      dm.rm[i][j] = true;
    }
  }
  return dm;
}

inline ReadClass classify_read(const DependencyMatrices& dm, size_t i,
                               size_t j) {
  return dm.read_class(i, j);
}

inline WriteClass classify_write(const DependencyMatrices& dm, size_t i,
                                 size_t j) {
  return dm.write_class(i, j);
}

// Dump format: header row of variable names, then one line per group
// "name: r=0110 w=0100" with bit order equal to variable order.
inline std::string matrix_dump(const ElaboratedMachine& em,
                               const DependencyMatrices& dm) {
  std::string out;
  for (size_t j = 0; j < em.var_count(); ++j) {
    if (j) out += " ";
    out += em.var_names[j];
  }
  out += "\n";
  for (size_t i = 0; i < dm.groups; ++i) {
    out += em.groups[i].name + ": r=";
    for (size_t j = 0; j < dm.vars; ++j) out += dm.rm[i][j] ? '1' : '0';
    out += " w=";
    for (size_t j = 0; j < dm.vars; ++j) out += dm.wm[i][j] ? '1' : '0';
    out += "\n";
  }
  return out;
}

}  // namespace reach
