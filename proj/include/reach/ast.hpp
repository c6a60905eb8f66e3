#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reach/base.hpp"

// Abstract syntax for the B-lite guarded-command language plus the concrete
// (elaborated) finite domains. Parsed trees are immutable; elaboration
// produces resolved clones and never mutates what the parser returned.

namespace reach {

enum class TypeKind { Int, Bool, Enum };

struct Type {
  TypeKind kind = TypeKind::Int;
  int enum_id = -1;  // valid when kind == Enum

  bool operator==(const Type& o) const {
    return kind == o.kind && (kind != TypeKind::Enum || enum_id == o.enum_id);
  }
  bool operator!=(const Type& o) const { return !(*this == o); }
};

inline std::string to_string(const Type& t) {
  switch (t.kind) {
    case TypeKind::Int: return "INTEGER";
    case TypeKind::Bool: return "BOOL";
    case TypeKind::Enum: return "enumerated set #" + std::to_string(t.enum_id);
  }
  return "?";
}

// A concrete, finite variable domain. Values are addressed by index:
// BOOL is [FALSE,TRUE], ranges ascending, enumerations in declaration order.
struct Domain {
  enum class Kind { Bool, Range, Enum };

  Kind kind = Kind::Bool;
  long lo = 0, hi = 0;              // Range
  int enum_id = -1;                 // Enum
  std::string set_name;             // Enum: declaring set, may be empty
  std::vector<std::string> labels;  // Enum

  size_t size() const {
    switch (kind) {
      case Kind::Bool: return 2;
      case Kind::Range: return static_cast<size_t>(hi - lo + 1);
      case Kind::Enum: return labels.size();
    }
    return 0;
  }

  // Semantic value carried by an index (enum/bool values are their ordinals).
  long value_at(uint32_t idx) const {
    return kind == Kind::Range ? lo + static_cast<long>(idx)
                               : static_cast<long>(idx);
  }

  std::optional<uint32_t> index_of(long value) const {
    long base = kind == Kind::Range ? lo : 0;
    long n = static_cast<long>(size());
    if (value < base || value >= base + n) return std::nullopt;
    return static_cast<uint32_t>(value - base);
  }

  std::string value_name(uint32_t idx) const {
    switch (kind) {
      case Kind::Bool: return idx ? "TRUE" : "FALSE";
      case Kind::Range: return std::to_string(lo + static_cast<long>(idx));
      case Kind::Enum: return labels[idx];
    }
    return "?";
  }

  Type type() const {
    switch (kind) {
      case Kind::Bool: return {TypeKind::Bool, -1};
      case Kind::Range: return {TypeKind::Int, -1};
      case Kind::Enum: return {TypeKind::Enum, enum_id};
    }
    return {};
  }

  bool operator==(const Domain& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::Bool: return true;
      case Kind::Range: return lo == o.lo && hi == o.hi;
      case Kind::Enum: return labels == o.labels;
    }
    return false;
  }
};

struct Expr;
struct Pred;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using PredPtr = std::shared_ptr<const Pred>;
using StmtPtr = std::shared_ptr<const Stmt>;

// A domain as written in the source; range bounds may mention constants and
// are only evaluated at elaboration time.
struct DomainExpr {
  enum class Kind { Bool, Range, SetRef };
  Kind kind = Kind::Bool;
  ExprPtr lo, hi;        // Range
  std::string set_name;  // SetRef
};

struct Expr {
  enum class Kind { IntLit, BoolLit, EnumLit, Name, Add, Sub, Mul, Min, Max };
  enum class RefKind { Unresolved, Var, Param };

  Kind kind = Kind::IntLit;
  long value = 0;        // IntLit; BoolLit 0/1; EnumLit ordinal
  int enum_id = -1;      // EnumLit
  std::string name;      // Name; EnumLit keeps its label here for printing
  ExprPtr lhs, rhs;      // binary operators, min, max
  SourcePos pos;

  // Filled on elaborated clones only.
  RefKind ref = RefKind::Unresolved;
  int index = -1;  // variable index or parameter slot
  Type type;       // of this expression, once resolved
};

struct Pred {
  enum class Kind { True, Not, And, Or, Cmp, Member };
  enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
  enum class MemberRhs { Elems, Range, SetName };

  Kind kind = Kind::True;
  CmpOp op = CmpOp::Eq;          // Cmp
  PredPtr a, b;                  // Not(a); And/Or(a, b)
  ExprPtr lhs, rhs;              // Cmp operands; Member element in lhs
  bool negated = false;          // Member: written with /:
  MemberRhs mrhs = MemberRhs::Elems;
  std::vector<ExprPtr> elems;    // Member over an explicit enumeration
  ExprPtr lo_e, hi_e;            // Member over a range
  std::string set_name;          // Member over BOOL or a declared set
  SourcePos pos;
};

struct ParamDecl {
  std::string name;
  DomainExpr domain;
  SourcePos pos;
};

struct Assignment {
  std::string target;
  ExprPtr value;
  SourcePos pos;
  int var_index = -1;  // resolved clones only
};

struct Stmt {
  enum class Kind { Parallel, If, Any, Skip };

  Kind kind = Kind::Skip;
  std::vector<Assignment> assigns;   // Parallel
  PredPtr cond;                      // If
  StmtPtr then_s, else_s;            // If; else_s may be null (implicit skip)
  std::vector<ParamDecl> params;     // Any
  PredPtr where;                     // Any; null means no constraint
  StmtPtr body;                      // Any
  std::vector<Domain> param_domains; // resolved clones only
  SourcePos pos;
};

struct OperationDecl {
  std::string name;
  std::vector<ParamDecl> params;
  PredPtr guard;  // null for BEGIN ... END operations
  StmtPtr body;
  SourcePos pos;
};

// Result of moving parameter-dependent guard conjuncts into the action.
struct NormalizedOperation {
  std::string name;
  PredPtr guard;  // parameter-free; Pred::True when everything moved
  StmtPtr body;   // original body, ANY-wrapped when the operation had params
};

struct VariableDecl {
  std::string name;
  DomainExpr domain;  // from the typing conjunct of INVARIANT
  SourcePos pos;
};

struct SetDecl {
  std::string name;
  std::vector<std::string> labels;
};

struct ConstantDecl {
  std::string name;
  std::optional<long> value;  // default, overridable at elaboration
};

struct Machine {
  std::string name;
  std::vector<SetDecl> sets;
  std::vector<ConstantDecl> constants;
  std::vector<VariableDecl> variables;  // order defines state-vector indices
  std::vector<PredPtr> properties;      // non-typing INVARIANT conjuncts
  StmtPtr initialisation;
  std::vector<OperationDecl> operations;
};

// ---------------------------------------------------------------------------
// Structural equality, ignoring source positions and resolution annotations.

inline bool ast_equal(const ExprPtr& a, const ExprPtr& b);
inline bool ast_equal(const PredPtr& a, const PredPtr& b);
inline bool ast_equal(const StmtPtr& a, const StmtPtr& b);

inline bool ast_equal(const DomainExpr& a, const DomainExpr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case DomainExpr::Kind::Bool: return true;
    case DomainExpr::Kind::Range:
      return ast_equal(a.lo, b.lo) && ast_equal(a.hi, b.hi);
    case DomainExpr::Kind::SetRef: return a.set_name == b.set_name;
  }
  return false;
}

inline bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit: return a->value == b->value;
    case Expr::Kind::EnumLit:
      return a->value == b->value && a->name == b->name;
    case Expr::Kind::Name: return a->name == b->name;
    default:
      return ast_equal(a->lhs, b->lhs) && ast_equal(a->rhs, b->rhs);
  }
}

inline bool ast_equal(const PredPtr& a, const PredPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Pred::Kind::True: return true;
    case Pred::Kind::Not: return ast_equal(a->a, b->a);
    case Pred::Kind::And:
    case Pred::Kind::Or:
      return ast_equal(a->a, b->a) && ast_equal(a->b, b->b);
    case Pred::Kind::Cmp:
      return a->op == b->op && ast_equal(a->lhs, b->lhs) &&
             ast_equal(a->rhs, b->rhs);
    case Pred::Kind::Member: {
      if (a->negated != b->negated || a->mrhs != b->mrhs ||
          !ast_equal(a->lhs, b->lhs))
        return false;
      switch (a->mrhs) {
        case Pred::MemberRhs::Elems: {
          if (a->elems.size() != b->elems.size()) return false;
          for (size_t i = 0; i < a->elems.size(); ++i)
            if (!ast_equal(a->elems[i], b->elems[i])) return false;
          return true;
        }
        case Pred::MemberRhs::Range:
          return ast_equal(a->lo_e, b->lo_e) && ast_equal(a->hi_e, b->hi_e);
        case Pred::MemberRhs::SetName: return a->set_name == b->set_name;
      }
      return false;
    }
  }
  return false;
}

inline bool ast_equal(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Stmt::Kind::Skip: return true;
    case Stmt::Kind::Parallel: {
      if (a->assigns.size() != b->assigns.size()) return false;
      for (size_t i = 0; i < a->assigns.size(); ++i) {
        if (a->assigns[i].target != b->assigns[i].target ||
            !ast_equal(a->assigns[i].value, b->assigns[i].value))
          return false;
      }
      return true;
    }
    case Stmt::Kind::If:
      return ast_equal(a->cond, b->cond) && ast_equal(a->then_s, b->then_s) &&
             ast_equal(a->else_s, b->else_s);
    case Stmt::Kind::Any: {
      if (a->params.size() != b->params.size()) return false;
      for (size_t i = 0; i < a->params.size(); ++i) {
        if (a->params[i].name != b->params[i].name ||
            !ast_equal(a->params[i].domain, b->params[i].domain))
          return false;
      }
      return ast_equal(a->where, b->where) && ast_equal(a->body, b->body);
    }
  }
  return false;
}

inline bool ast_equal(const OperationDecl& a, const OperationDecl& b) {
  if (a.name != b.name || a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name ||
        !ast_equal(a.params[i].domain, b.params[i].domain))
      return false;
  }
  return ast_equal(a.guard, b.guard) && ast_equal(a.body, b.body);
}

inline bool ast_equal(const Machine& a, const Machine& b) {
  if (a.name != b.name) return false;
  if (a.sets.size() != b.sets.size()) return false;
  for (size_t i = 0; i < a.sets.size(); ++i)
    if (a.sets[i].name != b.sets[i].name || a.sets[i].labels != b.sets[i].labels)
      return false;
  if (a.constants.size() != b.constants.size()) return false;
  for (size_t i = 0; i < a.constants.size(); ++i)
    if (a.constants[i].name != b.constants[i].name ||
        a.constants[i].value != b.constants[i].value)
      return false;
  if (a.variables.size() != b.variables.size()) return false;
  for (size_t i = 0; i < a.variables.size(); ++i)
    if (a.variables[i].name != b.variables[i].name ||
        !ast_equal(a.variables[i].domain, b.variables[i].domain))
      return false;
  if (a.properties.size() != b.properties.size()) return false;
  for (size_t i = 0; i < a.properties.size(); ++i)
    if (!ast_equal(a.properties[i], b.properties[i])) return false;
  if (!ast_equal(a.initialisation, b.initialisation)) return false;
  if (a.operations.size() != b.operations.size()) return false;
  for (size_t i = 0; i < a.operations.size(); ++i)
    if (!ast_equal(a.operations[i], b.operations[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Construction helpers (used by the parser, elaboration and tests).

inline ExprPtr mk_int(long v, SourcePos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::IntLit;
  e->value = v;
  e->pos = pos;
  e->type = {TypeKind::Int, -1};
  return e;
}

inline ExprPtr mk_bool(bool v, SourcePos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::BoolLit;
  e->value = v ? 1 : 0;
  e->pos = pos;
  e->type = {TypeKind::Bool, -1};
  return e;
}

inline ExprPtr mk_name(std::string n, SourcePos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Name;
  e->name = std::move(n);
  e->pos = pos;
  return e;
}

inline ExprPtr mk_binary(Expr::Kind k, ExprPtr l, ExprPtr r, SourcePos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  e->pos = pos;
  return e;
}

inline PredPtr mk_true() {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::Kind::True;
  return p;
}

inline PredPtr mk_cmp(Pred::CmpOp op, ExprPtr l, ExprPtr r, SourcePos pos = {}) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::Kind::Cmp;
  p->op = op;
  p->lhs = std::move(l);
  p->rhs = std::move(r);
  p->pos = pos;
  return p;
}

inline PredPtr mk_and(PredPtr a, PredPtr b, SourcePos pos = {}) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::Kind::And;
  p->a = std::move(a);
  p->b = std::move(b);
  p->pos = pos;
  return p;
}

inline PredPtr mk_or(PredPtr a, PredPtr b, SourcePos pos = {}) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::Kind::Or;
  p->a = std::move(a);
  p->b = std::move(b);
  p->pos = pos;
  return p;
}

inline PredPtr mk_not(PredPtr a, SourcePos pos = {}) {
  auto p = std::make_shared<Pred>();
  p->kind = Pred::Kind::Not;
  p->a = std::move(a);
  p->pos = pos;
  return p;
}

inline StmtPtr mk_skip(SourcePos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = Stmt::Kind::Skip;
  s->pos = pos;
  return s;
}

inline StmtPtr mk_parallel(std::vector<Assignment> assigns, SourcePos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = Stmt::Kind::Parallel;
  s->assigns = std::move(assigns);
  s->pos = pos;
  return s;
}

inline StmtPtr mk_if(PredPtr c, StmtPtr t, StmtPtr e, SourcePos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = Stmt::Kind::If;
  s->cond = std::move(c);
  s->then_s = std::move(t);
  s->else_s = std::move(e);
  s->pos = pos;
  return s;
}

inline StmtPtr mk_any(std::vector<ParamDecl> params, PredPtr where, StmtPtr body,
                      SourcePos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = Stmt::Kind::Any;
  s->params = std::move(params);
  s->where = std::move(where);
  s->body = std::move(body);
  s->pos = pos;
  return s;
}

// Splits a conjunction into its top-level conjuncts.
inline void collect_conjuncts(const PredPtr& p, std::vector<PredPtr>& out) {
  if (!p) return;
  if (p->kind == Pred::Kind::And) {
    collect_conjuncts(p->a, out);
    collect_conjuncts(p->b, out);
  } else {
    out.push_back(p);
  }
}

inline PredPtr conjoin(const std::vector<PredPtr>& ps) {
  if (ps.empty()) return mk_true();
  PredPtr acc = ps.front();
  for (size_t i = 1; i < ps.size(); ++i) acc = mk_and(acc, ps[i]);
  return acc;
}

}  // namespace reach
