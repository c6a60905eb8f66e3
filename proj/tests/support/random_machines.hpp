#pragma once

#include <random>
#include <string>
#include <vector>

#include "reach/ast.hpp"

// Seeded generator of small well-typed machines (N <= 4 variables, domains
// <= 4 values, M <= 6 operations) covering parameters, IF and ANY forms.
// Integer assignments are clamped into the target domain, so every generated
// machine explores without runtime model errors.

namespace reach::testing {

class MachineGen {
 public:
  explicit MachineGen(uint64_t seed) : rng_(seed) {}

  Machine machine() {
    Machine m;
    m.name = "Rand" + std::to_string(counter_++);
    vars_.clear();
    fresh_ = 0;

    bool with_enum = chance(40);
    if (with_enum) {
      SetDecl s;
      s.name = "KIND";
      int labels = pick(2, 4);
      for (int k = 0; k < labels; ++k)
        s.labels.push_back("K" + std::to_string(k));
      m.sets.push_back(s);
      enum_labels_ = s.labels;
    } else {
      enum_labels_.clear();
    }

    int n = pick(1, 4);
    std::vector<Assignment> init;
    for (int j = 0; j < n; ++j) {
      VariableDecl v;
      v.name = "v" + std::to_string(j);
      int kind = pick(0, 9);
      if (kind < 3) {
        v.domain.kind = DomainExpr::Kind::Bool;
        vars_.push_back({v.name, Kind::Bool, 0});
      } else if (kind < 8 || enum_labels_.empty()) {
        long hi = pick(1, 3);
        v.domain.kind = DomainExpr::Kind::Range;
        v.domain.lo = mk_int(0);
        v.domain.hi = mk_int(hi);
        vars_.push_back({v.name, Kind::Int, hi});
      } else {
        v.domain.kind = DomainExpr::Kind::SetRef;
        v.domain.set_name = "KIND";
        vars_.push_back(
            {v.name, Kind::Enum, static_cast<long>(enum_labels_.size()) - 1});
      }
      m.variables.push_back(v);
      init.push_back({v.name, literal_for(vars_.back()), {}, -1});
    }
    m.initialisation = mk_parallel(std::move(init));

    int ops = pick(0, 6);
    for (int i = 0; i < ops; ++i) m.operations.push_back(operation(i));
    return m;
  }

 private:
  enum class Kind { Bool, Int, Enum };

  struct Operand {
    std::string name;
    Kind kind;
    long hi;  // Int: inclusive max (lo is 0); Enum: labels-1
  };

  OperationDecl operation(int idx) {
    OperationDecl op;
    op.name = "op" + std::to_string(idx);
    params_.clear();
    int nparams = chance(35) ? pick(1, 2) : 0;
    for (int p = 0; p < nparams; ++p) {
      ParamDecl pd;
      pd.name = "p" + std::to_string(fresh_++);
      if (chance(30)) {
        pd.domain.kind = DomainExpr::Kind::Bool;
        params_.push_back({pd.name, Kind::Bool, 0});
      } else {
        long hi = pick(1, 2);
        pd.domain.kind = DomainExpr::Kind::Range;
        pd.domain.lo = mk_int(0);
        pd.domain.hi = mk_int(hi);
        params_.push_back({pd.name, Kind::Int, hi});
      }
      op.params.push_back(pd);
    }
    int atoms = pick(0, 3);
    PredPtr guard;
    for (int a = 0; a < atoms; ++a) {
      PredPtr at = atom();
      guard = guard ? mk_and(guard, at) : at;
    }
    op.guard = guard ? guard : mk_cmp(Pred::CmpOp::Eq, mk_int(0), mk_int(0));
    op.body = stmt(2);
    params_.clear();
    return op;
  }

  StmtPtr stmt(int depth) {
    int w = pick(0, 9);
    if (depth > 0 && w < 3) {  // IF
      PredPtr c = atom();
      StmtPtr t = stmt(depth - 1);
      StmtPtr e = chance(50) ? stmt(depth - 1) : nullptr;
      return mk_if(c, t, e);
    }
    if (depth > 0 && w < 5) {  // ANY
      ParamDecl pd;
      pd.name = "q" + std::to_string(fresh_++);
      long hi = pick(1, 2);
      pd.domain.kind = DomainExpr::Kind::Range;
      pd.domain.lo = mk_int(0);
      pd.domain.hi = mk_int(hi);
      params_.push_back({pd.name, Kind::Int, hi});
      PredPtr where = chance(60) ? atom() : nullptr;
      StmtPtr body = stmt(depth - 1);
      params_.pop_back();
      return mk_any({pd}, where, body);
    }
    if (w < 9 && !vars_.empty()) {  // parallel assignment
      std::vector<Assignment> as;
      std::vector<size_t> targets;
      int count = pick(1, static_cast<int>(std::min<size_t>(3, vars_.size())));
      while (static_cast<int>(targets.size()) < count) {
        size_t t = static_cast<size_t>(pick(0, static_cast<int>(vars_.size()) - 1));
        bool dup = false;
        for (size_t x : targets) dup |= x == t;
        if (!dup) targets.push_back(t);
      }
      for (size_t t : targets)
        as.push_back({vars_[t].name, rhs_for(vars_[t]), {}, -1});
      return mk_parallel(std::move(as));
    }
    return mk_skip();
  }

  // Atoms are type-correct by construction and may use anything in scope
  // (variables plus the parameters currently on the stack).
  PredPtr atom() {
    Kind k = pick_kind();
    ExprPtr a = operand(k);
    if (k == Kind::Int && chance(25)) {
      // membership over an explicit enumeration or a range
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::Member;
      p->lhs = a;
      p->negated = chance(30);
      if (chance(50)) {
        p->mrhs = Pred::MemberRhs::Elems;
        int n = pick(1, 3);
        for (int i = 0; i < n; ++i) p->elems.push_back(mk_int(pick(0, 3)));
      } else {
        p->mrhs = Pred::MemberRhs::Range;
        long lo = pick(0, 2);
        p->lo_e = mk_int(lo);
        p->hi_e = mk_int(lo + pick(0, 2));
      }
      return p;
    }
    Pred::CmpOp op;
    if (k == Kind::Int) {
      constexpr Pred::CmpOp ops[] = {Pred::CmpOp::Eq, Pred::CmpOp::Ne,
                                     Pred::CmpOp::Lt, Pred::CmpOp::Le,
                                     Pred::CmpOp::Gt, Pred::CmpOp::Ge};
      op = ops[pick(0, 5)];
    } else {
      op = chance(50) ? Pred::CmpOp::Eq : Pred::CmpOp::Ne;
    }
    PredPtr cmp = mk_cmp(op, a, operand(k));
    if (chance(15)) cmp = mk_not(cmp);
    if (chance(15)) cmp = mk_or(cmp, mk_cmp(op, operand(k), operand(k)));
    return cmp;
  }

  Kind pick_kind() {
    std::vector<Kind> kinds;
    for (const auto& v : vars_) kinds.push_back(v.kind);
    for (const auto& p : params_) kinds.push_back(p.kind);
    if (kinds.empty()) return Kind::Int;
    return kinds[static_cast<size_t>(pick(0, static_cast<int>(kinds.size()) - 1))];
  }

  // A leaf expression of the requested kind drawn from literals, variables
  // and in-scope parameters.
  ExprPtr operand(Kind k) {
    std::vector<const Operand*> pool;
    for (const auto& v : vars_)
      if (v.kind == k) pool.push_back(&v);
    for (const auto& p : params_)
      if (p.kind == k) pool.push_back(&p);
    bool lit = pool.empty() || chance(35);
    if (lit) {
      switch (k) {
        case Kind::Bool: return mk_bool(chance(50));
        case Kind::Int: return mk_int(pick(0, 3));
        case Kind::Enum:
          return mk_name(enum_labels_[static_cast<size_t>(
              pick(0, static_cast<int>(enum_labels_.size()) - 1))]);
      }
    }
    return mk_name(pool[static_cast<size_t>(
        pick(0, static_cast<int>(pool.size()) - 1))]->name);
  }

  ExprPtr literal_for(const Operand& v) {
    switch (v.kind) {
      case Kind::Bool: return mk_bool(chance(50));
      case Kind::Int: return mk_int(pick(0, static_cast<int>(v.hi)));
      case Kind::Enum:
        return mk_name(enum_labels_[static_cast<size_t>(
            pick(0, static_cast<int>(v.hi)))]);
    }
    return mk_int(0);
  }

  // Right-hand side for an assignment to v; integer arithmetic is clamped
  // into 0..hi so exploration cannot leave the domain.
  ExprPtr rhs_for(const Operand& v) {
    if (v.kind != Kind::Int || chance(40)) return same_kind_source(v);
    ExprPtr a = operand(Kind::Int);
    ExprPtr b = operand(Kind::Int);
    constexpr Expr::Kind ops[] = {Expr::Kind::Add, Expr::Kind::Sub,
                                  Expr::Kind::Mul, Expr::Kind::Min,
                                  Expr::Kind::Max};
    ExprPtr e = mk_binary(ops[pick(0, 4)], a, b);
    return mk_binary(Expr::Kind::Max, mk_int(0),
                     mk_binary(Expr::Kind::Min, mk_int(v.hi), e));
  }

  ExprPtr same_kind_source(const Operand& v) {
    // literal, or a variable/parameter with the identical domain
    std::vector<const Operand*> pool;
    for (const auto& o : vars_)
      if (o.kind == v.kind && o.hi == v.hi) pool.push_back(&o);
    for (const auto& o : params_)
      if (o.kind == v.kind && o.hi <= v.hi) pool.push_back(&o);
    if (!pool.empty() && chance(55))
      return mk_name(pool[static_cast<size_t>(
          pick(0, static_cast<int>(pool.size()) - 1))]->name);
    return literal_for(v);
  }

  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool chance(int percent) { return pick(1, 100) <= percent; }

  std::mt19937_64 rng_;
  int counter_ = 0;
  int fresh_ = 0;
  std::vector<std::string> enum_labels_;
  std::vector<Operand> vars_;
  std::vector<Operand> params_;
};

}  // namespace reach::testing
