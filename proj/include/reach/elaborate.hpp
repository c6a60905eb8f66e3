#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reach/ast.hpp"

// Elaboration turns a parsed Machine into an executable model: constants are
// bound, domains become concrete and finite, operations are normalized
// (parameter-dependent guard conjuncts move into an ANY around the action),
// and names are resolved to variable indices / parameter slots. The parsed
// AST is never mutated; elaboration works on resolved clones.

namespace reach {

// ---------------------------------------------------------------------------
// Normalization (purely syntactic, runs before resolution).

namespace detail {

inline bool expr_mentions(const ExprPtr& e, const std::set<std::string>& names) {
  if (!e) return false;
  if (e->kind == Expr::Kind::Name && names.count(e->name)) return true;
  return expr_mentions(e->lhs, names) || expr_mentions(e->rhs, names);
}

inline bool pred_mentions(const PredPtr& p, const std::set<std::string>& names) {
  if (!p) return false;
  switch (p->kind) {
    case Pred::Kind::True: return false;
    case Pred::Kind::Not: return pred_mentions(p->a, names);
    case Pred::Kind::And:
    case Pred::Kind::Or:
      return pred_mentions(p->a, names) || pred_mentions(p->b, names);
    case Pred::Kind::Cmp:
      return expr_mentions(p->lhs, names) || expr_mentions(p->rhs, names);
    case Pred::Kind::Member: {
      if (expr_mentions(p->lhs, names)) return true;
      for (const auto& e : p->elems)
        if (expr_mentions(e, names)) return true;
      return expr_mentions(p->lo_e, names) || expr_mentions(p->hi_e, names);
    }
  }
  return false;
}

}  // namespace detail

// Rewrites "op(p) = SELECT G(p) THEN S" into the guard/action split the
// dependency analysis needs: conjuncts of G that mention a parameter become
// the WHERE of an ANY wrapping S, the rest stay as the (parameter-free)
// guard. Successor sets are preserved. Parameterless operations come back
// unchanged.
inline NormalizedOperation normalize(const OperationDecl& op) {
  NormalizedOperation n;
  n.name = op.name;
  if (op.params.empty()) {
    n.guard = op.guard ? op.guard : mk_true();
    n.body = op.body;
    return n;
  }
  std::set<std::string> pnames;
  for (const auto& p : op.params) pnames.insert(p.name);
  std::vector<PredPtr> stays, moved;
  if (op.guard) {
    std::vector<PredPtr> conjuncts;
    collect_conjuncts(op.guard, conjuncts);
    for (const auto& c : conjuncts)
      (detail::pred_mentions(c, pnames) ? moved : stays).push_back(c);
  }
  n.guard = stays.empty() ? mk_true() : conjoin(stays);
  n.body = mk_any(op.params, moved.empty() ? nullptr : conjoin(moved), op.body,
                  op.pos);
  return n;
}

// ---------------------------------------------------------------------------
// Elaborated model.

struct Group {
  std::string name;
  // Top-level parameters are only present when elaborating without
  // normalization (the reference form used to validate the rewrite).
  std::vector<std::string> param_names;
  std::vector<Domain> param_domains;
  PredPtr guard;  // resolved; parameter-free iff normalized
  StmtPtr body;   // resolved
};

struct ElabOptions {
  bool normalize_ops = true;
  uint64_t any_cap = 1'000'000;    // candidate tuples per ANY evaluation
  uint64_t init_cap = 100'000;     // distinct initial states
  uint64_t max_domain = 1u << 24;  // values per variable domain
  size_t max_variables = 63;
};

struct ElaboratedMachine {
  std::string name;
  std::vector<std::string> var_names;
  std::vector<Domain> domains;
  std::vector<Group> groups;
  std::vector<StateVector> initial_states;  // lexicographically sorted
  std::vector<PredPtr> properties;          // resolved INVARIANT extras
  std::vector<SetDecl> sets;
  std::map<std::string, long> constants;
  ElabOptions options;
  std::shared_ptr<const Machine> source;  // for re-elaboration under an order

  size_t var_count() const { return domains.size(); }
  size_t group_count() const { return groups.size(); }

  int var_index(const std::string& n) const {
    for (size_t j = 0; j < var_names.size(); ++j)
      if (var_names[j] == n) return static_cast<int>(j);
    return -1;
  }
  int group_index(const std::string& n) const {
    for (size_t i = 0; i < groups.size(); ++i)
      if (groups[i].name == n) return static_cast<int>(i);
    return -1;
  }

  std::string state_name(const StateVector& s) const {
    std::string out;
    for (size_t j = 0; j < var_names.size(); ++j) {
      if (j) out += " ";
      out += var_names[j] + "=" + domains[j].value_name(s[j]);
    }
    return out;
  }
};

namespace detail {

class Resolver {
 public:
  struct Binding {
    int slot;
    Type type;
  };
  using Scope = std::map<std::string, Binding>;

  Resolver(const Machine& m, const std::map<std::string, long>& overrides,
           const ElabOptions& opts, const std::vector<size_t>* var_order)
      : opts_(opts) {
    for (const auto& c : m.constants) {
      auto it = overrides.find(c.name);
      if (it != overrides.end())
        consts_[c.name] = it->second;
      else if (c.value)
        consts_[c.name] = *c.value;
      else
        throw ModelError("constant '" + c.name +
                         "' has no value; pass an override");
    }
    for (const auto& kv : overrides)
      if (!consts_.count(kv.first))
        throw ModelError("override for unknown constant '" + kv.first + "'");
    for (const auto& s : m.sets) {
      int id = static_cast<int>(sets_.size());
      set_ids_[s.name] = id;
      for (size_t k = 0; k < s.labels.size(); ++k)
        enum_labels_[s.labels[k]] = {id, static_cast<int>(k)};
      sets_.push_back(s);
    }
    size_t n = m.variables.size();
    if (n > opts.max_variables)
      throw ModelError("too many variables (" + std::to_string(n) + "; limit " +
                       std::to_string(opts.max_variables) + ")");
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (var_order) {
      if (!valid_permutation(*var_order, n))
        throw ModelError("variable order is not a permutation");
      order = *var_order;
    }
    for (size_t pos = 0; pos < n; ++pos) {
      const VariableDecl& v = m.variables[order[pos]];
      var_index_[v.name] = pos;
      var_names_.push_back(v.name);
      domains_.push_back(resolve_domain(v.domain, v.name));
    }
  }

  static bool valid_permutation(const std::vector<size_t>& p, size_t n) {
    if (p.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (size_t v : p) {
      if (v >= n || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }

  Domain resolve_domain(const DomainExpr& d, const std::string& what) {
    Domain out;
    switch (d.kind) {
      case DomainExpr::Kind::Bool:
        out.kind = Domain::Kind::Bool;
        return out;
      case DomainExpr::Kind::Range: {
        out.kind = Domain::Kind::Range;
        out.lo = eval_const(d.lo, what);
        out.hi = eval_const(d.hi, what);
        if (out.lo > out.hi)
          throw ModelError("empty domain " + std::to_string(out.lo) + ".." +
                           std::to_string(out.hi) + " for " + what);
        if (static_cast<uint64_t>(out.hi - out.lo + 1) > opts_.max_domain)
          throw ModelError("domain of " + what + " exceeds the size limit");
        return out;
      }
      case DomainExpr::Kind::SetRef: {
        auto it = set_ids_.find(d.set_name);
        if (it == set_ids_.end())
          throw ModelError("unknown set '" + d.set_name + "' typing " + what);
        out.kind = Domain::Kind::Enum;
        out.enum_id = it->second;
        out.set_name = d.set_name;
        out.labels = sets_[it->second].labels;
        return out;
      }
    }
    throw ModelError("bad domain for " + what);
  }

  long eval_const(const ExprPtr& e, const std::string& what) {
    if (!e) throw ModelError("missing bound in domain of " + what);
    switch (e->kind) {
      case Expr::Kind::IntLit: return e->value;
      case Expr::Kind::Name: {
        auto it = consts_.find(e->name);
        if (it == consts_.end())
          throw ParseError("unknown identifier '" + e->name + "'", e->pos);
        return it->second;
      }
      case Expr::Kind::Add:
        return eval_const(e->lhs, what) + eval_const(e->rhs, what);
      case Expr::Kind::Sub:
        return eval_const(e->lhs, what) - eval_const(e->rhs, what);
      case Expr::Kind::Mul:
        return eval_const(e->lhs, what) * eval_const(e->rhs, what);
      case Expr::Kind::Min:
        return std::min(eval_const(e->lhs, what), eval_const(e->rhs, what));
      case Expr::Kind::Max:
        return std::max(eval_const(e->lhs, what), eval_const(e->rhs, what));
      default:
        throw ParseError("expected a constant integer expression", e->pos);
    }
  }

  struct Resolved {
    ExprPtr expr;
    Type type;
  };

  Resolved resolve_expr(const ExprPtr& e) {
    auto out = std::make_shared<Expr>(*e);
    switch (e->kind) {
      case Expr::Kind::IntLit:
        out->type = {TypeKind::Int, -1};
        return {out, out->type};
      case Expr::Kind::BoolLit:
        out->type = {TypeKind::Bool, -1};
        return {out, out->type};
      case Expr::Kind::EnumLit:
        out->type = {TypeKind::Enum, e->enum_id};
        return {out, out->type};
      case Expr::Kind::Name: {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
          auto f = it->find(e->name);
          if (f != it->end()) {
            out->ref = Expr::RefKind::Param;
            out->index = f->second.slot;
            out->type = f->second.type;
            return {out, out->type};
          }
        }
        if (auto it = var_index_.find(e->name); it != var_index_.end()) {
          out->ref = Expr::RefKind::Var;
          out->index = static_cast<int>(it->second);
          out->type = domains_[it->second].type();
          return {out, out->type};
        }
        if (auto it = consts_.find(e->name); it != consts_.end()) {
          out->kind = Expr::Kind::IntLit;
          out->value = it->second;
          out->type = {TypeKind::Int, -1};
          return {out, out->type};
        }
        if (auto it = enum_labels_.find(e->name); it != enum_labels_.end()) {
          out->kind = Expr::Kind::EnumLit;
          out->enum_id = it->second.first;
          out->value = it->second.second;
          out->type = {TypeKind::Enum, it->second.first};
          return {out, out->type};
        }
        throw ParseError("unknown identifier '" + e->name + "'", e->pos);
      }
      case Expr::Kind::Add:
      case Expr::Kind::Sub:
      case Expr::Kind::Mul:
      case Expr::Kind::Min:
      case Expr::Kind::Max: {
        auto l = resolve_expr(e->lhs);
        auto r = resolve_expr(e->rhs);
        require_int(l.type, e->lhs->pos);
        require_int(r.type, e->rhs->pos);
        out->lhs = l.expr;
        out->rhs = r.expr;
        out->type = {TypeKind::Int, -1};
        return {out, out->type};
      }
    }
    throw ModelError("unreachable expression kind");
  }

  PredPtr resolve_pred(const PredPtr& p) {
    auto out = std::make_shared<Pred>(*p);
    switch (p->kind) {
      case Pred::Kind::True: return out;
      case Pred::Kind::Not:
        out->a = resolve_pred(p->a);
        return out;
      case Pred::Kind::And:
      case Pred::Kind::Or:
        out->a = resolve_pred(p->a);
        out->b = resolve_pred(p->b);
        return out;
      case Pred::Kind::Cmp: {
        auto l = resolve_expr(p->lhs);
        auto r = resolve_expr(p->rhs);
        if (l.type != r.type)
          throw ParseError("comparison between incompatible types (" +
                               to_string(l.type) + " vs " + to_string(r.type) +
                               ")",
                           p->pos);
        if (p->op != Pred::CmpOp::Eq && p->op != Pred::CmpOp::Ne)
          require_int(l.type, p->pos);
        out->lhs = l.expr;
        out->rhs = r.expr;
        return out;
      }
      case Pred::Kind::Member: {
        auto el = resolve_expr(p->lhs);
        out->lhs = el.expr;
        switch (p->mrhs) {
          case Pred::MemberRhs::Elems: {
            out->elems.clear();
            for (const auto& e : p->elems) {
              auto r = resolve_expr(e);
              if (!is_literal(*r.expr))
                throw ParseError("set elements must be literals or constants",
                                 e->pos);
              if (r.type != el.type)
                throw ParseError("set element type mismatch", e->pos);
              out->elems.push_back(r.expr);
            }
            return out;
          }
          case Pred::MemberRhs::Range: {
            require_int(el.type, p->pos);
            out->lo_e = mk_int(eval_const(p->lo_e, "range bound"), p->pos);
            out->hi_e = mk_int(eval_const(p->hi_e, "range bound"), p->pos);
            return out;
          }
          case Pred::MemberRhs::SetName: {
            if (p->set_name == "BOOL") {
              if (el.type.kind != TypeKind::Bool)
                throw ParseError("membership in BOOL needs a BOOL element",
                                 p->pos);
              return out;
            }
            auto it = set_ids_.find(p->set_name);
            if (it == set_ids_.end())
              throw ParseError("unknown set '" + p->set_name + "'", p->pos);
            if (el.type.kind != TypeKind::Enum || el.type.enum_id != it->second)
              throw ParseError("membership in " + p->set_name +
                                   " needs an element of that set",
                               p->pos);
            return out;
          }
        }
        throw ModelError("unreachable member kind");
      }
    }
    throw ModelError("unreachable predicate kind");
  }

  StmtPtr resolve_stmt(const StmtPtr& s, const std::string& op_name) {
    auto out = std::make_shared<Stmt>(*s);
    switch (s->kind) {
      case Stmt::Kind::Skip: return out;
      case Stmt::Kind::Parallel: {
        std::set<std::string> targets;
        for (auto& a : out->assigns) {
          if (!targets.insert(a.target).second)
            throw ParseError("operation '" + op_name + "' assigns '" +
                                 a.target + "' twice in one substitution",
                             a.pos);
          auto it = var_index_.find(a.target);
          if (it == var_index_.end())
            throw ParseError(
                "assignment to unknown variable '" + a.target + "'", a.pos);
          a.var_index = static_cast<int>(it->second);
          auto r = resolve_expr(a.value);
          if (r.type != domains_[it->second].type())
            throw ParseError(
                "assignment to '" + a.target + "' has mismatched type", a.pos);
          a.value = r.expr;
        }
        return out;
      }
      case Stmt::Kind::If: {
        out->cond = resolve_pred(s->cond);
        out->then_s = resolve_stmt(s->then_s, op_name);
        if (s->else_s) out->else_s = resolve_stmt(s->else_s, op_name);
        return out;
      }
      case Stmt::Kind::Any: {
        out->param_domains.clear();
        Scope scope;
        for (const auto& p : s->params) {
          check_fresh(p.name, scope, p.pos);
          Domain d = resolve_domain(p.domain, "parameter " + p.name);
          int slot = next_slot_++;
          scope[p.name] = {slot, d.type()};
          out->param_domains.push_back(std::move(d));
        }
        scopes_.push_back(scope);
        if (s->where) out->where = resolve_pred(s->where);
        out->body = resolve_stmt(s->body, op_name);
        scopes_.pop_back();
        next_slot_ -= static_cast<int>(s->params.size());
        return out;
      }
    }
    throw ModelError("unreachable statement kind");
  }

  Group resolve_group(const std::string& name,
                      const std::vector<ParamDecl>& params,
                      const PredPtr& guard, const StmtPtr& body) {
    Group g;
    g.name = name;
    Scope scope;
    for (const auto& p : params) {
      check_fresh(p.name, scope, p.pos);
      Domain d = resolve_domain(p.domain, "parameter " + p.name);
      int slot = next_slot_++;
      scope[p.name] = {slot, d.type()};
      g.param_names.push_back(p.name);
      g.param_domains.push_back(std::move(d));
    }
    if (!params.empty()) scopes_.push_back(scope);
    g.guard = guard ? resolve_pred(guard) : mk_true();
    g.body = resolve_stmt(body, name);
    if (!params.empty()) {
      scopes_.pop_back();
      next_slot_ -= static_cast<int>(params.size());
    }
    return g;
  }

  const std::map<std::string, long>& constants() const { return consts_; }
  const std::vector<std::string>& var_names() const { return var_names_; }
  const std::vector<Domain>& domains() const { return domains_; }
  const std::vector<SetDecl>& sets() const { return sets_; }

 private:
  static bool is_literal(const Expr& e) {
    return e.kind == Expr::Kind::IntLit || e.kind == Expr::Kind::BoolLit ||
           e.kind == Expr::Kind::EnumLit;
  }

  void check_fresh(const std::string& n, const Scope& current, SourcePos pos) {
    if (var_index_.count(n) || consts_.count(n) || enum_labels_.count(n) ||
        set_ids_.count(n) || current.count(n))
      throw ParseError("parameter '" + n + "' shadows an existing name", pos);
    for (const auto& sc : scopes_)
      if (sc.count(n))
        throw ParseError("parameter '" + n + "' shadows an existing name", pos);
  }

  void require_int(const Type& t, SourcePos pos) {
    if (t.kind != TypeKind::Int)
      throw ParseError("expected an integer operand", pos);
  }

  ElabOptions opts_;
  std::map<std::string, long> consts_;
  std::map<std::string, int> set_ids_;
  std::map<std::string, std::pair<int, int>> enum_labels_;
  std::vector<SetDecl> sets_;
  std::map<std::string, size_t> var_index_;
  std::vector<std::string> var_names_;
  std::vector<Domain> domains_;
  std::vector<Scope> scopes_;
  int next_slot_ = 0;
};

// Evaluates the resolved INITIALISATION statement. State variables cannot be
// read here (there is no pre-state); expressions see only parameters and
// folded constants.
class InitEval {
 public:
  InitEval(const std::vector<Domain>& domains, const ElabOptions& opts)
      : domains_(domains), opts_(opts) {}

  std::vector<StateVector> run(const Stmt& s) {
    exec(s);
    if (out_.empty())
      throw ModelError("INITIALISATION produced no initial state");
    return {out_.begin(), out_.end()};
  }

 private:
  long eval_expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
      case Expr::Kind::BoolLit:
      case Expr::Kind::EnumLit: return e.value;
      case Expr::Kind::Name:
        if (e.ref == Expr::RefKind::Param)
          return frame_[static_cast<size_t>(e.index)];
        throw ModelError("INITIALISATION must not read variable '" + e.name +
                         "'");
      case Expr::Kind::Add: return eval_expr(*e.lhs) + eval_expr(*e.rhs);
      case Expr::Kind::Sub: return eval_expr(*e.lhs) - eval_expr(*e.rhs);
      case Expr::Kind::Mul: return eval_expr(*e.lhs) * eval_expr(*e.rhs);
      case Expr::Kind::Min:
        return std::min(eval_expr(*e.lhs), eval_expr(*e.rhs));
      case Expr::Kind::Max:
        return std::max(eval_expr(*e.lhs), eval_expr(*e.rhs));
    }
    throw ModelError("unreachable");
  }

  bool eval_pred(const Pred& p) {
    switch (p.kind) {
      case Pred::Kind::True: return true;
      case Pred::Kind::Not: return !eval_pred(*p.a);
      case Pred::Kind::And: return eval_pred(*p.a) && eval_pred(*p.b);
      case Pred::Kind::Or: return eval_pred(*p.a) || eval_pred(*p.b);
      case Pred::Kind::Cmp: {
        long l = eval_expr(*p.lhs), r = eval_expr(*p.rhs);
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
        long v = eval_expr(*p.lhs);
        bool in = false;
        switch (p.mrhs) {
          case Pred::MemberRhs::Elems:
            for (const auto& e : p.elems)
              if (eval_expr(*e) == v) {
                in = true;
                break;
              }
            break;
          case Pred::MemberRhs::Range:
            in = v >= p.lo_e->value && v <= p.hi_e->value;
            break;
          case Pred::MemberRhs::SetName:
            in = true;  // type-correct membership in a whole set
            break;
        }
        return p.negated ? !in : in;
      }
    }
    return false;
  }

  void exec(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Skip: emit({}); return;
      case Stmt::Kind::Parallel: {
        std::vector<std::pair<size_t, uint32_t>> writes;
        for (const auto& a : s.assigns) {
          long v = eval_expr(*a.value);
          size_t j = static_cast<size_t>(a.var_index);
          auto idx = domains_[j].index_of(v);
          if (!idx)
            throw ModelError("INITIALISATION assigns out-of-domain value " +
                             std::to_string(v) + " to '" + a.target + "'");
          writes.emplace_back(j, *idx);
        }
        emit(writes);
        return;
      }
      case Stmt::Kind::If:
        if (eval_pred(*s.cond))
          exec(*s.then_s);
        else if (s.else_s)
          exec(*s.else_s);
        else
          emit({});
        return;
      case Stmt::Kind::Any: {
        uint64_t tuples = 1;
        for (const auto& d : s.param_domains) {
          tuples *= d.size();
          if (tuples > opts_.any_cap)
            throw ModelError("ANY enumeration exceeds the candidate cap");
        }
        size_t k = s.params.size();
        std::vector<uint32_t> idx(k, 0);
        size_t base = frame_.size();
        frame_.resize(base + k);
        while (true) {
          for (size_t i = 0; i < k; ++i)
            frame_[base + i] = s.param_domains[i].value_at(idx[i]);
          if (!s.where || eval_pred(*s.where)) exec(*s.body);
          size_t i = 0;
          for (; i < k; ++i) {
            if (++idx[i] < s.param_domains[i].size()) break;
            idx[i] = 0;
          }
          if (i == k) break;
        }
        frame_.resize(base);
        return;
      }
    }
  }

  void emit(const std::vector<std::pair<size_t, uint32_t>>& writes) {
    std::vector<bool> assigned(domains_.size(), false);
    StateVector s(domains_.size(), 0);
    for (const auto& [j, idx] : writes) {
      assigned[j] = true;
      s[j] = idx;
    }
    for (size_t j = 0; j < domains_.size(); ++j)
      if (!assigned[j])
        throw ModelError(
            "INITIALISATION leaves a variable unassigned on some path");
    if (out_.insert(std::move(s)).second && out_.size() > opts_.init_cap)
      throw ModelError("INITIALISATION exceeds the initial-state cap");
  }

  const std::vector<Domain>& domains_;
  ElabOptions opts_;
  std::vector<long> frame_;
  std::set<StateVector> out_;
};

}  // namespace detail

// Produces the executable model. The optional var_order remaps variable
// positions (order[pos] = original index placed at pos); it is what order
// application uses under the hood.
inline ElaboratedMachine elaborate(
    const Machine& m, const std::map<std::string, long>& overrides = {},
    const ElabOptions& opts = {}, const std::vector<size_t>* var_order = nullptr) {
  detail::Resolver r(m, overrides, opts, var_order);
  ElaboratedMachine em;
  em.name = m.name;
  em.var_names = r.var_names();
  em.domains = r.domains();
  em.sets = r.sets();
  em.constants = r.constants();
  em.options = opts;
  em.source = std::make_shared<Machine>(m);
  for (const auto& op : m.operations) {
    if (opts.normalize_ops) {
      NormalizedOperation nop = normalize(op);
      em.groups.push_back(r.resolve_group(nop.name, {}, nop.guard, nop.body));
    } else {
      em.groups.push_back(
          r.resolve_group(op.name, op.params, op.guard, op.body));
    }
  }
  for (const auto& p : m.properties)
    em.properties.push_back(r.resolve_pred(p));
  if (!m.initialisation) throw ModelError("machine has no INITIALISATION");
  StmtPtr init = r.resolve_stmt(m.initialisation, "INITIALISATION");
  detail::InitEval ie(em.domains, opts);
  em.initial_states = ie.run(*init);
  return em;
}

}  // namespace reach
