#pragma once

#include <sstream>
#include <string>

#include "reach/ast.hpp"

// Canonical pretty-printer. Output is byte-stable for a given machine and
// reparses to a structurally equal AST: parse_machine(print(m)) == m.

namespace reach {

namespace detail {

class Printer {
 public:
  std::string print(const Machine& m) {
    out_.str("");
    out_ << "MACHINE " << m.name << "\n";
    if (!m.sets.empty()) {
      out_ << "SETS\n";
      for (size_t i = 0; i < m.sets.size(); ++i) {
        out_ << "  " << m.sets[i].name << " = {";
        join_names(m.sets[i].labels);
        out_ << "}";
        if (i + 1 < m.sets.size()) out_ << ";";
        out_ << "\n";
      }
    }
    if (!m.constants.empty()) {
      out_ << "CONSTANTS ";
      for (size_t i = 0; i < m.constants.size(); ++i) {
        if (i) out_ << ", ";
        out_ << m.constants[i].name;
        if (m.constants[i].value) out_ << " = " << *m.constants[i].value;
      }
      out_ << "\n";
    }
    out_ << "VARIABLES ";
    for (size_t i = 0; i < m.variables.size(); ++i) {
      if (i) out_ << ", ";
      out_ << m.variables[i].name;
    }
    out_ << "\n";
    out_ << "INVARIANT\n";
    bool first = true;
    for (const auto& v : m.variables) {
      out_ << (first ? "  " : "  & ") << v.name << " : ";
      print_domain(v.domain);
      out_ << "\n";
      first = false;
    }
    for (const auto& p : m.properties) {
      out_ << (first ? "  " : "  & ");
      print_pred(*p, 0);
      out_ << "\n";
      first = false;
    }
    out_ << "INITIALISATION\n  ";
    print_stmt(*m.initialisation, 1);
    out_ << "\n";
    out_ << "OPERATIONS\n";
    for (size_t i = 0; i < m.operations.size(); ++i) {
      print_operation(m.operations[i]);
      if (i + 1 < m.operations.size()) out_ << ";";
      out_ << "\n";
    }
    out_ << "END\n";
    return out_.str();
  }

  std::string print_expr_str(const Expr& e) {
    out_.str("");
    print_expr(e, 0);
    return out_.str();
  }

  std::string print_pred_str(const Pred& p) {
    out_.str("");
    print_pred(p, 0);
    return out_.str();
  }

 private:
  void join_names(const std::vector<std::string>& ns) {
    for (size_t i = 0; i < ns.size(); ++i) {
      if (i) out_ << ", ";
      out_ << ns[i];
    }
  }

  void print_domain(const DomainExpr& d) {
    switch (d.kind) {
      case DomainExpr::Kind::Bool: out_ << "BOOL"; break;
      case DomainExpr::Kind::Range:
        print_expr(*d.lo, 0);
        out_ << "..";
        print_expr(*d.hi, 0);
        break;
      case DomainExpr::Kind::SetRef: out_ << d.set_name; break;
    }
  }

  void print_operation(const OperationDecl& op) {
    out_ << "  " << op.name;
    if (!op.params.empty()) {
      out_ << "(";
      for (size_t i = 0; i < op.params.size(); ++i) {
        if (i) out_ << ", ";
        out_ << op.params[i].name << " : ";
        print_domain(op.params[i].domain);
      }
      out_ << ")";
    }
    out_ << " = ";
    if (op.guard) {
      out_ << "SELECT ";
      print_pred(*op.guard, 0);
      out_ << " THEN ";
      print_stmt(*op.body, 2);
      out_ << " END";
    } else {
      out_ << "BEGIN ";
      print_stmt(*op.body, 2);
      out_ << " END";
    }
  }

  void print_stmt(const Stmt& s, int depth) {
    switch (s.kind) {
      case Stmt::Kind::Skip: out_ << "skip"; break;
      case Stmt::Kind::Parallel:
        for (size_t i = 0; i < s.assigns.size(); ++i) {
          if (i) out_ << " || ";
          out_ << s.assigns[i].target << " := ";
          print_expr(*s.assigns[i].value, 0);
        }
        break;
      case Stmt::Kind::If:
        out_ << "IF ";
        print_pred(*s.cond, 0);
        out_ << " THEN ";
        print_stmt(*s.then_s, depth + 1);
        if (s.else_s) {
          out_ << " ELSE ";
          print_stmt(*s.else_s, depth + 1);
        }
        out_ << " END";
        break;
      case Stmt::Kind::Any:
        out_ << "ANY ";
        for (size_t i = 0; i < s.params.size(); ++i) {
          if (i) out_ << ", ";
          out_ << s.params[i].name << " : ";
          print_domain(s.params[i].domain);
        }
        if (s.where) {
          out_ << " WHERE ";
          print_pred(*s.where, 0);
        }
        out_ << " THEN ";
        print_stmt(*s.body, depth + 1);
        out_ << " END";
        break;
    }
  }

  // prec: 0 = or, 1 = and, 2 = atom
  void print_pred(const Pred& p, int prec) {
    switch (p.kind) {
      case Pred::Kind::True:
        // canonical spelling for the trivial guard
        out_ << "0 = 0";
        break;
      case Pred::Kind::Not:
        out_ << "not(";
        print_pred(*p.a, 0);
        out_ << ")";
        break;
      case Pred::Kind::Or: {
        bool paren = prec > 0;
        if (paren) out_ << "(";
        print_pred(*p.a, 0);
        out_ << " or ";
        print_pred(*p.b, 1);  // right operand must not re-associate
        if (paren) out_ << ")";
        break;
      }
      case Pred::Kind::And: {
        bool paren = prec > 1;
        if (paren) out_ << "(";
        print_pred(*p.a, 1);
        out_ << " & ";
        print_pred(*p.b, 2);
        if (paren) out_ << ")";
        break;
      }
      case Pred::Kind::Cmp: {
        print_expr(*p.lhs, 0);
        switch (p.op) {
          case Pred::CmpOp::Eq: out_ << " = "; break;
          case Pred::CmpOp::Ne: out_ << " /= "; break;
          case Pred::CmpOp::Lt: out_ << " < "; break;
          case Pred::CmpOp::Le: out_ << " <= "; break;
          case Pred::CmpOp::Gt: out_ << " > "; break;
          case Pred::CmpOp::Ge: out_ << " >= "; break;
        }
        print_expr(*p.rhs, 0);
        break;
      }
      case Pred::Kind::Member: {
        print_expr(*p.lhs, 0);
        out_ << (p.negated ? " /: " : " : ");
        switch (p.mrhs) {
          case Pred::MemberRhs::Elems:
            out_ << "{";
            for (size_t i = 0; i < p.elems.size(); ++i) {
              if (i) out_ << ", ";
              print_expr(*p.elems[i], 0);
            }
            out_ << "}";
            break;
          case Pred::MemberRhs::Range:
            print_expr(*p.lo_e, 0);
            out_ << "..";
            print_expr(*p.hi_e, 0);
            break;
          case Pred::MemberRhs::SetName: out_ << p.set_name; break;
        }
        break;
      }
    }
  }

  // prec: 0 = additive context, 1 = multiplicative context
  void print_expr(const Expr& e, int prec) {
    switch (e.kind) {
      case Expr::Kind::IntLit: out_ << e.value; break;
      case Expr::Kind::BoolLit: out_ << (e.value ? "TRUE" : "FALSE"); break;
      case Expr::Kind::EnumLit:
      case Expr::Kind::Name: out_ << e.name; break;
      case Expr::Kind::Add:
      case Expr::Kind::Sub: {
        bool paren = prec > 0;
        if (paren) out_ << "(";
        print_expr(*e.lhs, 0);
        out_ << (e.kind == Expr::Kind::Add ? " + " : " - ");
        print_expr(*e.rhs, 1);  // subtraction is left-associative
        if (paren) out_ << ")";
        break;
      }
      case Expr::Kind::Mul: {
        print_expr(*e.lhs, 1);
        out_ << " * ";
        // force parens on a multiplicative right operand to keep shape
        const Expr& r = *e.rhs;
        bool paren = r.kind == Expr::Kind::Add || r.kind == Expr::Kind::Sub ||
                     r.kind == Expr::Kind::Mul;
        if (paren) out_ << "(";
        print_expr(r, paren ? 0 : 1);
        if (paren) out_ << ")";
        break;
      }
      case Expr::Kind::Min:
      case Expr::Kind::Max:
        out_ << (e.kind == Expr::Kind::Min ? "min(" : "max(");
        print_expr(*e.lhs, 0);
        out_ << ", ";
        print_expr(*e.rhs, 0);
        out_ << ")";
        break;
    }
  }

  std::ostringstream out_;
};

}  // namespace detail

inline std::string print_machine(const Machine& m) {
  detail::Printer p;
  return p.print(m);
}

inline std::string print_expr(const Expr& e) {
  detail::Printer p;
  return p.print_expr_str(e);
}

inline std::string print_pred(const Pred& p) {
  detail::Printer pr;
  return pr.print_pred_str(p);
}

}  // namespace reach
