#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "reach/ast.hpp"

// Recursive-descent parser for B-lite source text. The accepted grammar is
// documented in docs/grammar.md; briefly:
//
//   MACHINE name
//   [ SETS name = {lab, ...} ; ... ]
//   [ CONSTANTS name [= int], ... ]
//   VARIABLES v1, v2, ...
//   INVARIANT typing & ... & property & ...
//   INITIALISATION stmt
//   OPERATIONS op ; ...
//   END
//
// Typing conjuncts have the shape "v : BOOL | lo..hi | SetName" and give each
// variable its finite domain; all remaining conjuncts are kept as properties
// and never constrain reachability.

namespace reach {

namespace detail {

enum class Tok {
  End, Ident, Int,
  // punctuation
  LParen, RParen, LBrace, RBrace, Comma, Semicolon,
  Colon, NotIn, Assign, DotDot, Parallel, Amp,
  Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long value = 0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.pos = pos();
    if (at_end()) return t;
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                           src_[i_] == '_'))
        advance();
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, i_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[i_])))
        advance();
      t.kind = Tok::Int;
      t.text = std::string(src_.substr(start, i_ - start));
      try {
        t.value = std::stol(t.text);
      } catch (const std::exception&) {
        throw ParseError("integer literal out of range", t.pos);
      }
      return t;
    }
    advance();
    switch (c) {
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '{': t.kind = Tok::LBrace; return t;
      case '}': t.kind = Tok::RBrace; return t;
      case ',': t.kind = Tok::Comma; return t;
      case ';': t.kind = Tok::Semicolon; return t;
      case '&': t.kind = Tok::Amp; return t;
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '=': t.kind = Tok::Eq; return t;
      case '|':
        if (!at_end() && src_[i_] == '|') {
          advance();
          t.kind = Tok::Parallel;
          return t;
        }
        throw ParseError("unexpected '|'", t.pos);
      case ':':
        if (!at_end() && src_[i_] == '=') {
          advance();
          t.kind = Tok::Assign;
          return t;
        }
        t.kind = Tok::Colon;
        return t;
      case '/':
        if (!at_end() && src_[i_] == '=') {
          advance();
          t.kind = Tok::Ne;
          return t;
        }
        if (!at_end() && src_[i_] == ':') {
          advance();
          t.kind = Tok::NotIn;
          return t;
        }
        throw ParseError("unexpected '/'", t.pos);
      case '<':
        if (!at_end() && src_[i_] == '=') {
          advance();
          t.kind = Tok::Le;
          return t;
        }
        t.kind = Tok::Lt;
        return t;
      case '>':
        if (!at_end() && src_[i_] == '=') {
          advance();
          t.kind = Tok::Ge;
          return t;
        }
        t.kind = Tok::Gt;
        return t;
      case '.':
        if (!at_end() && src_[i_] == '.') {
          advance();
          t.kind = Tok::DotDot;
          return t;
        }
        throw ParseError("unexpected '.'", t.pos);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", t.pos);
    }
  }

 private:
  void skip_ws() {
    while (!at_end()) {
      char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
        while (!at_end() && src_[i_] != '\n') advance();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '*') {
        SourcePos start = pos();
        advance();
        advance();
        while (true) {
          if (at_end()) throw ParseError("unterminated comment", start);
          if (src_[i_] == '*' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        break;
      }
    }
  }

  bool at_end() const { return i_ >= src_.size(); }
  SourcePos pos() const { return {line_, col_}; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  std::string_view src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "MACHINE", "SETS", "CONSTANTS", "VARIABLES", "INVARIANT",
      "INITIALISATION", "OPERATIONS", "END", "SELECT", "THEN", "BEGIN",
      "IF", "ELSE", "ANY", "WHERE", "BOOL", "TRUE", "FALSE",
      "skip", "not", "or", "min", "max"};
  return kw;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { bump(); }

  Machine parse_machine() {
    Machine m;
    expect_kw("MACHINE");
    m.name = expect_ident("machine name");
    if (at_kw("SETS")) {
      bump();
      while (true) {
        m.sets.push_back(parse_set_decl());
        if (tok_.kind == Tok::Semicolon) {
          bump();
          if (at_kw("CONSTANTS") || at_kw("VARIABLES")) break;
          continue;
        }
        break;
      }
    }
    if (at_kw("CONSTANTS")) {
      bump();
      while (true) {
        ConstantDecl c;
        c.name = expect_ident("constant name");
        if (tok_.kind == Tok::Eq) {
          bump();
          c.value = parse_int_literal();
        }
        m.constants.push_back(std::move(c));
        if (tok_.kind == Tok::Comma) {
          bump();
          continue;
        }
        break;
      }
    }
    expect_kw("VARIABLES");
    std::vector<std::pair<std::string, SourcePos>> var_names;
    while (true) {
      SourcePos p = tok_.pos;
      var_names.emplace_back(expect_ident("variable name"), p);
      if (tok_.kind == Tok::Comma) {
        bump();
        continue;
      }
      break;
    }
    expect_kw("INVARIANT");
    PredPtr invariant = parse_pred();
    expect_kw("INITIALISATION");
    m.initialisation = parse_stmt();
    expect_kw("OPERATIONS");
    if (!at_kw("END")) {
      while (true) {
        m.operations.push_back(parse_operation());
        if (tok_.kind == Tok::Semicolon) {
          bump();
          continue;
        }
        break;
      }
    }
    expect_kw("END");
    if (tok_.kind != Tok::End)
      throw ParseError("trailing input after machine END", tok_.pos);

    attach_typings(m, var_names, invariant);
    validate_names(m);
    return m;
  }

 private:
  // --- invariant post-processing --------------------------------------

  // The first "v : BOOL | lo..hi | SetName" conjunct per variable becomes its
  // typing; everything else is an ordinary property conjunct.
  void attach_typings(Machine& m,
                      const std::vector<std::pair<std::string, SourcePos>>& vars,
                      const PredPtr& invariant) {
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < vars.size(); ++i) {
      if (index.count(vars[i].first))
        throw ParseError("duplicate variable name '" + vars[i].first + "'",
                         vars[i].second);
      index[vars[i].first] = i;
      m.variables.push_back({vars[i].first, {}, vars[i].second});
    }
    std::vector<bool> typed(vars.size(), false);
    std::vector<PredPtr> conjuncts;
    collect_conjuncts(invariant, conjuncts);
    for (const auto& c : conjuncts) {
      if (c->kind == Pred::Kind::Member && !c->negated &&
          c->lhs->kind == Expr::Kind::Name && index.count(c->lhs->name) &&
          c->mrhs != Pred::MemberRhs::Elems && !typed[index[c->lhs->name]]) {
        size_t j = index[c->lhs->name];
        DomainExpr d;
        if (c->mrhs == Pred::MemberRhs::Range) {
          d.kind = DomainExpr::Kind::Range;
          d.lo = c->lo_e;
          d.hi = c->hi_e;
        } else if (c->set_name == "BOOL") {
          d.kind = DomainExpr::Kind::Bool;
        } else {
          d.kind = DomainExpr::Kind::SetRef;
          d.set_name = c->set_name;
        }
        m.variables[j].domain = d;
        typed[j] = true;
      } else {
        m.properties.push_back(c);
      }
    }
    for (size_t j = 0; j < vars.size(); ++j) {
      if (!typed[j])
        throw ParseError("variable '" + vars[j].first +
                             "' has no typing conjunct in INVARIANT",
                         vars[j].second);
    }
  }

  void validate_names(const Machine& m) {
    std::set<std::string> seen;
    for (const auto& s : m.sets) {
      if (!seen.insert(s.name).second)
        throw ParseError("duplicate set name '" + s.name + "'", {});
      std::set<std::string> labs;
      for (const auto& l : s.labels) {
        if (!labs.insert(l).second)
          throw ParseError("duplicate label '" + l + "' in set " + s.name, {});
        if (!seen.insert(l).second)
          throw ParseError("label '" + l + "' clashes with another name", {});
      }
    }
    for (const auto& c : m.constants)
      if (!seen.insert(c.name).second)
        throw ParseError("duplicate constant name '" + c.name + "'", {});
    for (const auto& v : m.variables)
      if (!seen.insert(v.name).second)
        throw ParseError("variable '" + v.name + "' clashes with another name",
                         v.pos);
    std::set<std::string> ops;
    for (const auto& o : m.operations)
      if (!ops.insert(o.name).second)
        throw ParseError("duplicate operation name '" + o.name + "'", o.pos);
  }

  // --- clause parsers ---------------------------------------------------

  SetDecl parse_set_decl() {
    SetDecl s;
    s.name = expect_ident("set name");
    expect(Tok::Eq, "'='");
    expect(Tok::LBrace, "'{'");
    while (true) {
      s.labels.push_back(expect_ident("set label"));
      if (tok_.kind == Tok::Comma) {
        bump();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "'}'");
    return s;
  }

  OperationDecl parse_operation() {
    OperationDecl op;
    op.pos = tok_.pos;
    op.name = expect_ident("operation name");
    if (tok_.kind == Tok::LParen) {
      bump();
      while (true) {
        op.params.push_back(parse_param());
        if (tok_.kind == Tok::Comma) {
          bump();
          continue;
        }
        break;
      }
      expect(Tok::RParen, "')'");
    }
    expect(Tok::Eq, "'='");
    if (at_kw("SELECT")) {
      bump();
      op.guard = parse_pred();
      expect_kw("THEN");
      op.body = parse_stmt();
      expect_kw("END");
    } else if (at_kw("BEGIN")) {
      bump();
      op.body = parse_stmt();
      expect_kw("END");
    } else {
      throw ParseError("expected SELECT or BEGIN", tok_.pos);
    }
    return op;
  }

  ParamDecl parse_param() {
    ParamDecl p;
    p.pos = tok_.pos;
    p.name = expect_ident("parameter name");
    expect(Tok::Colon, "':'");
    p.domain = parse_domain_expr();
    return p;
  }

  DomainExpr parse_domain_expr() {
    DomainExpr d;
    if (at_kw("BOOL")) {
      bump();
      d.kind = DomainExpr::Kind::Bool;
      return d;
    }
    // A set name is an identifier not followed by '..' arithmetic; a range is
    // expr '..' expr. Disambiguate by parsing an expression and checking for
    // '..'; a bare Name without '..' is a set reference.
    ExprPtr first = parse_expr();
    if (tok_.kind == Tok::DotDot) {
      bump();
      d.kind = DomainExpr::Kind::Range;
      d.lo = first;
      d.hi = parse_expr();
      return d;
    }
    if (first->kind == Expr::Kind::Name) {
      d.kind = DomainExpr::Kind::SetRef;
      d.set_name = first->name;
      return d;
    }
    throw ParseError("expected BOOL, a set name or a range lo..hi", tok_.pos);
  }

  // --- statements --------------------------------------------------------

  StmtPtr parse_stmt() {
    SourcePos pos = tok_.pos;
    if (at_kw("skip")) {
      bump();
      return mk_skip(pos);
    }
    if (at_kw("IF")) {
      bump();
      PredPtr c = parse_pred();
      expect_kw("THEN");
      StmtPtr t = parse_stmt();
      StmtPtr e;
      if (at_kw("ELSE")) {
        bump();
        e = parse_stmt();
      }
      expect_kw("END");
      return mk_if(std::move(c), std::move(t), std::move(e), pos);
    }
    if (at_kw("ANY")) {
      bump();
      std::vector<ParamDecl> params;
      while (true) {
        params.push_back(parse_param());
        if (tok_.kind == Tok::Comma) {
          bump();
          continue;
        }
        break;
      }
      PredPtr where;
      if (at_kw("WHERE")) {
        bump();
        where = parse_pred();
      }
      expect_kw("THEN");
      StmtPtr body = parse_stmt();
      expect_kw("END");
      return mk_any(std::move(params), std::move(where), std::move(body), pos);
    }
    // parallel assignment list
    std::vector<Assignment> assigns;
    while (true) {
      Assignment a;
      a.pos = tok_.pos;
      a.target = expect_ident("assignment target");
      expect(Tok::Assign, "':='");
      a.value = parse_expr();
      assigns.push_back(std::move(a));
      if (tok_.kind == Tok::Parallel) {
        bump();
        continue;
      }
      break;
    }
    return mk_parallel(std::move(assigns), pos);
  }

  // --- predicates ----------------------------------------------------------

  PredPtr parse_pred() { return parse_or(); }

  PredPtr parse_or() {
    PredPtr p = parse_and();
    while (at_kw("or")) {
      SourcePos pos = tok_.pos;
      bump();
      p = mk_or(std::move(p), parse_and(), pos);
    }
    return p;
  }

  PredPtr parse_and() {
    PredPtr p = parse_atom_pred();
    while (tok_.kind == Tok::Amp) {
      SourcePos pos = tok_.pos;
      bump();
      p = mk_and(std::move(p), parse_atom_pred(), pos);
    }
    return p;
  }

  PredPtr parse_atom_pred() {
    SourcePos pos = tok_.pos;
    if (at_kw("not")) {
      bump();
      expect(Tok::LParen, "'(' after not");
      PredPtr inner = parse_pred();
      expect(Tok::RParen, "')'");
      return mk_not(std::move(inner), pos);
    }
    if (tok_.kind == Tok::LParen) {
      // '(' is ambiguous here: it may open a nested predicate or a
      // parenthesised expression on the left of a comparison. Try the
      // predicate reading first and fall back on failure.
      Lexer save_lex = lex_;
      Token save_tok = tok_;
      try {
        bump();
        PredPtr inner = parse_pred();
        expect(Tok::RParen, "')'");
        return inner;
      } catch (const ParseError&) {
        lex_ = save_lex;
        tok_ = save_tok;
      }
    }
    ExprPtr lhs = parse_expr();
    switch (tok_.kind) {
      case Tok::Eq: bump(); return mk_cmp(Pred::CmpOp::Eq, lhs, parse_expr(), pos);
      case Tok::Ne: bump(); return mk_cmp(Pred::CmpOp::Ne, lhs, parse_expr(), pos);
      case Tok::Lt: bump(); return mk_cmp(Pred::CmpOp::Lt, lhs, parse_expr(), pos);
      case Tok::Le: bump(); return mk_cmp(Pred::CmpOp::Le, lhs, parse_expr(), pos);
      case Tok::Gt: bump(); return mk_cmp(Pred::CmpOp::Gt, lhs, parse_expr(), pos);
      case Tok::Ge: bump(); return mk_cmp(Pred::CmpOp::Ge, lhs, parse_expr(), pos);
      case Tok::Colon:
      case Tok::NotIn: {
        bool neg = tok_.kind == Tok::NotIn;
        bump();
        return parse_member_rhs(std::move(lhs), neg, pos);
      }
      default:
        throw ParseError("expected a comparison or membership operator",
                         tok_.pos);
    }
  }

  PredPtr parse_member_rhs(ExprPtr lhs, bool neg, SourcePos pos) {
    auto p = std::make_shared<Pred>();
    p->kind = Pred::Kind::Member;
    p->lhs = std::move(lhs);
    p->negated = neg;
    p->pos = pos;
    if (tok_.kind == Tok::LBrace) {
      bump();
      p->mrhs = Pred::MemberRhs::Elems;
      while (true) {
        p->elems.push_back(parse_expr());
        if (tok_.kind == Tok::Comma) {
          bump();
          continue;
        }
        break;
      }
      expect(Tok::RBrace, "'}'");
      return p;
    }
    if (at_kw("BOOL")) {
      bump();
      p->mrhs = Pred::MemberRhs::SetName;
      p->set_name = "BOOL";
      return p;
    }
    ExprPtr first = parse_expr();
    if (tok_.kind == Tok::DotDot) {
      bump();
      p->mrhs = Pred::MemberRhs::Range;
      p->lo_e = first;
      p->hi_e = parse_expr();
      return p;
    }
    if (first->kind == Expr::Kind::Name) {
      p->mrhs = Pred::MemberRhs::SetName;
      p->set_name = first->name;
      return p;
    }
    throw ParseError("expected a set, a range or BOOL after ':'", tok_.pos);
  }

  // --- expressions -----------------------------------------------------

  ExprPtr parse_expr() { return parse_add(); }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      Expr::Kind k = tok_.kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      SourcePos pos = tok_.pos;
      bump();
      e = mk_binary(k, std::move(e), parse_mul(), pos);
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_primary();
    while (tok_.kind == Tok::Star) {
      SourcePos pos = tok_.pos;
      bump();
      e = mk_binary(Expr::Kind::Mul, std::move(e), parse_primary(), pos);
    }
    return e;
  }

  ExprPtr parse_primary() {
    SourcePos pos = tok_.pos;
    if (tok_.kind == Tok::Minus) {
      bump();
      if (tok_.kind != Tok::Int)
        throw ParseError("'-' is only supported before an integer literal; "
                         "write 0 - e for negation",
                         pos);
      long v = tok_.value;
      bump();
      return mk_int(-v, pos);
    }
    if (tok_.kind == Tok::Int) {
      long v = tok_.value;
      bump();
      return mk_int(v, pos);
    }
    if (tok_.kind == Tok::LParen) {
      bump();
      ExprPtr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at_kw("TRUE")) {
      bump();
      return mk_bool(true, pos);
    }
    if (at_kw("FALSE")) {
      bump();
      return mk_bool(false, pos);
    }
    if (at_kw("min") || at_kw("max")) {
      Expr::Kind k = tok_.text == "min" ? Expr::Kind::Min : Expr::Kind::Max;
      bump();
      expect(Tok::LParen, "'('");
      ExprPtr a = parse_expr();
      expect(Tok::Comma, "','");
      ExprPtr b = parse_expr();
      expect(Tok::RParen, "')'");
      return mk_binary(k, std::move(a), std::move(b), pos);
    }
    if (tok_.kind == Tok::Ident) {
      if (keywords().count(tok_.text))
        throw ParseError("unexpected keyword '" + tok_.text + "'", pos);
      std::string n = tok_.text;
      bump();
      if (tok_.kind == Tok::LParen)
        throw ParseError("function application is not supported", pos);
      return mk_name(std::move(n), pos);
    }
    throw ParseError("expected an expression", pos);
  }

  // --- token helpers -----------------------------------------------------

  void bump() { tok_ = lex_.next(); }

  bool at_kw(const char* kw) const {
    return tok_.kind == Tok::Ident && tok_.text == kw;
  }

  void expect_kw(const char* kw) {
    if (!at_kw(kw))
      throw ParseError(std::string("expected '") + kw + "'", tok_.pos);
    bump();
  }

  std::string expect_ident(const char* what) {
    if (tok_.kind != Tok::Ident)
      throw ParseError(std::string("expected ") + what, tok_.pos);
    if (keywords().count(tok_.text))
      throw ParseError("'" + tok_.text + "' is a keyword, expected " + what,
                       tok_.pos);
    std::string s = tok_.text;
    bump();
    return s;
  }

  long parse_int_literal() {
    bool neg = false;
    if (tok_.kind == Tok::Minus) {
      neg = true;
      bump();
    }
    if (tok_.kind != Tok::Int)
      throw ParseError("expected an integer literal", tok_.pos);
    long v = tok_.value;
    bump();
    return neg ? -v : v;
  }

  void expect(Tok k, const char* what) {
    if (tok_.kind != k)
      throw ParseError(std::string("expected ") + what, tok_.pos);
    bump();
  }

  Lexer lex_;
  Token tok_;
};

}  // namespace detail

// Parses a full machine from UTF-8 source text. Throws ParseError with a
// line:column position on malformed input, duplicate names or untyped
// variables.
inline Machine parse_machine(std::string_view source) {
  detail::Parser p(source);
  return p.parse_machine();
}

}  // namespace reach
