#include "tagdl/frontend/parser.hpp"

#include <set>

#include "tagdl/frontend/lexer.hpp"

namespace tagdl {

namespace {

using namespace ast;

const std::set<std::string, std::less<>> kAggregators = {"count", "sum",    "prod",   "min",  "max",         "exists",
                                                         "forall", "argmin", "argmax", "top", "categorical", "uniform"};

std::optional<ram::AggregatorKind> aggregator_kind(std::string_view name) {
  using K = ram::AggregatorKind;
  if (name == "count") return K::Count;
  if (name == "sum") return K::Sum;
  if (name == "prod") return K::Prod;
  if (name == "min") return K::Min;
  if (name == "max") return K::Max;
  if (name == "exists") return K::Exists;
  if (name == "forall") return K::Forall;
  if (name == "argmin") return K::Argmin;
  if (name == "argmax") return K::Argmax;
  return std::nullopt;
}

std::optional<ram::SamplerKind> sampler_kind(std::string_view name) {
  if (name == "top") return ram::SamplerKind::Top;
  if (name == "categorical") return ram::SamplerKind::Categorical;
  if (name == "uniform") return ram::SamplerKind::Uniform;
  return std::nullopt;
}

std::string to_utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    while (!peek().kind_is_end()) p.items.push_back(item());
    return p;
  }

 private:
  struct Peek {
    const Token& tok;
    bool kind_is_end() const { return tok.kind == Token::Kind::End; }
  };

  Peek peek() const { return {toks_[pos_]}; }
  const Token& cur() const { return toks_[pos_]; }
  const Token& at(std::size_t offset) const { return toks_[std::min(pos_ + offset, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(std::initializer_list<std::string_view> expected) const {
    std::string msg = "expected ";
    if (expected.size() > 1) msg += "one of ";
    bool first = true;
    for (auto e : expected) {
      if (!first) msg += ", ";
      msg += e;
      first = false;
    }
    throw CompileError(cur().loc, msg + "; found " + describe(cur()));
  }

  bool accept(std::string_view punct) {
    if (cur().is(punct)) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_ident(std::string_view name) {
    if (cur().is_ident(name)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(std::string_view punct) {
    if (!accept(punct)) fail({"`" + std::string(punct) + "`"});
  }

  std::string ident(std::string_view what = "identifier") {
    if (cur().kind != Token::Kind::Ident) fail({what});
    return next().text;
  }

  Item item() {
    Item it;
    while (cur().is("@")) it.attributes.push_back(attribute());
    it.loc = cur().loc;
    if (accept_ident("import")) {
      if (cur().kind != Token::Kind::String) fail({"file path string"});
      it.def = ImportDef{to_utf8(next().decoded)};
    } else if (accept_ident("type")) {
      it.def = type_def();
    } else if (accept_ident("const")) {
      it.def = const_def();
    } else if (accept_ident("rel")) {
      it.def = rel_def(it.loc);
    } else if (accept_ident("query")) {
      QueryDef q{{}, it.loc};
      do q.relations.push_back(ident("relation name"));
      while (accept(","));
      it.def = std::move(q);
    } else {
      fail({"`import`", "`type`", "`const`", "`rel`", "`query`", "`@`"});
    }
    return it;
  }

  Attribute attribute() {
    Attribute a;
    a.loc = cur().loc;
    expect("@");
    a.name = ident("attribute name");
    if (!accept("(")) return a;
    std::string arg;
    int depth = 0;
    while (true) {
      const Token& t = cur();
      if (t.kind == Token::Kind::End) fail({"`)`"});
      if (depth == 0 && (t.is(")") || t.is(","))) {
        if (!arg.empty()) a.args.push_back(arg);
        arg.clear();
        next();
        if (t.is(")")) break;
        continue;
      }
      if (t.is("(")) ++depth;
      if (t.is(")")) --depth;
      if (!arg.empty()) arg += ' ';
      arg += t.text;
      next();
    }
    return a;
  }

  std::string type_name() { return ident("type name"); }

  TypeDef type_def() {
    TypeDef def;
    if (cur().kind == Token::Kind::Ident && (at(1).is("=") || at(1).is("<:"))) {
      TypeAlias alias;
      alias.name = next().text;
      alias.subtype = next().is("<:");
      alias.target = type_name();
      def.body = std::move(alias);
      return def;
    }
    std::vector<RelationTypeDecl> decls;
    do {
      RelationTypeDecl d;
      d.loc = cur().loc;
      d.name = ident("relation name");
      expect("(");
      if (!cur().is(")")) {
        do {
          if (cur().kind == Token::Kind::Ident && at(1).is(":")) {
            std::string col = next().text;
            next();
            d.columns.emplace_back(col, type_name());
          } else {
            d.columns.emplace_back("", type_name());
          }
        } while (accept(","));
      }
      expect(")");
      decls.push_back(std::move(d));
    } while (accept(","));
    def.body = std::move(decls);
    return def;
  }

  ConstDef const_def() {
    ConstDef def;
    do {
      ConstDecl d;
      d.loc = cur().loc;
      d.name = ident("constant name");
      if (accept(":")) d.type = type_name();
      expect("=");
      d.value = expr();
      def.decls.push_back(std::move(d));
    } while (accept(","));
    return def;
  }

  std::optional<double> tag() {
    if ((cur().kind == Token::Kind::Int || cur().kind == Token::Kind::Float) && at(1).is("::")) {
      const Token& t = next();
      next();
      return t.kind == Token::Kind::Int ? static_cast<double>(t.int_value) : t.float_value;
    }
    return std::nullopt;
  }

  std::variant<ImportDef, TypeDef, ConstDef, FactSet, FactList, RuleDef, QueryDef> rel_def(const SourceLocation& loc) {
    auto prob = tag();
    if (!prob && cur().kind == Token::Kind::Ident && at(1).is("=") && at(2).is("{")) {
      FactSet set;
      set.loc = loc;
      set.relation = next().text;
      next();
      next();
      if (!cur().is("}")) {
        set.groups.emplace_back();
        while (true) {
          set.groups.back().push_back(tagged_tuple());
          if (accept(";")) continue;
          if (accept(",")) {
            set.groups.emplace_back();
            continue;
          }
          break;
        }
      }
      expect("}");
      return set;
    }
    Atom head = atom();
    if (cur().is("=") || cur().is(":-")) {
      RuleDef rule;
      rule.loc = loc;
      rule.prob = prob;
      rule.horn_arrow = next().is(":-");
      rule.head = std::move(head);
      rule.body = formula();
      return rule;
    }
    FactList facts;
    facts.prob = prob;
    facts.atoms.push_back(std::move(head));
    while (accept(",")) facts.atoms.push_back(atom());
    return facts;
  }

  TaggedTuple tagged_tuple() {
    TaggedTuple t;
    t.loc = cur().loc;
    t.prob = tag();
    if (accept("(")) {
      if (!cur().is(")")) {
        do t.values.push_back(expr());
        while (accept(","));
      }
      expect(")");
    } else {
      t.values.push_back(expr());
    }
    return t;
  }

  Atom atom() {
    Atom a;
    a.loc = cur().loc;
    a.predicate = ident("relation name");
    expect("(");
    if (!cur().is(")")) {
      do a.args.push_back(expr());
      while (accept(","));
    }
    expect(")");
    return a;
  }

  // Formulas ---------------------------------------------------------------

  FormulaPtr make(Formula::Kind kind, SourceLocation loc, std::vector<FormulaPtr> children = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->loc = std::move(loc);
    f->children = std::move(children);
    return f;
  }

  FormulaPtr formula() {
    auto lhs = disjunction();
    if (cur().is_ident("implies")) {
      auto loc = next().loc;
      auto rhs = formula();
      return make(Formula::Kind::Implies, loc, {lhs, rhs});
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    auto lhs = conjunction();
    while (cur().is_ident("or")) {
      auto loc = next().loc;
      auto rhs = conjunction();
      lhs = make(Formula::Kind::Or, loc, {lhs, rhs});
    }
    return lhs;
  }

  FormulaPtr conjunction() {
    auto lhs = negation();
    while (cur().is_ident("and") || cur().is(",")) {
      auto loc = next().loc;
      auto rhs = negation();
      lhs = make(Formula::Kind::And, loc, {lhs, rhs});
    }
    return lhs;
  }

  FormulaPtr negation() {
    if (cur().is_ident("not")) {
      auto loc = next().loc;
      return make(Formula::Kind::Not, loc, {negation()});
    }
    return formula_primary();
  }

  /// `(a, b) :=` or `n :=` ahead.
  bool reduce_ahead() const {
    std::size_t i = 0;
    if (at(0).is("(")) {
      i = 1;
      if (!at(1).is(")")) {
        while (true) {
          if (at(i).kind != Token::Kind::Ident && !at(i).is("_")) return false;
          ++i;
          if (at(i).is(",")) {
            ++i;
            continue;
          }
          break;
        }
      }
      if (!at(i).is(")")) return false;
      ++i;
    } else {
      while (true) {
        if (at(i).kind != Token::Kind::Ident && !at(i).is("_")) return false;
        ++i;
        if (!at(i).is(",")) break;
        ++i;
      }
    }
    if (at(i).is(":=")) return true;
    return at(i).is("=") && at(i + 1).kind == Token::Kind::Ident && kAggregators.count(at(i + 1).text) &&
           (at(i + 2).is("(") || at(i + 2).is("<"));
  }

  static bool continues_expression(const Token& t) {
    static const std::set<std::string, std::less<>> ops = {"+", "-",  "*",  "/", "%", "&&", "||", "==",
                                                           "!=", "<", "<=", ">", ">="};
    return (t.kind == Token::Kind::Punct && ops.count(t.text)) || t.is_ident("as");
  }

  FormulaPtr formula_primary() {
    const auto loc = cur().loc;
    if (reduce_ahead()) {
      auto f = make(Formula::Kind::Reduce, loc);
      f->reduce = reduce();
      return f;
    }
    if (cur().is("(")) {
      const std::size_t save = pos_;
      try {
        next();
        auto inner = formula();
        expect(")");
        if (!continues_expression(cur())) return inner;
      } catch (const CompileError&) {
      }
      pos_ = save;
    }
    if (cur().kind == Token::Kind::Ident && at(1).is("(") && !keyword(cur().text)) {
      auto f = make(Formula::Kind::Atom, loc);
      f->atom = atom();
      return f;
    }
    auto f = make(Formula::Kind::Constraint, loc);
    f->constraint = expr();
    return f;
  }

  static bool keyword(std::string_view s) {
    return s == "if" || s == "then" || s == "else" || s == "true" || s == "false" || s == "not" || s == "and" ||
           s == "or" || s == "implies" || s == "as" || s == "where";
  }

  std::string var_name() {
    if (accept("_")) return "_";
    return ident("variable");
  }

  std::vector<std::string> var_list() {
    std::vector<std::string> vars;
    do vars.push_back(var_name());
    while (accept(","));
    return vars;
  }

  /// `a, b :` ahead.
  bool bindings_ahead() const {
    std::size_t i = 0;
    if (at(0).is(":")) return true;
    while (true) {
      if (at(i).kind != Token::Kind::Ident && !at(i).is("_")) return false;
      ++i;
      if (at(i).is(":")) return true;
      if (!at(i).is(",")) return false;
      ++i;
    }
  }

  std::shared_ptr<Reduce> reduce() {
    auto r = std::make_shared<Reduce>();
    r->loc = cur().loc;
    if (accept("(")) {
      if (!cur().is(")")) r->results = var_list();
      expect(")");
    } else {
      r->results = var_list();
    }
    if (!accept(":=")) expect("=");
    const auto op_loc = cur().loc;
    const std::string op = ident("aggregator");
    if (auto g = aggregator_kind(op)) {
      r->op = Reduce::Op::Aggregate;
      r->aggregator = *g;
      if (*g == ram::AggregatorKind::Argmin || *g == ram::AggregatorKind::Argmax) {
        expect("<");
        r->arg_vars = var_list();
        expect(">");
      }
    } else if (auto s = sampler_kind(op)) {
      r->op = Reduce::Op::Sample;
      r->sampler.kind = *s;
      expect("<");
      if (cur().kind != Token::Kind::Int) fail({"sample count"});
      r->sampler.k = static_cast<std::size_t>(next().int_value);
      expect(">");
    } else {
      throw CompileError(op_loc, "unknown aggregator `" + op + "`");
    }
    expect("(");
    if (bindings_ahead()) {
      if (!cur().is(":")) r->bindings = var_list();
      expect(":");
    }
    r->body = formula();
    if (accept_ident("where")) {
      std::vector<std::string> groups;
      if (!cur().is(":")) groups = var_list();
      expect(":");
      r->group_vars = std::move(groups);
      r->group_body = formula();
    }
    expect(")");
    return r;
  }

  // Expressions ------------------------------------------------------------

  ExprPtr node(Expr::Kind kind, SourceLocation loc) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->loc = std::move(loc);
    return e;
  }

  ExprPtr binary(BinaryOp op, SourceLocation loc, ExprPtr a, ExprPtr b) {
    auto e = node(Expr::Kind::Binary, std::move(loc));
    e->binary = op;
    e->args = {std::move(a), std::move(b)};
    return e;
  }

  ExprPtr expr() {
    if (cur().is_ident("if")) {
      auto e = node(Expr::Kind::If, next().loc);
      auto c = expr();
      if (!accept_ident("then")) fail({"`then`"});
      auto a = expr();
      if (!accept_ident("else")) fail({"`else`"});
      auto b = expr();
      e->args = {c, a, b};
      return e;
    }
    return or_expr();
  }

  ExprPtr or_expr() {
    auto lhs = and_expr();
    while (cur().is("||")) {
      auto loc = next().loc;
      lhs = binary(BinaryOp::Or, loc, lhs, and_expr());
    }
    return lhs;
  }

  ExprPtr and_expr() {
    auto lhs = comparison();
    while (cur().is("&&")) {
      auto loc = next().loc;
      lhs = binary(BinaryOp::And, loc, lhs, comparison());
    }
    return lhs;
  }

  ExprPtr comparison() {
    auto lhs = additive();
    static const std::pair<std::string_view, BinaryOp> ops[] = {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne},
                                                                {"<=", BinaryOp::Le}, {">=", BinaryOp::Ge},
                                                                {"<", BinaryOp::Lt},  {">", BinaryOp::Gt}};
    for (auto [sym, op] : ops) {
      if (cur().is(sym)) {
        auto loc = next().loc;
        return binary(op, loc, lhs, additive());
      }
    }
    return lhs;
  }

  ExprPtr additive() {
    auto lhs = multiplicative();
    while (cur().is("+") || cur().is("-")) {
      auto op = cur().is("+") ? BinaryOp::Add : BinaryOp::Sub;
      auto loc = next().loc;
      lhs = binary(op, loc, lhs, multiplicative());
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    auto lhs = cast();
    while (cur().is("*") || cur().is("/") || cur().is("%")) {
      auto op = cur().is("*") ? BinaryOp::Mul : cur().is("/") ? BinaryOp::Div : BinaryOp::Mod;
      auto loc = next().loc;
      lhs = binary(op, loc, lhs, cast());
    }
    return lhs;
  }

  ExprPtr cast() {
    auto e = unary();
    while (cur().is_ident("as")) {
      auto c = node(Expr::Kind::Cast, next().loc);
      const auto type_loc = cur().loc;
      auto t = parse_type_name(ident("type name"));
      if (!t) throw CompileError(type_loc, "casts need a primitive type");
      c->cast_to = *t;
      c->args = {e};
      e = c;
    }
    return e;
  }

  ExprPtr unary() {
    if (cur().is("-") && (at(1).kind == Token::Kind::Int || at(1).kind == Token::Kind::Float)) {
      auto loc = next().loc;
      auto e = primary();
      e->loc = loc;
      if (e->literal.kind == Literal::Kind::Int) {
        e->literal.int_value = -e->literal.int_value;
      } else {
        e->literal.float_value = -e->literal.float_value;
      }
      return e;
    }
    if (cur().is("-") || cur().is("!")) {
      auto e = node(Expr::Kind::Unary, cur().loc);
      e->unary = next().is("-") ? UnaryOp::Neg : UnaryOp::Not;
      e->args = {unary()};
      return e;
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& t = cur();
    const auto loc = t.loc;
    if (t.is_ident("if")) return expr();
    switch (t.kind) {
      case Token::Kind::Int: {
        auto e = node(Expr::Kind::Const, loc);
        e->literal.kind = Literal::Kind::Int;
        e->literal.int_value = static_cast<__int128>(next().int_value);
        return e;
      }
      case Token::Kind::Float: {
        auto e = node(Expr::Kind::Const, loc);
        e->literal.kind = Literal::Kind::Float;
        e->literal.float_value = next().float_value;
        return e;
      }
      case Token::Kind::String: {
        auto e = node(Expr::Kind::Const, loc);
        e->literal.kind = Literal::Kind::String;
        e->literal.string_value = to_utf8(next().decoded);
        return e;
      }
      case Token::Kind::Char: {
        auto e = node(Expr::Kind::Const, loc);
        e->literal.kind = Literal::Kind::Char;
        e->literal.char_value = next().decoded.front();
        return e;
      }
      case Token::Kind::Ident: {
        if (t.text == "true" || t.text == "false") {
          auto e = node(Expr::Kind::Const, loc);
          e->literal.kind = Literal::Kind::Bool;
          e->literal.bool_value = next().text == "true";
          return e;
        }
        if (keyword(t.text)) break;
        auto e = node(Expr::Kind::Var, loc);
        e->name = next().text;
        return e;
      }
      case Token::Kind::Punct: {
        if (accept("_")) return node(Expr::Kind::Wildcard, loc);
        if (accept("(")) {
          auto e = expr();
          expect(")");
          return e;
        }
        if (accept("$")) {
          auto e = node(Expr::Kind::Call, loc);
          e->name = ident("function name");
          expect("(");
          if (!cur().is(")")) {
            do e->args.push_back(expr());
            while (accept(","));
          }
          expect(")");
          return e;
        }
        break;
      }
      case Token::Kind::End: break;
    }
    fail({"expression"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ast::Program parse(std::string_view source, const std::string& file) {
  return Parser(tokenize(source, file)).program();
}

}  // namespace tagdl
