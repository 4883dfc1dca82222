#include <map>

#include "tagdl/frontend/compiler.hpp"

namespace tagdl {

namespace {

using core::Conjunction;

class Desugarer {
 public:
  core::Program run(const ast::Program& program) {
    // Aliases and constants apply regardless of where they appear.
    for (const auto& item : program.items) {
      if (const auto* c = std::get_if<ast::ConstDef>(&item.def)) visit(*c, item.loc);
      const auto* t = std::get_if<ast::TypeDef>(&item.def);
      if (t && std::holds_alternative<ast::TypeAlias>(t->body)) visit(*t, item.loc);
    }
    for (const auto& item : program.items) {
      out_.attributes.insert(out_.attributes.end(), item.attributes.begin(), item.attributes.end());
      if (std::holds_alternative<ast::ConstDef>(item.def)) continue;
      const auto* t = std::get_if<ast::TypeDef>(&item.def);
      if (t && std::holds_alternative<ast::TypeAlias>(t->body)) continue;
      std::visit([&](const auto& def) { visit(def, item.loc); }, item.def);
    }
    return std::move(out_);
  }

 private:
  void visit(const ast::ImportDef&, const SourceLocation& loc) {
    throw CompileError(loc, "unresolved import; compile the file from disk to follow imports");
  }

  void visit(const ast::TypeDef& def, const SourceLocation& loc) {
    if (const auto* alias = std::get_if<ast::TypeAlias>(&def.body)) {
      if (parse_type_name(alias->name)) throw CompileError(loc, "cannot redefine primitive type " + alias->name);
      aliases_[alias->name] = resolve_type(alias->target, loc);
      return;
    }
    for (const auto& d : std::get<std::vector<ast::RelationTypeDecl>>(def.body)) {
      core::RelationDecl decl{d.name, {}, d.loc};
      for (const auto& col : d.columns) decl.columns.push_back(resolve_type(col.second, d.loc));
      for (const auto& prev : out_.decls) {
        if (prev.name == decl.name && prev.columns != decl.columns) {
          throw CompileError(d.loc, "conflicting type declarations for relation `" + d.name + "`");
        }
      }
      out_.decls.push_back(std::move(decl));
    }
  }

  void visit(const ast::ConstDef& def, const SourceLocation&) {
    for (const auto& d : def.decls) {
      if (d.value->kind != ast::Expr::Kind::Const) {
        throw CompileError(d.loc, "constant `" + d.name + "` must be a literal");
      }
      ast::Literal lit = d.value->literal;
      if (d.type) lit.fixed_type = resolve_type(*d.type, d.loc);
      if (!consts_.emplace(d.name, lit).second) throw CompileError(d.loc, "constant `" + d.name + "` redefined");
    }
  }

  void visit(const ast::FactSet& def, const SourceLocation&) {
    for (const auto& group : def.groups) {
      std::optional<std::uint64_t> exclusion;
      if (group.size() > 1) exclusion = next_exclusion_++;
      for (const auto& t : group) {
        core::Fact f{def.relation, subst(t.values), t.prob, t.prob ? exclusion : std::nullopt, t.loc};
        check_prob(f.prob, t.loc);
        out_.facts.push_back(std::move(f));
      }
    }
  }

  void visit(const ast::FactList& def, const SourceLocation& loc) {
    check_prob(def.prob, loc);
    for (const auto& a : def.atoms) out_.facts.push_back({a.predicate, subst(a.args), def.prob, std::nullopt, a.loc});
  }

  void visit(const ast::RuleDef& def, const SourceLocation& loc) {
    ast::Atom head = subst(def.head);
    std::optional<core::Literal> rule_tag;
    if (def.prob) {
      check_prob(def.prob, loc);
      const std::string name = "#rule_tag_" + std::to_string(next_rule_tag_++);
      out_.decls.push_back({name, {}, loc});
      out_.hidden.insert(name);
      out_.facts.push_back({name, {}, def.prob, std::nullopt, loc});
      rule_tag = core::Literal{core::Literal::Kind::Positive, ast::Atom{name, {}, loc}, nullptr, nullptr, loc};
    }
    for (auto& conj : dnf(*def.body, false)) {
      if (rule_tag) conj.push_back(*rule_tag);
      // Disjuncts share literal objects; each rule gets its own expression
      // nodes so that types are inferred per rule.
      out_.rules.push_back({subst(head), clone(conj), loc});
    }
  }

  void visit(const ast::QueryDef& def, const SourceLocation&) {
    out_.queries.insert(out_.queries.end(), def.relations.begin(), def.relations.end());
  }

  static void check_prob(const std::optional<double>& p, const SourceLocation& loc) {
    if (p && !(*p >= 0.0 && *p <= 1.0)) throw CompileError(loc, "probability must lie in [0, 1]");
  }

  ValueType resolve_type(const std::string& name, const SourceLocation& loc) const {
    if (auto t = parse_type_name(name)) return *t;
    auto it = aliases_.find(name);
    if (it == aliases_.end()) throw CompileError(loc, "unknown type `" + name + "`");
    return it->second;
  }

  ast::ExprPtr subst(const ast::ExprPtr& e) const {
    auto copy = std::make_shared<ast::Expr>(*e);
    if (e->kind == ast::Expr::Kind::Var) {
      if (auto it = consts_.find(e->name); it != consts_.end()) {
        copy->kind = ast::Expr::Kind::Const;
        copy->literal = it->second;
        copy->name.clear();
      }
      return copy;
    }
    for (auto& a : copy->args) a = subst(a);
    return copy;
  }

  std::vector<ast::ExprPtr> subst(const std::vector<ast::ExprPtr>& es) const {
    std::vector<ast::ExprPtr> out;
    for (const auto& e : es) out.push_back(subst(e));
    return out;
  }

  ast::Atom subst(const ast::Atom& a) const { return {a.predicate, subst(a.args), a.loc}; }

  Conjunction clone(const Conjunction& conj) const {
    Conjunction out;
    for (const auto& lit : conj) {
      core::Literal copy = lit;
      copy.atom = subst(lit.atom);
      if (lit.constraint) copy.constraint = subst(lit.constraint);
      if (lit.reduce) {
        auto red = std::make_shared<core::Reduce>(*lit.reduce);
        for (auto& c : red->body) c = clone(c);
        for (auto& c : red->group_body) c = clone(c);
        copy.reduce = red;
      }
      out.push_back(std::move(copy));
    }
    return out;
  }

  static std::vector<Conjunction> cross(const std::vector<Conjunction>& a, const std::vector<Conjunction>& b) {
    std::vector<Conjunction> out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        Conjunction c = x;
        c.insert(c.end(), y.begin(), y.end());
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  static std::vector<Conjunction> concat(std::vector<Conjunction> a, const std::vector<Conjunction>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  /// Disjunctive normal form of `f`, or of `not f` when `negated`.
  std::vector<Conjunction> dnf(const ast::Formula& f, bool negated) {
    using K = ast::Formula::Kind;
    switch (f.kind) {
      case K::Atom: {
        core::Literal lit{negated ? core::Literal::Kind::Negative : core::Literal::Kind::Positive, subst(f.atom),
                          nullptr, nullptr, f.loc};
        return {{lit}};
      }
      case K::Not: return dnf(*f.children[0], !negated);
      case K::And: {
        auto a = dnf(*f.children[0], negated);
        auto b = dnf(*f.children[1], negated);
        return negated ? concat(a, b) : cross(a, b);
      }
      case K::Or: {
        auto a = dnf(*f.children[0], negated);
        auto b = dnf(*f.children[1], negated);
        return negated ? cross(a, b) : concat(a, b);
      }
      case K::Implies: {
        auto a = dnf(*f.children[0], !negated);
        auto b = dnf(*f.children[1], negated);
        return negated ? cross(a, b) : concat(a, b);
      }
      case K::Constraint: {
        auto e = subst(f.constraint);
        if (negated) {
          auto n = std::make_shared<ast::Expr>();
          n->kind = ast::Expr::Kind::Unary;
          n->unary = UnaryOp::Not;
          n->loc = e->loc;
          n->args = {e};
          e = n;
        }
        return {{core::Literal{core::Literal::Kind::Constraint, {}, e, nullptr, f.loc}}};
      }
      case K::Reduce: {
        if (negated) throw CompileError(f.loc, "an aggregation cannot be negated");
        const ast::Reduce& r = *f.reduce;
        auto red = std::make_shared<core::Reduce>();
        red->op = r.op;
        red->aggregator = r.aggregator;
        red->sampler = r.sampler;
        red->arg_vars = r.arg_vars;
        red->results = r.results;
        red->bindings = r.bindings;
        red->loc = r.loc;
        const bool forall = r.op == ast::Reduce::Op::Aggregate && r.aggregator == ram::AggregatorKind::Forall;
        red->body = dnf(*r.body, forall);
        if (r.group_vars) {
          red->group_vars = r.group_vars;
          red->group_body = dnf(*r.group_body, false);
        }
        return {{core::Literal{core::Literal::Kind::Reduce, {}, nullptr, red, f.loc}}};
      }
    }
    return {};
  }

  core::Program out_;
  std::map<std::string, ValueType> aliases_;
  std::map<std::string, ast::Literal> consts_;
  std::uint64_t next_exclusion_ = 0;
  std::size_t next_rule_tag_ = 0;
};

}  // namespace

core::Program desugar(const ast::Program& program) { return Desugarer().run(program); }

}  // namespace tagdl
