#include <map>
#include <numeric>

#include "tagdl/frontend/compiler.hpp"

namespace tagdl {

namespace {

using ast::Expr;

constexpr TypeSet kOrderedTypes = kAllTypes & ~type_bit(ValueType::Bool);

class Inference {
 public:
  explicit Inference(const core::Program& p) : prog_(p) {}

  core::TypeInfo run() {
    declare_relations();
    for (const auto& f : prog_.facts) {
      Scope scope;
      auto& cols = columns_for(f.relation, f.args.size(), f.loc);
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (contains_var(*f.args[i])) throw CompileError(f.args[i]->loc, "facts cannot contain variables");
        unify(expr(*f.args[i], scope), cols[i], f.args[i]->loc);
      }
    }
    std::vector<Scope> scopes;
    for (const auto& r : prog_.rules) {
      Scope scope;
      auto& cols = columns_for(r.head.predicate, r.head.args.size(), r.head.loc);
      for (std::size_t i = 0; i < r.head.args.size(); ++i) {
        unify(expr(*r.head.args[i], scope), cols[i], r.head.args[i]->loc);
      }
      conjunction(r.body, scope);
      scopes.push_back(std::move(scope));
    }

    core::TypeInfo info;
    for (const auto& [name, cols] : relations_) {
      RelationSignature sig;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        sig.columns.push_back(resolve(cols[i], "column " + std::to_string(i) + " of relation `" + name + "`",
                                      relation_locs_.at(name)));
      }
      info.relations.emplace(name, std::move(sig));
    }
    for (const auto& [e, n] : expr_nodes_) info.exprs.emplace(e, resolve(n, "`" + ast::to_source(*e) + "`", e->loc));
    for (std::size_t i = 0; i < scopes.size(); ++i) {
      std::map<std::string, ValueType> vars;
      for (const auto& [name, n] : scopes[i]) {
        vars.emplace(name, resolve(n, "variable `" + name + "`", prog_.rules[i].loc));
      }
      info.rule_vars.push_back(std::move(vars));
    }
    return info;
  }

 private:
  using Node = std::size_t;
  using Scope = std::map<std::string, Node>;

  struct Class {
    TypeSet set = kAllTypes;
    std::vector<ValueType> defaults;
  };

  Node fresh(TypeSet set = kAllTypes, std::optional<ValueType> def = std::nullopt) {
    parent_.push_back(parent_.size());
    classes_.push_back({set, {}});
    if (def) classes_.back().defaults.push_back(*def);
    return parent_.size() - 1;
  }

  Node find(Node n) {
    while (parent_[n] != n) n = parent_[n] = parent_[parent_[n]];
    return n;
  }

  void restrict(Node n, TypeSet set, const SourceLocation& loc, const std::string& what) {
    Class& c = classes_[find(n)];
    if ((c.set & set) == 0) {
      throw CompileError(loc, "type mismatch: " + what + " must be " + to_string(set) + " but is " + to_string(c.set));
    }
    c.set &= set;
  }

  void unify(Node a, Node b, const SourceLocation& loc) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    Class& ca = classes_[a];
    Class& cb = classes_[b];
    if ((ca.set & cb.set) == 0) {
      throw CompileError(loc, "type mismatch: " + to_string(ca.set) + " vs " + to_string(cb.set));
    }
    ca.set &= cb.set;
    ca.defaults.insert(ca.defaults.end(), cb.defaults.begin(), cb.defaults.end());
    parent_[b] = a;
  }

  ValueType resolve(Node n, const std::string& what, const SourceLocation& loc) {
    const Class& c = classes_[find(n)];
    if (std::popcount(c.set) == 1) return static_cast<ValueType>(std::countr_zero(c.set));
    if (!c.defaults.empty()) {
      for (ValueType d : c.defaults) {
        if (c.set & type_bit(d)) return d;
      }
      for (ValueType d : {ValueType::USize, ValueType::I32, ValueType::F64, ValueType::I64, ValueType::F32}) {
        if (c.set & type_bit(d)) return d;
      }
    }
    throw CompileError(loc, "cannot infer the type of " + what + " (candidates: " + to_string(c.set) + ")");
  }

  void declare_relations() {
    for (const auto& d : prog_.decls) {
      auto& cols = columns_for(d.name, d.columns.size(), d.loc);
      for (std::size_t i = 0; i < cols.size(); ++i) {
        restrict(cols[i], type_bit(d.columns[i]), d.loc, "column " + std::to_string(i) + " of `" + d.name + "`");
      }
    }
    for (const auto& f : prog_.facts) columns_for(f.relation, f.args.size(), f.loc);
    for (const auto& r : prog_.rules) columns_for(r.head.predicate, r.head.args.size(), r.head.loc);
    known_ = true;
  }

  std::vector<Node>& columns_for(const std::string& name, std::size_t arity, const SourceLocation& loc) {
    auto it = relations_.find(name);
    if (it == relations_.end()) {
      if (known_) throw CompileError(loc, "unknown relation `" + name + "`");
      std::vector<Node> cols;
      for (std::size_t i = 0; i < arity; ++i) cols.push_back(fresh());
      relation_locs_.emplace(name, loc);
      return relations_.emplace(name, std::move(cols)).first->second;
    }
    if (it->second.size() != arity) {
      throw CompileError(loc, "relation `" + name + "` has arity " + std::to_string(it->second.size()) +
                                  " but is used with " + std::to_string(arity) + " arguments");
    }
    return it->second;
  }

  static bool contains_var(const Expr& e) {
    if (e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Wildcard) return true;
    return std::ranges::any_of(e.args, [](const auto& a) { return contains_var(*a); });
  }

  Node var(const std::string& name, Scope& scope) {
    if (name == "_") return fresh();
    auto it = scope.find(name);
    if (it != scope.end()) return it->second;
    return scope.emplace(name, fresh()).first->second;
  }

  Node literal(const ast::Literal& l) {
    using K = ast::Literal::Kind;
    if (l.fixed_type) return fresh(type_bit(*l.fixed_type));
    switch (l.kind) {
      case K::Int:
        return l.int_value < 0 ? fresh(kSignedTypes | kFloatTypes, ValueType::I32)
                               : fresh(kNumericTypes, ValueType::USize);
      case K::Float: return fresh(kFloatTypes, ValueType::F64);
      case K::String: return fresh(type_bit(ValueType::String));
      case K::Char: return fresh(type_bit(ValueType::Char));
      case K::Bool: return fresh(type_bit(ValueType::Bool));
    }
    return fresh();
  }

  Node expr(const Expr& e, Scope& scope) {
    Node n = expr_inner(e, scope);
    expr_nodes_.emplace_back(&e, n);
    return n;
  }

  Node expr_inner(const Expr& e, Scope& scope) {
    const auto& loc = e.loc;
    switch (e.kind) {
      case Expr::Kind::Var: return var(e.name, scope);
      case Expr::Kind::Wildcard: return fresh();
      case Expr::Kind::Const: return literal(e.literal);
      case Expr::Kind::Binary: {
        Node a = expr(*e.args[0], scope);
        Node b = expr(*e.args[1], scope);
        const std::string what = "operands of `" + std::string(symbol(e.binary)) + "`";
        unify(a, b, loc);
        if (is_arithmetic(e.binary)) {
          restrict(a, kNumericTypes, loc, what);
          return a;
        }
        if (is_logical(e.binary)) {
          restrict(a, type_bit(ValueType::Bool), loc, what);
          return a;
        }
        if (e.binary != BinaryOp::Eq && e.binary != BinaryOp::Ne) restrict(a, kOrderedTypes, loc, what);
        return fresh(type_bit(ValueType::Bool));
      }
      case Expr::Kind::Unary: {
        Node a = expr(*e.args[0], scope);
        if (e.unary == UnaryOp::Not) {
          restrict(a, type_bit(ValueType::Bool), loc, "operand of `!`");
        } else {
          restrict(a, kSignedTypes | kFloatTypes, loc, "operand of unary `-`");
        }
        return a;
      }
      case Expr::Kind::Cast: {
        expr(*e.args[0], scope);
        return fresh(type_bit(e.cast_to));
      }
      case Expr::Kind::Call: {
        const auto* ff = find_foreign_function(e.name);
        if (!ff) throw CompileError(loc, "unknown foreign function `$" + e.name + "`");
        const auto& typing = ff->typing;
        const std::size_t n = e.args.size();
        if (n < typing.params.size() || (n > typing.params.size() && !typing.variadic)) {
          throw CompileError(loc, "`$" + e.name + "` called with " + std::to_string(n) + " arguments; expected " +
                                      ff->signature);
        }
        std::vector<Node> args;
        for (std::size_t i = 0; i < n; ++i) {
          Node a = expr(*e.args[i], scope);
          const TypeSet allowed = i < typing.params.size() ? typing.params[i] : *typing.variadic;
          restrict(a, allowed, e.args[i]->loc, "argument " + std::to_string(i + 1) + " of `$" + e.name + "`");
          args.push_back(a);
        }
        if (typing.result) return fresh(type_bit(*typing.result));
        if (args.empty()) throw CompileError(loc, "`$" + e.name + "` needs an argument");
        return args.front();
      }
      case Expr::Kind::If: {
        Node c = expr(*e.args[0], scope);
        restrict(c, type_bit(ValueType::Bool), loc, "condition of `if`");
        Node a = expr(*e.args[1], scope);
        Node b = expr(*e.args[2], scope);
        unify(a, b, loc);
        return a;
      }
    }
    return fresh();
  }

  void atom(const ast::Atom& a, Scope& scope) {
    auto& cols = columns_for(a.predicate, a.args.size(), a.loc);
    for (std::size_t i = 0; i < a.args.size(); ++i) unify(expr(*a.args[i], scope), cols[i], a.args[i]->loc);
  }

  void conjunction(const core::Conjunction& conj, Scope& scope) {
    for (const auto& lit : conj) {
      switch (lit.kind) {
        case core::Literal::Kind::Positive:
        case core::Literal::Kind::Negative: atom(lit.atom, scope); break;
        case core::Literal::Kind::Constraint:
          restrict(expr(*lit.constraint, scope), type_bit(ValueType::Bool), lit.loc, "a constraint");
          break;
        case core::Literal::Kind::Reduce: reduce(*lit.reduce, scope); break;
      }
    }
  }

  void reduce(const core::Reduce& r, Scope& scope) {
    for (const auto& c : r.body) conjunction(c, scope);
    for (const auto& c : r.group_body) conjunction(c, scope);
    using K = ram::AggregatorKind;
    auto need = [&](bool ok, const std::string& msg) {
      if (!ok) throw CompileError(r.loc, msg);
    };
    if (r.op == ast::Reduce::Op::Sample) {
      need(r.results.size() == r.bindings.size(), "a sampler assigns one result variable per binding variable");
      for (std::size_t i = 0; i < r.results.size(); ++i) {
        unify(var(r.results[i], scope), var(r.bindings[i], scope), r.loc);
      }
      return;
    }
    const std::string name(ram::name(r.aggregator));
    switch (r.aggregator) {
      case K::Count:
        need(r.results.size() == 1, "`count` assigns one result variable");
        restrict(var(r.results[0], scope), kIntegerTypes, r.loc, "the result of `count`");
        classes_[find(var(r.results[0], scope))].defaults.push_back(ValueType::USize);
        break;
      case K::Exists:
      case K::Forall:
        need(r.results.size() == 1, "`" + name + "` assigns one result variable");
        restrict(var(r.results[0], scope), type_bit(ValueType::Bool), r.loc, "the result of `" + name + "`");
        break;
      case K::Sum:
      case K::Prod:
      case K::Min:
      case K::Max: {
        need(r.results.size() == 1, "`" + name + "` assigns one result variable");
        need(!r.bindings.empty(), "`" + name + "` needs a binding variable");
        Node value = var(r.bindings.back(), scope);
        if (r.aggregator == K::Sum || r.aggregator == K::Prod) {
          restrict(value, kNumericTypes, r.loc, "the argument of `" + name + "`");
        }
        unify(var(r.results[0], scope), value, r.loc);
        break;
      }
      case K::Argmin:
      case K::Argmax: {
        need(!r.bindings.empty(), "`" + name + "` needs a binding variable");
        const std::size_t p = r.arg_vars.size();
        need(r.results.size() == p || r.results.size() == p + 1,
             "`" + name + "` assigns its argument variables, optionally followed by the extremal value");
        for (std::size_t i = 0; i < p; ++i) unify(var(r.results[i], scope), var(r.arg_vars[i], scope), r.loc);
        if (r.results.size() == p + 1) unify(var(r.results[p], scope), var(r.bindings.back(), scope), r.loc);
        break;
      }
    }
  }

  const core::Program& prog_;
  std::vector<Node> parent_;
  std::vector<Class> classes_;
  std::map<std::string, std::vector<Node>> relations_;
  std::map<std::string, SourceLocation> relation_locs_;
  std::vector<std::pair<const Expr*, Node>> expr_nodes_;
  bool known_ = false;
};

}  // namespace

core::TypeInfo infer_types(const core::Program& program) { return Inference(program).run(); }

}  // namespace tagdl
