#include <algorithm>
#include <map>
#include <set>

#include "tagdl/frontend/compiler.hpp"

namespace tagdl {

namespace {

using ast::Expr;
using ram::ExprPtr;
using ram::ScalarPtr;
using VarSet = std::set<std::string>;

/// A lowered expression together with the variable bound by each column.
struct Bound {
  ExprPtr expr;
  std::vector<std::string> cols;

  bool has(const std::string& v) const { return std::ranges::find(cols, v) != cols.end(); }
};

void expr_vars(const Expr& e, VarSet& out) {
  if (e.kind == Expr::Kind::Var) out.insert(e.name);
  for (const auto& a : e.args) expr_vars(*a, out);
}

void literal_vars(const core::Literal& lit, VarSet& out) {
  switch (lit.kind) {
    case core::Literal::Kind::Positive:
    case core::Literal::Kind::Negative:
      for (const auto& a : lit.atom.args) expr_vars(*a, out);
      break;
    case core::Literal::Kind::Constraint: expr_vars(*lit.constraint, out); break;
    case core::Literal::Kind::Reduce: {
      const auto& r = *lit.reduce;
      out.insert(r.results.begin(), r.results.end());
      if (r.group_vars) out.insert(r.group_vars->begin(), r.group_vars->end());
      for (const auto& c : r.body) {
        for (const auto& l : c) literal_vars(l, out);
      }
      break;
    }
  }
  out.erase("_");
}

class Lowering {
 public:
  Lowering(const core::Program& p, const core::TypeInfo& t) : prog_(p), types_(t) {}

  CompiledProgram run(const std::vector<std::vector<std::string>>& strata) {
    CompiledProgram out;
    for (const auto& f : prog_.facts) lower_fact(f, out.facts);

    std::set<std::string> heads;
    for (const auto& names : strata) {
      ram::Stratum stratum;
      const VarSet in_stratum(names.begin(), names.end());
      for (const auto& head : names) {
        heads.insert(head);
        ExprPtr body;
        for (rule_ = 0; rule_ < prog_.rules.size(); ++rule_) {
          const auto& r = prog_.rules[rule_];
          if (r.head.predicate != head) continue;
          ExprPtr e = lower_rule(r);
          body = body ? b_.union_of(body, e) : e;
        }
        auto uses = ram::predicate_uses(*body);
        for (const auto& p : uses.monotone) stratum.recursive |= in_stratum.count(p) > 0;
        stratum.rules.push_back({head, body});
      }
      out.ram.strata.push_back(std::move(stratum));
    }

    for (const auto& [name, sig] : types_.relations) {
      out.ram.relations.push_back({name, sig, prog_.hidden.count(name) > 0});
    }
    if (uses_unit_) {
      out.ram.relations.push_back({std::string(kUnitRelation), {}, true});
      out.facts.push_back({std::string(kUnitRelation), {}, InputTag::untagged()});
    }
    if (!prog_.queries.empty()) {
      for (const auto& q : prog_.queries) {
        if (!types_.relations.count(q)) throw CompileError({}, "query of unknown relation `" + q + "`");
        if (std::ranges::find(out.ram.outputs, q) == out.ram.outputs.end()) out.ram.outputs.push_back(q);
      }
    } else {
      for (const auto& h : heads) {
        if (!prog_.hidden.count(h)) out.ram.outputs.push_back(h);
      }
    }
    auto errors = ram::validate(out.ram);
    if (!errors.empty()) throw CompileError({}, "internal error in lowering: " + errors.front());
    return out;
  }

 private:
  // Scalars ------------------------------------------------------------------

  Value literal_value(const Expr& e) const {
    const auto& l = e.literal;
    const ValueType t = types_.exprs.at(&e);
    switch (l.kind) {
      case ast::Literal::Kind::Int: {
        if (is_float(t)) return Value::floating(t, static_cast<double>(l.int_value));
        auto v = Value::integer(t, l.int_value);
        if (!v) throw CompileError(e.loc, "literal out of range for " + std::string(type_name(t)));
        return *v;
      }
      case ast::Literal::Kind::Float: return Value::floating(t, l.float_value);
      case ast::Literal::Kind::String: return Value::string(l.string_value);
      case ast::Literal::Kind::Char: return Value::character(l.char_value);
      case ast::Literal::Kind::Bool: return Value::boolean(l.bool_value);
    }
    return {};
  }

  ScalarPtr scalar(const Expr& e, const std::vector<std::string>& cols) const {
    using K = Expr::Kind;
    auto args = [&] {
      std::vector<ScalarPtr> out;
      for (const auto& a : e.args) out.push_back(scalar(*a, cols));
      return out;
    };
    switch (e.kind) {
      case K::Var: {
        auto it = std::ranges::find(cols, e.name);
        if (it == cols.end()) {
          throw CompileError(e.loc, "variable `" + e.name + "` is not bound by a positive atom");
        }
        return ram::Scalar::make_slot(static_cast<std::size_t>(it - cols.begin()));
      }
      case K::Wildcard: throw CompileError(e.loc, "`_` cannot be used as a value");
      case K::Const: return ram::Scalar::make_constant(literal_value(e));
      case K::Binary: {
        auto a = args();
        return ram::Scalar::make_binary(e.binary, a[0], a[1]);
      }
      case K::Unary: return ram::Scalar::make_unary(e.unary, args()[0]);
      case K::Cast: return ram::Scalar::make_cast(args()[0], e.cast_to);
      case K::Call: return ram::Scalar::make_call(e.name, args());
      case K::If: {
        auto a = args();
        return ram::Scalar::make_if(a[0], a[1], a[2]);
      }
    }
    return nullptr;
  }

  // Facts --------------------------------------------------------------------

  void lower_fact(const core::Fact& f, std::vector<EdbFact>& out) const {
    Tuple u;
    for (const auto& a : f.args) {
      auto v = ram::evaluate(*scalar(*a, {}), {});
      if (!v || v->is_nan()) return;
      u.push_back(std::move(*v));
    }
    out.push_back({f.relation, std::move(u), InputTag{f.prob, f.exclusion}});
  }

  // Bodies -------------------------------------------------------------------

  std::string fresh_var() { return "#v" + std::to_string(next_var_++); }

  Bound reorder(const Bound& r, const std::vector<std::string>& order) {
    if (order == r.cols) return r;
    std::vector<std::size_t> idx;
    for (const auto& v : order) idx.push_back(static_cast<std::size_t>(std::ranges::find(r.cols, v) - r.cols.begin()));
    return {b_.keep_columns(r.expr, idx), order};
  }

  /// Scan of one atom: constants and repeated variables become a selection,
  /// wildcards are projected away. Arguments that compute a value from
  /// variables bind a fresh column and add an equality to `deferred`.
  Bound scan(const ast::Atom& a, std::vector<ast::ExprPtr>* deferred) {
    ExprPtr e = b_.predicate(a.predicate, a.args.size());
    std::vector<std::string> cols;
    ScalarPtr cond;
    auto add_cond = [&](ScalarPtr c) { cond = cond ? ram::Scalar::make_binary(BinaryOp::And, cond, c) : c; };
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      const Expr& arg = *a.args[i];
      auto slot = ram::Scalar::make_slot(i);
      if (arg.kind == Expr::Kind::Var) {
        auto prev = std::ranges::find(cols, arg.name);
        if (prev != cols.end()) {
          add_cond(ram::Scalar::make_binary(BinaryOp::Eq, slot,
                                            ram::Scalar::make_slot(static_cast<std::size_t>(prev - cols.begin()))));
          cols.push_back(fresh_var() + "_");
        } else {
          cols.push_back(arg.name);
        }
        continue;
      }
      if (arg.kind == Expr::Kind::Wildcard) {
        cols.push_back(fresh_var() + "_");
        continue;
      }
      VarSet vars;
      expr_vars(arg, vars);
      if (vars.empty()) {
        add_cond(ram::Scalar::make_binary(BinaryOp::Eq, slot, ram::fold_constants(scalar(arg, {}))));
        cols.push_back(fresh_var() + "_");
        continue;
      }
      if (!deferred) throw CompileError(arg.loc, "negated atoms take variables, constants or `_` as arguments");
      const std::string v = fresh_var();
      cols.push_back(v);
      auto lhs = std::make_shared<Expr>();
      lhs->kind = Expr::Kind::Var;
      lhs->name = v;
      lhs->loc = arg.loc;
      auto eq = std::make_shared<Expr>();
      eq->kind = Expr::Kind::Binary;
      eq->binary = BinaryOp::Eq;
      eq->loc = arg.loc;
      eq->args = {lhs, a.args[i]};
      deferred->push_back(eq);
    }
    if (cond) e = b_.select(e, ram::fold_constants(cond));
    Bound r{e, cols};
    std::vector<std::string> keep;
    for (const auto& c : cols) {
      if (c.back() != '_' || c.front() != '#') keep.push_back(c);
    }
    return reorder(r, keep);
  }

  Bound join(std::optional<Bound> cur, Bound r) {
    if (!cur) return r;
    std::vector<std::string> shared, left_rest, right_rest;
    for (const auto& v : cur->cols) (r.has(v) ? shared : left_rest).push_back(v);
    for (const auto& v : r.cols) {
      if (!cur->has(v)) right_rest.push_back(v);
    }
    if (shared.empty()) {
      auto cols = cur->cols;
      cols.insert(cols.end(), r.cols.begin(), r.cols.end());
      return {b_.product(cur->expr, r.expr), cols};
    }
    auto lorder = shared;
    lorder.insert(lorder.end(), left_rest.begin(), left_rest.end());
    auto rorder = shared;
    rorder.insert(rorder.end(), right_rest.begin(), right_rest.end());
    auto left = reorder(*cur, lorder);
    auto right = reorder(r, rorder);
    auto cols = lorder;
    cols.insert(cols.end(), right_rest.begin(), right_rest.end());
    return {b_.natural_join(left.expr, right.expr, shared.size()), cols};
  }

  Bound negate(const Bound& cur, const ast::Atom& atom) {
    Bound right = scan(atom, nullptr);
    if (right.cols.size() == cur.cols.size()) {
      right = reorder(right, cur.cols);
      return {b_.difference(cur.expr, right.expr), cur.cols};
    }
    auto order = right.cols;
    for (const auto& v : cur.cols) {
      if (!right.has(v)) order.push_back(v);
    }
    auto left = reorder(cur, order);
    return {b_.antijoin(left.expr, right.expr, right.cols.size()), order};
  }

  Bound unit() {
    uses_unit_ = true;
    return {b_.predicate(std::string(kUnitRelation), 0), {}};
  }

  static bool bound_all(const VarSet& vars, const Bound& cur) {
    return std::ranges::all_of(vars, [&](const auto& v) { return cur.has(v); });
  }

  /// Lowers a conjunction; the result binds every variable the conjunction
  /// binds. `outer` holds variables used outside the conjunction, which
  /// decide the implicit group-by of aggregations.
  Bound conjunction(const core::Conjunction& conj, const VarSet& outer) {
    std::optional<Bound> cur;
    std::vector<ast::ExprPtr> constraints;
    std::vector<const ast::Atom*> negatives;
    std::vector<bool> done_c, done_n;

    auto settle = [&] {
      if (!cur) return;
      for (bool progress = true; progress;) {
        progress = false;
        done_c.resize(constraints.size(), false);
        done_n.resize(negatives.size(), false);
        for (std::size_t i = 0; i < constraints.size(); ++i) {
          if (done_c[i]) continue;
          const Expr& c = *constraints[i];
          VarSet vars;
          expr_vars(c, vars);
          if (bound_all(vars, *cur)) {
            cur->expr = b_.select(cur->expr, ram::fold_constants(scalar(c, cur->cols)));
            done_c[i] = progress = true;
            continue;
          }
          if (c.kind != Expr::Kind::Binary || c.binary != BinaryOp::Eq) continue;
          for (int side = 0; side < 2; ++side) {
            const Expr& v = *c.args[side];
            const Expr& other = *c.args[1 - side];
            if (v.kind != Expr::Kind::Var || cur->has(v.name)) continue;
            VarSet ov;
            expr_vars(other, ov);
            if (!bound_all(ov, *cur)) continue;
            std::vector<ScalarPtr> cols;
            for (std::size_t k = 0; k < cur->cols.size(); ++k) cols.push_back(ram::Scalar::make_slot(k));
            cols.push_back(ram::fold_constants(scalar(other, cur->cols)));
            cur->expr = b_.project(cur->expr, std::move(cols));
            cur->cols.push_back(v.name);
            done_c[i] = progress = true;
            break;
          }
        }
        for (std::size_t i = 0; i < negatives.size(); ++i) {
          if (done_n[i]) continue;
          VarSet vars;
          for (const auto& a : negatives[i]->args) expr_vars(*a, vars);
          if (!bound_all(vars, *cur)) continue;
          cur = negate(*cur, *negatives[i]);
          done_n[i] = progress = true;
        }
      }
    };

    for (std::size_t i = 0; i < conj.size(); ++i) {
      const auto& lit = conj[i];
      switch (lit.kind) {
        case core::Literal::Kind::Positive: cur = join(cur, scan(lit.atom, &constraints)); break;
        case core::Literal::Kind::Reduce: {
          VarSet around = outer;
          for (std::size_t j = 0; j < conj.size(); ++j) {
            if (j != i) literal_vars(conj[j], around);
          }
          cur = join(cur, reduce(*lit.reduce, around));
          break;
        }
        case core::Literal::Kind::Negative: negatives.push_back(&lit.atom); continue;
        case core::Literal::Kind::Constraint: constraints.push_back(lit.constraint); continue;
      }
      settle();
    }
    if (!cur) cur = unit();
    settle();
    done_c.resize(constraints.size(), false);
    done_n.resize(negatives.size(), false);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      if (!done_c[i]) scalar(*constraints[i], cur->cols);
    }
    for (std::size_t i = 0; i < negatives.size(); ++i) {
      if (done_n[i]) continue;
      for (const auto& a : negatives[i]->args) {
        if (a->kind == Expr::Kind::Var) scalar(*a, cur->cols);
      }
    }
    return *cur;
  }

  ValueType var_type(const std::string& v, ValueType fallback) const {
    const auto& vars = types_.rule_vars.at(rule_);
    auto it = vars.find(v);
    return it == vars.end() ? fallback : it->second;
  }

  Bound project_to(const Bound& r, const std::vector<std::string>& cols, const SourceLocation& loc,
                   std::string_view what) {
    for (const auto& v : cols) {
      if (!r.has(v)) throw CompileError(loc, std::string(what) + " `" + v + "` is not bound by a positive atom");
    }
    return reorder(r, cols);
  }

  Bound reduce(const core::Reduce& r, const VarSet& outer) {
    using K = ram::AggregatorKind;
    const bool sampling = r.op == ast::Reduce::Op::Sample;
    std::vector<std::string> inputs = r.arg_vars;
    inputs.insert(inputs.end(), r.bindings.begin(), r.bindings.end());
    for (const auto& v : inputs) {
      if (v == "_") throw CompileError(r.loc, "binding variables must be named");
    }

    VarSet inner = outer;
    inner.insert(inputs.begin(), inputs.end());
    std::vector<Bound> bodies;
    for (const auto& c : r.body) bodies.push_back(conjunction(c, inner));

    std::vector<std::string> keys;
    if (r.group_vars) {
      keys = *r.group_vars;
    } else {
      const VarSet results(r.results.begin(), r.results.end());
      for (const auto& v : bodies.front().cols) {
        if (v.front() == '#' || !outer.count(v) || results.count(v)) continue;
        if (std::ranges::find(inputs, v) != inputs.end()) continue;
        if (std::ranges::all_of(bodies, [&](const Bound& bb) { return bb.has(v); })) keys.push_back(v);
      }
    }
    auto layout = keys;
    layout.insert(layout.end(), inputs.begin(), inputs.end());
    ExprPtr body;
    for (const auto& bb : bodies) {
      auto p = project_to(bb, layout, r.loc, "aggregation variable");
      body = body ? b_.union_of(body, p.expr) : p.expr;
    }

    std::vector<std::string> results;
    for (const auto& v : r.results) results.push_back(v == "_" ? fresh_var() + "_" : v);

    ram::Aggregator g;
    ram::Sampler s = r.sampler;
    if (!sampling) {
      g.kind = r.aggregator;
      g.arg_count = r.arg_vars.size();
      if (g.kind == K::Count) g.result_type = var_type(r.results[0], ValueType::USize);
      if (g.kind == K::Sum || g.kind == K::Prod) g.result_type = var_type(r.bindings.back(), ValueType::USize);
    }
    if (sampling && s.k == 0) throw CompileError(r.loc, "sample count must be positive");

    Bound out;
    if (keys.empty()) {
      out.expr = sampling ? b_.sample(s, body) : b_.aggregate(g, body);
    } else {
      ExprPtr groups;
      if (r.group_vars) {
        for (const auto& c : r.group_body) {
          auto p = project_to(conjunction(c, inner), keys, r.loc, "group-by variable");
          groups = groups ? b_.union_of(groups, p.expr) : p.expr;
        }
      } else {
        std::vector<std::size_t> key_idx(keys.size());
        for (std::size_t i = 0; i < keys.size(); ++i) key_idx[i] = i;
        groups = b_.one_overwrite(b_.keep_columns(body, key_idx));
        g.skip_empty_world = true;
      }
      out.expr = sampling ? b_.group_sample(s, groups, body, keys.size()) : b_.group_aggregate(g, groups, body, keys.size());
      out.cols = keys;
    }
    if (!sampling && (g.kind == K::Argmin || g.kind == K::Argmax) && r.results.size() == r.arg_vars.size()) {
      std::vector<std::size_t> keep(out.cols.size() + r.arg_vars.size());
      for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
      out.expr = b_.keep_columns(out.expr, keep);
    }
    out.cols.insert(out.cols.end(), results.begin(), results.end());
    // Drop unnamed results.
    std::vector<std::string> named;
    for (const auto& c : out.cols) {
      if (c.back() != '_' || c.front() != '#') named.push_back(c);
    }
    return reorder(out, named);
  }

  ExprPtr lower_rule(const core::Rule& r) {
    VarSet head_vars;
    for (const auto& a : r.head.args) expr_vars(*a, head_vars);
    Bound body = conjunction(r.body, head_vars);
    bool identity = r.head.args.size() == body.cols.size();
    for (std::size_t i = 0; identity && i < r.head.args.size(); ++i) {
      const Expr& a = *r.head.args[i];
      identity = a.kind == Expr::Kind::Var && a.name == body.cols[i];
    }
    if (identity) return body.expr;
    std::vector<ScalarPtr> cols;
    for (const auto& a : r.head.args) cols.push_back(ram::fold_constants(scalar(*a, body.cols)));
    return b_.project(body.expr, std::move(cols));
  }

  const core::Program& prog_;
  const core::TypeInfo& types_;
  ram::ExprBuilder b_;
  std::size_t rule_ = 0;
  std::size_t next_var_ = 0;
  bool uses_unit_ = false;
};

}  // namespace

CompiledProgram lower(const core::Program& program, const core::TypeInfo& types,
                      const std::vector<std::vector<std::string>>& strata) {
  return Lowering(program, types).run(strata);
}

}  // namespace tagdl
