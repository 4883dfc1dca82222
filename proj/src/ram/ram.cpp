#include "tagdl/ram.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tagdl::ram {

namespace {

std::shared_ptr<Scalar> scalar(Scalar::Kind k) {
  auto s = std::make_shared<Scalar>();
  s->kind = k;
  return s;
}

std::string constant_string(const Value& v) {
  std::string s = to_string(v);
  if (is_numeric(v.type())) s += type_name(v.type());
  return s;
}

void collect_uses(const Expr& e, bool guarded, PredicateUses& out) {
  switch (e.kind) {
    case ExprKind::Predicate: (guarded ? out.guarded : out.monotone).push_back(e.predicate); return;
    case ExprKind::Difference:
    case ExprKind::AntiJoin:
      collect_uses(*e.children[0], guarded, out);
      collect_uses(*e.children[1], true, out);
      return;
    case ExprKind::Aggregate:
    case ExprKind::GroupByAggregate:
    case ExprKind::Sample:
    case ExprKind::GroupBySample:
      for (const auto& c : e.children) collect_uses(*c, true, out);
      return;
    default:
      for (const auto& c : e.children) collect_uses(*c, guarded, out);
  }
}

void check_expr(const Expr& e, const Program& p, const std::string& where, std::vector<std::string>& errors) {
  auto fail = [&](const std::string& msg) { errors.push_back(where + ": " + msg); };
  for (const auto& c : e.children) {
    if (!c) {
      fail("missing operand");
      return;
    }
    check_expr(*c, p, where, errors);
  }
  auto child_arity = [&](std::size_t i) { return e.children[i]->arity; };
  switch (e.kind) {
    case ExprKind::Predicate: {
      const auto* info = p.find(e.predicate);
      if (!info) {
        fail("undeclared predicate " + e.predicate);
      } else if (info->signature.arity() != e.arity) {
        fail("predicate " + e.predicate + " used with arity " + std::to_string(e.arity) + " but declared with " +
             std::to_string(info->signature.arity()));
      }
      break;
    }
    case ExprKind::Select:
      if (!e.condition) {
        fail("selection without condition");
      } else if (auto m = max_slot(*e.condition); m && *m >= child_arity(0)) {
        fail("selection reads slot #" + std::to_string(*m) + " of a " + std::to_string(child_arity(0)) + "-ary input");
      }
      break;
    case ExprKind::Project:
      for (const auto& col : e.projection) {
        if (auto m = max_slot(*col); m && *m >= child_arity(0)) {
          fail("projection reads slot #" + std::to_string(*m) + " of a " + std::to_string(child_arity(0)) +
               "-ary input");
        }
      }
      break;
    case ExprKind::Union:
    case ExprKind::Intersect:
    case ExprKind::Difference:
      if (child_arity(0) != child_arity(1)) fail("operands of differing arity");
      break;
    case ExprKind::NaturalJoin:
      if (e.key_len > child_arity(0) || e.key_len > child_arity(1)) fail("join key longer than an operand");
      break;
    case ExprKind::AntiJoin:
      if (child_arity(1) != e.key_len || e.key_len > child_arity(0)) fail("antijoin key does not match operands");
      break;
    case ExprKind::GroupByAggregate:
    case ExprKind::GroupBySample:
      if (e.key_len > child_arity(0) || e.key_len > child_arity(1)) fail("group key longer than an operand");
      [[fallthrough]];
    case ExprKind::Aggregate:
    case ExprKind::Sample:
      if ((e.kind == ExprKind::Sample || e.kind == ExprKind::GroupBySample) && e.sampler.k == 0) {
        fail("sampler bound must be positive");
      }
      break;
    default: break;
  }
}

}  // namespace

ScalarPtr Scalar::make_slot(std::size_t i) {
  auto s = scalar(Kind::Slot);
  s->slot = i;
  return s;
}

ScalarPtr Scalar::make_constant(Value v) {
  auto s = scalar(Kind::Constant);
  s->constant = std::move(v);
  return s;
}

ScalarPtr Scalar::make_binary(BinaryOp op, ScalarPtr a, ScalarPtr b) {
  auto s = scalar(Kind::Binary);
  s->binary = op;
  s->args = {std::move(a), std::move(b)};
  return s;
}

ScalarPtr Scalar::make_unary(UnaryOp op, ScalarPtr a) {
  auto s = scalar(Kind::Unary);
  s->unary = op;
  s->args = {std::move(a)};
  return s;
}

ScalarPtr Scalar::make_cast(ScalarPtr a, ValueType to) {
  auto s = scalar(Kind::Cast);
  s->cast_to = to;
  s->args = {std::move(a)};
  return s;
}

ScalarPtr Scalar::make_call(std::string fn, std::vector<ScalarPtr> args) {
  auto s = scalar(Kind::Call);
  s->function = std::move(fn);
  s->args = std::move(args);
  return s;
}

ScalarPtr Scalar::make_if(ScalarPtr cond, ScalarPtr then, ScalarPtr otherwise) {
  auto s = scalar(Kind::IfThenElse);
  s->args = {std::move(cond), std::move(then), std::move(otherwise)};
  return s;
}

std::optional<Value> evaluate(const Scalar& s, const Tuple& u) {
  switch (s.kind) {
    case Scalar::Kind::Slot:
      if (s.slot >= u.size()) return std::nullopt;
      return u[s.slot];
    case Scalar::Kind::Constant: return s.constant;
    case Scalar::Kind::Binary: {
      auto a = evaluate(*s.args[0], u);
      if (!a) return std::nullopt;
      // Short-circuit keeps `x != 0 && 6 / x > 1` from failing on x = 0.
      if (s.binary == BinaryOp::And && a->type() == ValueType::Bool && !a->as_bool()) return a;
      if (s.binary == BinaryOp::Or && a->type() == ValueType::Bool && a->as_bool()) return a;
      auto b = evaluate(*s.args[1], u);
      if (!b) return std::nullopt;
      return apply_binary(s.binary, *a, *b);
    }
    case Scalar::Kind::Unary: {
      auto a = evaluate(*s.args[0], u);
      if (!a) return std::nullopt;
      return apply_unary(s.unary, *a);
    }
    case Scalar::Kind::Cast: {
      auto a = evaluate(*s.args[0], u);
      if (!a) return std::nullopt;
      return cast_value(*a, s.cast_to);
    }
    case Scalar::Kind::Call: {
      std::vector<Value> args;
      args.reserve(s.args.size());
      for (const auto& arg : s.args) {
        auto v = evaluate(*arg, u);
        if (!v) return std::nullopt;
        args.push_back(std::move(*v));
      }
      auto r = apply_ff(s.function, args);
      if (r && r->is_nan()) return std::nullopt;
      return r;
    }
    case Scalar::Kind::IfThenElse: {
      auto c = evaluate(*s.args[0], u);
      if (!c || c->type() != ValueType::Bool) return std::nullopt;
      return evaluate(*s.args[c->as_bool() ? 1 : 2], u);
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> max_slot(const Scalar& s) {
  std::optional<std::size_t> best;
  if (s.kind == Scalar::Kind::Slot) best = s.slot;
  for (const auto& a : s.args) {
    if (auto m = max_slot(*a); m && (!best || *m > *best)) best = m;
  }
  return best;
}

ScalarPtr fold_constants(const ScalarPtr& s) {
  if (s->kind == Scalar::Kind::Slot || s->kind == Scalar::Kind::Constant) return s;
  auto copy = std::make_shared<Scalar>(*s);
  bool all_constant = true;
  for (auto& a : copy->args) {
    a = fold_constants(a);
    all_constant = all_constant && a->kind == Scalar::Kind::Constant;
  }
  if (all_constant) {
    if (auto v = evaluate(*copy, {})) return Scalar::make_constant(std::move(*v));
  }
  return copy;
}

std::string to_string(const Scalar& s) {
  switch (s.kind) {
    case Scalar::Kind::Slot: return "#" + std::to_string(s.slot);
    case Scalar::Kind::Constant: return constant_string(s.constant);
    case Scalar::Kind::Binary:
      return "(" + to_string(*s.args[0]) + " " + std::string(symbol(s.binary)) + " " + to_string(*s.args[1]) + ")";
    case Scalar::Kind::Unary: return std::string(symbol(s.unary)) + to_string(*s.args[0]);
    case Scalar::Kind::Cast: return "(" + to_string(*s.args[0]) + " as " + std::string(type_name(s.cast_to)) + ")";
    case Scalar::Kind::Call: {
      std::string out = "$" + s.function + "(";
      for (std::size_t i = 0; i < s.args.size(); ++i) out += (i ? ", " : "") + to_string(*s.args[i]);
      return out + ")";
    }
    case Scalar::Kind::IfThenElse:
      return "(if " + to_string(*s.args[0]) + " then " + to_string(*s.args[1]) + " else " + to_string(*s.args[2]) +
             ")";
  }
  return "?";
}

std::size_t Aggregator::result_arity(std::size_t input_arity) const {
  switch (kind) {
    case AggregatorKind::Argmin:
    case AggregatorKind::Argmax: return arg_count + 1;
    default: (void)input_arity; return 1;
  }
}

std::string_view name(AggregatorKind k) {
  switch (k) {
    case AggregatorKind::Count: return "count";
    case AggregatorKind::Sum: return "sum";
    case AggregatorKind::Prod: return "prod";
    case AggregatorKind::Min: return "min";
    case AggregatorKind::Max: return "max";
    case AggregatorKind::Exists: return "exists";
    case AggregatorKind::Forall: return "forall";
    case AggregatorKind::Argmin: return "argmin";
    case AggregatorKind::Argmax: return "argmax";
  }
  return "?";
}

std::string to_string(const Sampler& s) {
  std::string_view n = s.kind == SamplerKind::Top ? "top" : s.kind == SamplerKind::Categorical ? "categorical" : "uniform";
  return std::string(n) + "<" + std::to_string(s.k) + ">";
}

std::shared_ptr<Expr> ExprBuilder::node(ExprKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->id = next_id_++;
  return e;
}

ExprPtr ExprBuilder::empty(std::size_t arity) {
  auto e = node(ExprKind::Empty);
  e->arity = arity;
  return e;
}

ExprPtr ExprBuilder::predicate(std::string name, std::size_t arity) {
  auto e = node(ExprKind::Predicate);
  e->predicate = std::move(name);
  e->arity = arity;
  return e;
}

ExprPtr ExprBuilder::zero_overwrite(ExprPtr c) {
  auto e = node(ExprKind::ZeroOverwrite);
  e->arity = c->arity;
  e->children = {std::move(c)};
  return e;
}

ExprPtr ExprBuilder::one_overwrite(ExprPtr c) {
  auto e = node(ExprKind::OneOverwrite);
  e->arity = c->arity;
  e->children = {std::move(c)};
  return e;
}

ExprPtr ExprBuilder::select(ExprPtr c, ScalarPtr condition) {
  auto e = node(ExprKind::Select);
  e->arity = c->arity;
  e->condition = std::move(condition);
  e->children = {std::move(c)};
  return e;
}

ExprPtr ExprBuilder::project(ExprPtr c, std::vector<ScalarPtr> columns) {
  auto e = node(ExprKind::Project);
  e->arity = columns.size();
  e->projection = std::move(columns);
  e->children = {std::move(c)};
  return e;
}

ExprPtr ExprBuilder::union_of(ExprPtr a, ExprPtr b) {
  auto e = node(ExprKind::Union);
  e->arity = a->arity;
  e->children = {std::move(a), std::move(b)};
  return e;
}

ExprPtr ExprBuilder::product(ExprPtr a, ExprPtr b) {
  auto e = node(ExprKind::Product);
  e->arity = a->arity + b->arity;
  e->children = {std::move(a), std::move(b)};
  return e;
}

ExprPtr ExprBuilder::intersect(ExprPtr a, ExprPtr b) {
  auto e = node(ExprKind::Intersect);
  e->arity = a->arity;
  e->children = {std::move(a), std::move(b)};
  return e;
}

ExprPtr ExprBuilder::natural_join(ExprPtr a, ExprPtr b, std::size_t key_len) {
  auto e = node(ExprKind::NaturalJoin);
  e->key_len = key_len;
  e->arity = a->arity + b->arity - std::min(key_len, b->arity);
  e->children = {std::move(a), std::move(b)};
  return e;
}

ExprPtr ExprBuilder::difference(ExprPtr a, ExprPtr b) {
  auto e = node(ExprKind::Difference);
  e->arity = a->arity;
  e->children = {std::move(a), std::move(b)};
  return e;
}

ExprPtr ExprBuilder::antijoin(ExprPtr a, ExprPtr b, std::size_t key_len) {
  auto e = node(ExprKind::AntiJoin);
  e->key_len = key_len;
  e->arity = a->arity;
  e->children = {std::move(a), std::move(b)};
  return e;
}

ExprPtr ExprBuilder::aggregate(Aggregator g, ExprPtr c) {
  auto e = node(ExprKind::Aggregate);
  e->aggregator = g;
  e->arity = g.result_arity(c->arity);
  e->children = {std::move(c)};
  return e;
}

ExprPtr ExprBuilder::group_aggregate(Aggregator g, ExprPtr groups, ExprPtr body, std::size_t key_len) {
  auto e = node(ExprKind::GroupByAggregate);
  e->aggregator = g;
  e->key_len = key_len;
  const std::size_t binding = body->arity >= key_len ? body->arity - key_len : 0;
  e->arity = groups->arity + g.result_arity(binding);
  e->children = {std::move(groups), std::move(body)};
  return e;
}

ExprPtr ExprBuilder::sample(Sampler s, ExprPtr c) {
  auto e = node(ExprKind::Sample);
  e->sampler = s;
  e->arity = c->arity;
  e->children = {std::move(c)};
  return e;
}

ExprPtr ExprBuilder::group_sample(Sampler s, ExprPtr groups, ExprPtr body, std::size_t key_len) {
  auto e = node(ExprKind::GroupBySample);
  e->sampler = s;
  e->key_len = key_len;
  e->arity = groups->arity + (body->arity >= key_len ? body->arity - key_len : 0);
  e->children = {std::move(groups), std::move(body)};
  return e;
}

ExprPtr ExprBuilder::keep_columns(ExprPtr e, const std::vector<std::size_t>& columns) {
  bool identity = columns.size() == e->arity;
  for (std::size_t i = 0; identity && i < columns.size(); ++i) identity = columns[i] == i;
  if (identity) return e;
  std::vector<ScalarPtr> cols;
  cols.reserve(columns.size());
  for (auto c : columns) cols.push_back(Scalar::make_slot(c));
  return project(std::move(e), std::move(cols));
}

std::string to_string(const Expr& e) {
  auto kids = [&](std::string head) {
    head += "(";
    for (std::size_t i = 0; i < e.children.size(); ++i) head += (i ? ", " : "") + to_string(*e.children[i]);
    return head + ")";
  };
  auto key = [&] { return "<" + std::to_string(e.key_len) + ">"; };
  auto agg = [&] {
    std::string s(name(e.aggregator.kind));
    if (e.aggregator.arg_count) s += "/" + std::to_string(e.aggregator.arg_count);
    if (e.aggregator.skip_empty_world) s += ", nonempty";
    return "[" + s + "]";
  };
  switch (e.kind) {
    case ExprKind::Empty: return "empty/" + std::to_string(e.arity);
    case ExprKind::Predicate: return e.predicate;
    case ExprKind::ZeroOverwrite: return kids("zero");
    case ExprKind::OneOverwrite: return kids("one");
    case ExprKind::Select: return kids("select[" + to_string(*e.condition) + "]");
    case ExprKind::Project: {
      std::string h = "project[";
      for (std::size_t i = 0; i < e.projection.size(); ++i) h += (i ? ", " : "") + to_string(*e.projection[i]);
      return kids(h + "]");
    }
    case ExprKind::Union: return kids("union");
    case ExprKind::Product: return kids("product");
    case ExprKind::Intersect: return kids("intersect");
    case ExprKind::NaturalJoin: return kids("join" + key());
    case ExprKind::Difference: return kids("difference");
    case ExprKind::AntiJoin: return kids("antijoin" + key());
    case ExprKind::Aggregate: return kids("aggregate" + agg());
    case ExprKind::GroupByAggregate: return kids("group_aggregate" + key() + agg());
    case ExprKind::Sample: return kids("sample[" + to_string(e.sampler) + "]");
    case ExprKind::GroupBySample: return kids("group_sample" + key() + "[" + to_string(e.sampler) + "]");
  }
  return "?";
}

const RelationInfo* Program::find(const std::string& name) const {
  for (const auto& r : relations) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

std::string to_string(const Program& p) {
  std::ostringstream os;
  for (const auto& r : p.relations) {
    os << (r.hidden ? "hidden " : "") << "relation " << r.name << "(";
    for (std::size_t i = 0; i < r.signature.columns.size(); ++i) {
      os << (i ? ", " : "") << type_name(r.signature.columns[i]);
    }
    os << ")\n";
  }
  for (std::size_t i = 0; i < p.strata.size(); ++i) {
    const auto& s = p.strata[i];
    os << "stratum " << i << (s.recursive ? " recursive" : "") << "\n";
    for (const auto& r : s.rules) os << "  " << r.head << " <- " << to_string(*r.body) << "\n";
  }
  os << "output";
  for (const auto& o : p.outputs) os << " " << o;
  os << "\n";
  return os.str();
}

PredicateUses predicate_uses(const Expr& e) {
  PredicateUses out;
  collect_uses(e, false, out);
  return out;
}

std::vector<std::string> validate(const Program& p) {
  std::vector<std::string> errors;
  std::map<std::string, std::size_t> producer;
  std::set<std::string> names;
  for (const auto& r : p.relations) {
    if (!names.insert(r.name).second) errors.push_back("relation " + r.name + " declared twice");
  }
  for (std::size_t i = 0; i < p.strata.size(); ++i) {
    std::set<std::string> heads;
    for (const auto& r : p.strata[i].rules) {
      if (!heads.insert(r.head).second) {
        errors.push_back("stratum " + std::to_string(i) + ": head " + r.head + " appears in two rules");
      }
      auto [it, fresh] = producer.emplace(r.head, i);
      if (!fresh && it->second != i) {
        errors.push_back("head " + r.head + " is produced by strata " + std::to_string(it->second) + " and " +
                         std::to_string(i));
      }
    }
  }
  for (std::size_t i = 0; i < p.strata.size(); ++i) {
    for (const auto& r : p.strata[i].rules) {
      const std::string where = "stratum " + std::to_string(i) + ", rule " + r.head;
      if (!r.body) {
        errors.push_back(where + ": missing body");
        continue;
      }
      const auto* head = p.find(r.head);
      if (!head) {
        errors.push_back(where + ": undeclared head");
      } else if (head->signature.arity() != r.body->arity) {
        errors.push_back(where + ": body arity " + std::to_string(r.body->arity) + " does not match head arity " +
                         std::to_string(head->signature.arity()));
      }
      check_expr(*r.body, p, where, errors);
      auto uses = predicate_uses(*r.body);
      for (const auto& name : uses.monotone) {
        auto it = producer.find(name);
        if (it != producer.end() && it->second > i) {
          errors.push_back(where + ": reads " + name + " which is produced by later stratum " +
                           std::to_string(it->second));
        }
      }
      for (const auto& name : uses.guarded) {
        auto it = producer.find(name);
        if (it != producer.end() && it->second >= i) {
          errors.push_back(where + ": " + name +
                           " is negated, aggregated or sampled but produced in the same or a later stratum");
        }
      }
    }
  }
  return errors;
}

}  // namespace tagdl::ram
