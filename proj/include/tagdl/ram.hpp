#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tagdl/ff.hpp"
#include "tagdl/value.hpp"

namespace tagdl::ram {

struct Scalar;
using ScalarPtr = std::shared_ptr<const Scalar>;

/// Expression over the slots of one input tuple; used for selection
/// conditions and projection columns.
struct Scalar {
  enum class Kind { Slot, Constant, Binary, Unary, Cast, Call, IfThenElse };

  Kind kind = Kind::Constant;
  std::size_t slot = 0;
  Value constant;
  BinaryOp binary = BinaryOp::Add;
  UnaryOp unary = UnaryOp::Not;
  ValueType cast_to = ValueType::Bool;
  std::string function;
  std::vector<ScalarPtr> args;

  static ScalarPtr make_slot(std::size_t i);
  static ScalarPtr make_constant(Value v);
  static ScalarPtr make_binary(BinaryOp op, ScalarPtr a, ScalarPtr b);
  static ScalarPtr make_unary(UnaryOp op, ScalarPtr a);
  static ScalarPtr make_cast(ScalarPtr a, ValueType to);
  static ScalarPtr make_call(std::string fn, std::vector<ScalarPtr> args);
  static ScalarPtr make_if(ScalarPtr cond, ScalarPtr then, ScalarPtr otherwise);
};

/// nullopt when some foreign function along the way fails.
std::optional<Value> evaluate(const Scalar& s, const Tuple& u);
/// Highest slot referenced, if any.
std::optional<std::size_t> max_slot(const Scalar& s);
/// Replaces every slot-free subtree that evaluates successfully by its value.
ScalarPtr fold_constants(const ScalarPtr& s);
std::string to_string(const Scalar& s);

enum class AggregatorKind { Count, Sum, Prod, Min, Max, Exists, Forall, Argmin, Argmax };

/// Aggregators act on binding tuples laid out as `(args..., value)`: sum,
/// prod, min and max read the last column, argmin/argmax return the leading
/// `arg_count` columns together with the extremal value. `skip_empty_world`
/// drops the world where no tuple of a group is present; implicit group-by
/// uses it because such a group does not exist in that world.
struct Aggregator {
  AggregatorKind kind = AggregatorKind::Count;
  std::size_t arg_count = 0;
  bool skip_empty_world = false;
  /// Result type of count, sum and prod (also the zero of an empty sum).
  ValueType result_type = ValueType::USize;

  /// Arity of one result tuple given the arity of the binding tuples.
  std::size_t result_arity(std::size_t input_arity) const;
};

std::string_view name(AggregatorKind k);

enum class SamplerKind { Top, Categorical, Uniform };

struct Sampler {
  SamplerKind kind = SamplerKind::Top;
  std::size_t k = 1;
};

std::string to_string(const Sampler& s);

enum class ExprKind {
  Empty,
  Predicate,
  ZeroOverwrite,
  OneOverwrite,
  Select,
  Project,
  Union,
  Product,
  Intersect,
  NaturalJoin,
  Difference,
  AntiJoin,
  Aggregate,
  GroupByAggregate,
  Sample,
  GroupBySample,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// One relational-algebra node. Tuples are flat: a product or join
/// concatenates columns, and joins match on a shared key prefix of
/// `key_len` columns. Group-by nodes take the groups as their first child
/// (key prefix of `key_len` columns) and the body as their second child.
struct Expr {
  ExprKind kind = ExprKind::Empty;
  /// Unique within a program; seeds samplers and identifies predicate
  /// occurrences during incremental evaluation.
  std::size_t id = 0;
  std::size_t arity = 0;
  std::string predicate;
  ScalarPtr condition;
  std::vector<ScalarPtr> projection;
  std::size_t key_len = 0;
  Aggregator aggregator;
  Sampler sampler;
  std::vector<ExprPtr> children;
};

/// Constructs nodes with fresh ids and derived arities.
class ExprBuilder {
 public:
  ExprPtr empty(std::size_t arity);
  ExprPtr predicate(std::string name, std::size_t arity);
  ExprPtr zero_overwrite(ExprPtr e);
  ExprPtr one_overwrite(ExprPtr e);
  ExprPtr select(ExprPtr e, ScalarPtr condition);
  ExprPtr project(ExprPtr e, std::vector<ScalarPtr> columns);
  ExprPtr union_of(ExprPtr a, ExprPtr b);
  ExprPtr product(ExprPtr a, ExprPtr b);
  ExprPtr intersect(ExprPtr a, ExprPtr b);
  ExprPtr natural_join(ExprPtr a, ExprPtr b, std::size_t key_len);
  ExprPtr difference(ExprPtr a, ExprPtr b);
  ExprPtr antijoin(ExprPtr a, ExprPtr b, std::size_t key_len);
  ExprPtr aggregate(Aggregator g, ExprPtr e);
  ExprPtr group_aggregate(Aggregator g, ExprPtr groups, ExprPtr body, std::size_t key_len);
  ExprPtr sample(Sampler s, ExprPtr e);
  ExprPtr group_sample(Sampler s, ExprPtr groups, ExprPtr body, std::size_t key_len);

  /// Identity projection helper: keeps the listed columns in order.
  ExprPtr keep_columns(ExprPtr e, const std::vector<std::size_t>& columns);

 private:
  std::shared_ptr<Expr> node(ExprKind kind);
  std::size_t next_id_ = 0;
};

std::string to_string(const Expr& e);

/// `p ← e`
struct Rule {
  std::string head;
  ExprPtr body;
};

struct Stratum {
  std::vector<Rule> rules;
  /// Some rule reads a head of this stratum.
  bool recursive = false;
};

struct RelationInfo {
  std::string name;
  RelationSignature signature;
  /// Compiler-introduced relation (unit fact, rule tags).
  bool hidden = false;
};

struct Program {
  std::vector<RelationInfo> relations;
  std::vector<Stratum> strata;
  /// Relations whose tags are recovered into the result.
  std::vector<std::string> outputs;

  const RelationInfo* find(const std::string& name) const;
};

/// Stable textual form, one rule per line grouped by stratum.
std::string to_string(const Program& p);

/// Structural checks: declared predicates, arities, distinct and disjoint
/// heads, stratified use of negation, aggregation and sampling. Returns every
/// violation found.
std::vector<std::string> validate(const Program& p);

/// Predicates read by an expression, split by whether they occur in a
/// position that requires them to be complete (right side of difference or
/// antijoin, under an aggregate or sampler).
struct PredicateUses {
  std::vector<std::string> monotone;
  std::vector<std::string> guarded;
};
PredicateUses predicate_uses(const Expr& e);

}  // namespace tagdl::ram
