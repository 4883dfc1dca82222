#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tagdl/frontend/ast.hpp"

namespace tagdl::core {

// Desugared program: constants substituted, bodies split into conjunctions
// of literals, rule tags turned into hidden facts.

struct Reduce;

struct Literal {
  enum class Kind { Positive, Negative, Constraint, Reduce };
  Kind kind = Kind::Positive;
  ast::Atom atom;
  ast::ExprPtr constraint;
  std::shared_ptr<Reduce> reduce;
  SourceLocation loc;
};

using Conjunction = std::vector<Literal>;

struct Reduce {
  ast::Reduce::Op op = ast::Reduce::Op::Aggregate;
  ram::AggregatorKind aggregator = ram::AggregatorKind::Count;
  ram::Sampler sampler;
  std::vector<std::string> arg_vars;
  std::vector<std::string> results;
  std::vector<std::string> bindings;
  /// Disjuncts of the body; for forall, of its negation.
  std::vector<Conjunction> body;
  std::optional<std::vector<std::string>> group_vars;
  std::vector<Conjunction> group_body;
  SourceLocation loc;
};

struct Rule {
  ast::Atom head;
  Conjunction body;
  SourceLocation loc;
};

struct Fact {
  std::string relation;
  std::vector<ast::ExprPtr> args;
  std::optional<double> prob;
  std::optional<std::uint64_t> exclusion;
  SourceLocation loc;
};

struct RelationDecl {
  std::string name;
  std::vector<ValueType> columns;
  SourceLocation loc;
};

struct Program {
  std::vector<RelationDecl> decls;
  std::vector<Fact> facts;
  std::vector<Rule> rules;
  std::vector<std::string> queries;
  std::set<std::string> hidden;
  std::vector<ast::Attribute> attributes;
};

/// Relation signatures and the resolved type of every expression node.
struct TypeInfo {
  std::map<std::string, RelationSignature> relations;
  std::unordered_map<const ast::Expr*, ValueType> exprs;
  /// Per rule index: variable name to type.
  std::vector<std::map<std::string, ValueType>> rule_vars;
};

}  // namespace tagdl::core
