#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tagdl/error.hpp"
#include "tagdl/ff.hpp"
#include "tagdl/ram.hpp"
#include "tagdl/value.hpp"

namespace tagdl::ast {

struct Literal {
  enum class Kind { Int, Float, String, Char, Bool };
  Kind kind = Kind::Int;
  /// Magnitude for Int, already negated when the source had a leading minus.
  __int128 int_value = 0;
  double float_value = 0;
  std::string string_value;
  char32_t char_value = 0;
  bool bool_value = false;
  /// Set for substituted constants with a declared type.
  std::optional<ValueType> fixed_type;
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
  enum class Kind { Var, Wildcard, Const, Binary, Unary, Cast, Call, If };
  Kind kind = Kind::Const;
  SourceLocation loc;
  /// Variable name or function name (without `$`).
  std::string name;
  Literal literal;
  BinaryOp binary = BinaryOp::Add;
  UnaryOp unary = UnaryOp::Not;
  ValueType cast_to = ValueType::Bool;
  std::vector<ExprPtr> args;
};

struct Atom {
  std::string predicate;
  std::vector<ExprPtr> args;
  SourceLocation loc;
};

struct Formula;
using FormulaPtr = std::shared_ptr<Formula>;

/// `results := op(bindings: body where group_vars: group_body)`
struct Reduce {
  enum class Op { Aggregate, Sample };
  Op op = Op::Aggregate;
  ram::AggregatorKind aggregator = ram::AggregatorKind::Count;
  ram::Sampler sampler;
  /// `argmax<args>`
  std::vector<std::string> arg_vars;
  std::vector<std::string> results;
  std::vector<std::string> bindings;
  FormulaPtr body;
  std::optional<std::vector<std::string>> group_vars;
  FormulaPtr group_body;
  SourceLocation loc;
};

struct Formula {
  enum class Kind { Atom, Not, And, Or, Implies, Constraint, Reduce };
  Kind kind = Kind::Atom;
  SourceLocation loc;
  Atom atom;
  std::vector<FormulaPtr> children;
  ExprPtr constraint;
  std::shared_ptr<Reduce> reduce;
};

struct Attribute {
  std::string name;
  /// Argument tokens as written.
  std::vector<std::string> args;
  SourceLocation loc;
};

struct ImportDef {
  std::string path;
};

struct TypeAlias {
  std::string name;
  std::string target;
  /// `type name <: target`
  bool subtype = false;
};

struct RelationTypeDecl {
  std::string name;
  std::vector<std::pair<std::string, std::string>> columns;  // (column name or "", type name)
  SourceLocation loc;
};

struct TypeDef {
  std::variant<TypeAlias, std::vector<RelationTypeDecl>> body;
};

struct ConstDecl {
  std::string name;
  std::optional<std::string> type;
  ExprPtr value;
  SourceLocation loc;
};

struct ConstDef {
  std::vector<ConstDecl> decls;
};

struct TaggedTuple {
  std::optional<double> prob;
  std::vector<ExprPtr> values;
  SourceLocation loc;
};

/// `rel name = {t₁; t₂, t₃}`: outer list is independent groups, inner list
/// members are mutually exclusive.
struct FactSet {
  std::string relation;
  std::vector<std::vector<TaggedTuple>> groups;
  SourceLocation loc;
};

/// `rel [p::]a₁(...), a₂(...)`
struct FactList {
  std::optional<double> prob;
  std::vector<Atom> atoms;
};

struct RuleDef {
  std::optional<double> prob;
  Atom head;
  FormulaPtr body;
  /// Written with `:-` rather than `=`.
  bool horn_arrow = false;
  SourceLocation loc;
};

struct QueryDef {
  std::vector<std::string> relations;
  SourceLocation loc;
};

struct Item {
  std::vector<Attribute> attributes;
  std::variant<ImportDef, TypeDef, ConstDef, FactSet, FactList, RuleDef, QueryDef> def;
  SourceLocation loc;
};

struct Program {
  std::vector<Item> items;
};

/// Source text that parses back to the same program.
std::string to_source(const Program& p);
std::string to_source(const Expr& e);
std::string to_source(const Formula& f);

}  // namespace tagdl::ast
