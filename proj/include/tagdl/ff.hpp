#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tagdl/value.hpp"

namespace tagdl {

enum class BinaryOp { Add, Sub, Mul, Div, Mod, And, Or, Eq, Ne, Lt, Le, Gt, Ge };
enum class UnaryOp { Not, Neg };

std::string_view symbol(BinaryOp op);
std::string_view symbol(UnaryOp op);

constexpr bool is_arithmetic(BinaryOp op) { return op <= BinaryOp::Mod; }
constexpr bool is_logical(BinaryOp op) { return op == BinaryOp::And || op == BinaryOp::Or; }
constexpr bool is_comparison(BinaryOp op) { return op >= BinaryOp::Eq; }

// Every operation below returns nullopt on failure: division by zero, integer
// overflow, an invalid cast, a NaN result, or operands of mismatched types.
// Float division by zero is not a failure and yields an infinity.

std::optional<Value> apply_binary(BinaryOp op, const Value& a, const Value& b);
std::optional<Value> apply_unary(UnaryOp op, const Value& a);
/// `a as target`. Floats truncate toward zero when cast to integers; any
/// value casts to String through its display form.
std::optional<Value> cast_value(const Value& a, ValueType target);

/// Display form used by casts to String: strings and chars are unquoted.
std::string display_string(const Value& v);

/// 64-bit FNV-1a over the canonical encoding of the arguments: per value a
/// type byte, then the payload in little-endian (integers as 64-bit two's
/// complement, floats as IEEE-754 binary64 with -0.0 folded into +0.0, chars
/// as 32-bit code points, strings as a 64-bit byte length plus the bytes).
std::uint64_t stable_hash(std::span<const Value> args);

/// How a foreign function constrains the types of its call site.
struct FfTyping {
  /// Allowed types per positional parameter.
  std::vector<TypeSet> params;
  /// When set, further arguments repeat this type set.
  std::optional<TypeSet> variadic;
  /// Result type, or nullopt when the result has the first argument's type.
  std::optional<ValueType> result;
};

struct ForeignFunction {
  std::string name;
  std::string signature;
  FfTyping typing;
  std::function<std::optional<Value>(std::span<const Value>)> apply;
};

/// Built-in `$name(...)` functions in name order.
const std::vector<ForeignFunction>& foreign_functions();
const ForeignFunction* find_foreign_function(std::string_view name);

/// Calls a registered function; nullopt on failure or unknown name.
std::optional<Value> apply_ff(std::string_view name, std::span<const Value> args);

}  // namespace tagdl
