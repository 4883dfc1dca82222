#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tagdl {

/// Primitive column types. The enumerator order is the cross-type rank used by
/// the canonical value order: booleans < chars < integers < floats < strings.
enum class ValueType : std::uint8_t {
  Bool,
  Char,
  I8,
  I16,
  I32,
  I64,
  ISize,
  U8,
  U16,
  U32,
  U64,
  USize,
  F32,
  F64,
  String,
};

inline constexpr std::size_t kValueTypeCount = 15;

std::string_view type_name(ValueType t);
std::optional<ValueType> parse_type_name(std::string_view name);

constexpr bool is_signed_int(ValueType t) { return t >= ValueType::I8 && t <= ValueType::ISize; }
constexpr bool is_unsigned_int(ValueType t) { return t >= ValueType::U8 && t <= ValueType::USize; }
constexpr bool is_integer(ValueType t) { return is_signed_int(t) || is_unsigned_int(t); }
constexpr bool is_float(ValueType t) { return t == ValueType::F32 || t == ValueType::F64; }
constexpr bool is_numeric(ValueType t) { return is_integer(t) || is_float(t); }

/// Bitset over ValueType, used by type inference and FF signatures.
using TypeSet = std::uint32_t;

constexpr TypeSet type_bit(ValueType t) { return TypeSet{1} << static_cast<unsigned>(t); }
inline constexpr TypeSet kAllTypes = (TypeSet{1} << kValueTypeCount) - 1;
inline constexpr TypeSet kSignedTypes = type_bit(ValueType::I8) | type_bit(ValueType::I16) | type_bit(ValueType::I32) |
                                        type_bit(ValueType::I64) | type_bit(ValueType::ISize);
inline constexpr TypeSet kUnsignedTypes = type_bit(ValueType::U8) | type_bit(ValueType::U16) |
                                          type_bit(ValueType::U32) | type_bit(ValueType::U64) |
                                          type_bit(ValueType::USize);
inline constexpr TypeSet kIntegerTypes = kSignedTypes | kUnsignedTypes;
inline constexpr TypeSet kFloatTypes = type_bit(ValueType::F32) | type_bit(ValueType::F64);
inline constexpr TypeSet kNumericTypes = kIntegerTypes | kFloatTypes;

std::string to_string(TypeSet set);

/// Inclusive bounds of an integer type, widened to 128 bits.
__int128 int_min(ValueType t);
__int128 int_max(ValueType t);

/// A typed primitive value. Integers are stored widened (int64 / uint64),
/// f32 is stored as the double nearest to its float value.
class Value {
 public:
  using Payload = std::variant<bool, char32_t, std::int64_t, std::uint64_t, double, std::string>;

  Value() : type_(ValueType::Bool), data_(false) {}

  static Value boolean(bool b) { return Value(ValueType::Bool, b); }
  static Value character(char32_t c) { return Value(ValueType::Char, c); }
  static Value string(std::string s) { return Value(ValueType::String, std::move(s)); }
  static Value f64(double d) { return Value(ValueType::F64, d); }
  static Value f32(float f) { return Value(ValueType::F32, static_cast<double>(f)); }
  static Value i32(std::int32_t i) { return Value(ValueType::I32, static_cast<std::int64_t>(i)); }
  static Value i64(std::int64_t i) { return Value(ValueType::I64, i); }
  static Value usize(std::uint64_t u) { return Value(ValueType::USize, u); }
  static Value u64(std::uint64_t u) { return Value(ValueType::U64, u); }

  /// Builds an integer of type `t`; returns nullopt when `v` is out of range.
  static std::optional<Value> integer(ValueType t, __int128 v);
  /// Builds a float of type `t` (f32 values are rounded through float).
  static Value floating(ValueType t, double d);

  ValueType type() const { return type_; }

  bool as_bool() const { return std::get<bool>(data_); }
  char32_t as_char() const { return std::get<char32_t>(data_); }
  std::int64_t as_signed() const { return std::get<std::int64_t>(data_); }
  std::uint64_t as_unsigned() const { return std::get<std::uint64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  const std::string& as_string() const { return std::get<std::string>(data_); }

  /// Integer payload widened to 128 bits regardless of signedness.
  __int128 as_wide_int() const;

  bool is_nan() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  std::size_t hash() const;

 private:
  Value(ValueType t, Payload p) : type_(t), data_(std::move(p)) {}

  ValueType type_;
  Payload data_;
};

void append_utf8(std::string& out, char32_t c);

/// Source-style rendering: strings quoted and escaped, chars in single quotes.
std::string to_string(const Value& v);
std::ostream& operator<<(std::ostream& os, const Value& v);

/// Flat tuple of values. Nested tuples from products/joins are flattened.
using Tuple = std::vector<Value>;

std::string to_string(const Tuple& t);
bool has_nan(const Tuple& t);

struct TupleHash {
  std::size_t operator()(const Tuple& t) const;
};

/// Column types of a relation.
struct RelationSignature {
  std::vector<ValueType> columns;

  std::size_t arity() const { return columns.size(); }
  bool conforms(const Tuple& t) const;
  friend bool operator==(const RelationSignature&, const RelationSignature&) = default;
};

}  // namespace tagdl

template <>
struct std::hash<tagdl::Value> {
  std::size_t operator()(const tagdl::Value& v) const { return v.hash(); }
};
