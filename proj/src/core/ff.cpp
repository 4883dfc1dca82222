#include "tagdl/ff.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>

namespace tagdl {

namespace {

std::optional<Value> checked_int(ValueType t, __int128 v) { return Value::integer(t, v); }

std::optional<Value> float_result(ValueType t, double d) {
  Value v = Value::floating(t, d);
  if (v.is_nan()) return std::nullopt;
  return v;
}

std::optional<Value> integer_arith(BinaryOp op, ValueType t, __int128 x, __int128 y) {
  switch (op) {
    case BinaryOp::Add: return checked_int(t, x + y);
    case BinaryOp::Sub: return checked_int(t, x - y);
    case BinaryOp::Mul: {
      // Operands fit in 64 bits, so the product fits in 128.
      return checked_int(t, x * y);
    }
    case BinaryOp::Div:
      if (y == 0) return std::nullopt;
      return checked_int(t, x / y);
    case BinaryOp::Mod:
      if (y == 0) return std::nullopt;
      return checked_int(t, x % y);
    default: return std::nullopt;
  }
}

std::optional<Value> float_arith(BinaryOp op, ValueType t, double x, double y) {
  switch (op) {
    case BinaryOp::Add: return float_result(t, x + y);
    case BinaryOp::Sub: return float_result(t, x - y);
    case BinaryOp::Mul: return float_result(t, x * y);
    case BinaryOp::Div: return float_result(t, x / y);
    case BinaryOp::Mod: return float_result(t, std::fmod(x, y));
    default: return std::nullopt;
  }
}

bool compare(BinaryOp op, std::strong_ordering c) {
  switch (op) {
    case BinaryOp::Eq: return c == 0;
    case BinaryOp::Ne: return c != 0;
    case BinaryOp::Lt: return c < 0;
    case BinaryOp::Le: return c <= 0;
    case BinaryOp::Gt: return c > 0;
    default: return c >= 0;
  }
}

std::optional<__int128> parse_int(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::uint64_t mag = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), mag);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  __int128 v = mag;
  return negative ? -v : v;
}

std::optional<Value> cast_from_string(const std::string& s, ValueType target) {
  if (is_integer(target)) {
    auto v = parse_int(s);
    if (!v) return std::nullopt;
    return Value::integer(target, *v);
  }
  if (is_float(target)) {
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return float_result(target, d);
  }
  if (target == ValueType::Bool) {
    if (s == "true") return Value::boolean(true);
    if (s == "false") return Value::boolean(false);
    return std::nullopt;
  }
  if (target == ValueType::Char) {
    // Exactly one code point.
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    std::size_t len = s.size();
    if (len == 0) return std::nullopt;
    char32_t c = 0;
    std::size_t need = 0;
    if (p[0] < 0x80) {
      c = p[0];
      need = 1;
    } else if ((p[0] & 0xE0) == 0xC0) {
      c = p[0] & 0x1F;
      need = 2;
    } else if ((p[0] & 0xF0) == 0xE0) {
      c = p[0] & 0x0F;
      need = 3;
    } else {
      c = p[0] & 0x07;
      need = 4;
    }
    if (len != need) return std::nullopt;
    for (std::size_t i = 1; i < need; ++i) c = (c << 6) | (p[i] & 0x3F);
    return Value::character(c);
  }
  return Value::string(s);
}

void put_u64(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= 0x100000001b3ULL;
  }
}

void put_byte(std::uint64_t& h, unsigned char b) {
  h ^= b;
  h *= 0x100000001b3ULL;
}

std::size_t utf8_length(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::vector<ForeignFunction> build_registry() {
  std::vector<ForeignFunction> fns;
  fns.push_back({"abs", "$abs(x: numeric) -> numeric", {{kNumericTypes}, std::nullopt, std::nullopt},
                 [](std::span<const Value> a) -> std::optional<Value> {
                   if (a.size() != 1) return std::nullopt;
                   const Value& v = a[0];
                   if (is_float(v.type())) return Value::floating(v.type(), std::fabs(v.as_float()));
                   if (is_unsigned_int(v.type())) return v;
                   if (is_signed_int(v.type())) {
                     __int128 x = v.as_wide_int();
                     return Value::integer(v.type(), x < 0 ? -x : x);
                   }
                   return std::nullopt;
                 }});
  fns.push_back({"hash", "$hash(args: any...) -> u64", {{}, kAllTypes, ValueType::U64},
                 [](std::span<const Value> a) -> std::optional<Value> { return Value::u64(stable_hash(a)); }});
  fns.push_back({"string_concat", "$string_concat(args: String...) -> String",
                 {{}, type_bit(ValueType::String), ValueType::String},
                 [](std::span<const Value> a) -> std::optional<Value> {
                   std::string out;
                   for (const auto& v : a) {
                     if (v.type() != ValueType::String) return std::nullopt;
                     out += v.as_string();
                   }
                   return Value::string(std::move(out));
                 }});
  fns.push_back({"string_length", "$string_length(s: String) -> usize (code points)",
                 {{type_bit(ValueType::String)}, std::nullopt, ValueType::USize},
                 [](std::span<const Value> a) -> std::optional<Value> {
                   if (a.size() != 1 || a[0].type() != ValueType::String) return std::nullopt;
                   return Value::usize(utf8_length(a[0].as_string()));
                 }});
  return fns;
}

}  // namespace

std::string_view symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
  }
  return "?";
}

std::string_view symbol(UnaryOp op) { return op == UnaryOp::Not ? "!" : "-"; }

std::optional<Value> apply_binary(BinaryOp op, const Value& a, const Value& b) {
  if (a.type() != b.type()) return std::nullopt;
  const ValueType t = a.type();
  if (is_comparison(op)) {
    if (op != BinaryOp::Eq && op != BinaryOp::Ne && t == ValueType::Bool) return std::nullopt;
    return Value::boolean(compare(op, a <=> b));
  }
  if (is_logical(op)) {
    if (t != ValueType::Bool) return std::nullopt;
    return Value::boolean(op == BinaryOp::And ? a.as_bool() && b.as_bool() : a.as_bool() || b.as_bool());
  }
  if (is_integer(t)) return integer_arith(op, t, a.as_wide_int(), b.as_wide_int());
  if (is_float(t)) return float_arith(op, t, a.as_float(), b.as_float());
  return std::nullopt;
}

std::optional<Value> apply_unary(UnaryOp op, const Value& a) {
  if (op == UnaryOp::Not) {
    if (a.type() != ValueType::Bool) return std::nullopt;
    return Value::boolean(!a.as_bool());
  }
  if (is_signed_int(a.type())) return Value::integer(a.type(), -a.as_wide_int());
  if (is_float(a.type())) return Value::floating(a.type(), -a.as_float());
  return std::nullopt;
}

std::string display_string(const Value& v) {
  switch (v.type()) {
    case ValueType::String: return v.as_string();
    case ValueType::Char: {
      std::string out;
      append_utf8(out, v.as_char());
      return out;
    }
    default: return to_string(v);
  }
}

std::optional<Value> cast_value(const Value& a, ValueType target) {
  const ValueType from = a.type();
  if (from == target) return a;
  if (target == ValueType::String) return Value::string(display_string(a));
  if (from == ValueType::String) return cast_from_string(a.as_string(), target);

  if (is_integer(from)) {
    const __int128 v = a.as_wide_int();
    if (is_integer(target)) return Value::integer(target, v);
    if (is_float(target)) return Value::floating(target, static_cast<double>(v));
    if (target == ValueType::Bool) return Value::boolean(v != 0);
    if (target == ValueType::Char) {
      if (v < 0 || v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) return std::nullopt;
      return Value::character(static_cast<char32_t>(v));
    }
  }
  if (is_float(from)) {
    const double d = a.as_float();
    if (is_float(target)) return float_result(target, d);
    if (is_integer(target)) {
      if (!std::isfinite(d)) return std::nullopt;
      const double t = std::trunc(d);
      // Anything outside ±2^64 is out of range for every integer type.
      if (std::fabs(t) >= 18446744073709551616.0) return std::nullopt;
      return Value::integer(target, static_cast<__int128>(t));
    }
    return std::nullopt;
  }
  if (from == ValueType::Bool) {
    if (is_integer(target)) return Value::integer(target, a.as_bool() ? 1 : 0);
    if (is_float(target)) return Value::floating(target, a.as_bool() ? 1.0 : 0.0);
    return std::nullopt;
  }
  if (from == ValueType::Char && is_integer(target)) return Value::integer(target, a.as_char());
  return std::nullopt;
}

std::uint64_t stable_hash(std::span<const Value> args) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& v : args) {
    put_byte(h, static_cast<unsigned char>(v.type()));
    switch (v.type()) {
      case ValueType::Bool: put_byte(h, v.as_bool() ? 1 : 0); break;
      case ValueType::Char: {
        const auto c = static_cast<std::uint32_t>(v.as_char());
        for (int i = 0; i < 4; ++i) put_byte(h, (c >> (8 * i)) & 0xFF);
        break;
      }
      case ValueType::String:
        put_u64(h, v.as_string().size());
        for (unsigned char c : v.as_string()) put_byte(h, c);
        break;
      case ValueType::F32:
      case ValueType::F64: {
        double d = v.as_float();
        if (d == 0.0) d = 0.0;
        put_u64(h, std::bit_cast<std::uint64_t>(d));
        break;
      }
      default:
        if (is_signed_int(v.type())) {
          put_u64(h, static_cast<std::uint64_t>(v.as_signed()));
        } else {
          put_u64(h, v.as_unsigned());
        }
    }
  }
  return h;
}

const std::vector<ForeignFunction>& foreign_functions() {
  static const std::vector<ForeignFunction> kRegistry = build_registry();
  return kRegistry;
}

const ForeignFunction* find_foreign_function(std::string_view name) {
  for (const auto& f : foreign_functions()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::optional<Value> apply_ff(std::string_view name, std::span<const Value> args) {
  const auto* f = find_foreign_function(name);
  if (!f) return std::nullopt;
  return f->apply(args);
}

}  // namespace tagdl
