#include "tagdl/value.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace tagdl {

namespace {

constexpr std::array<std::string_view, kValueTypeCount> kTypeNames = {
    "bool", "char", "i8", "i16", "i32", "i64", "isize", "u8",
    "u16",  "u32",  "u64", "usize", "f32", "f64", "String",
};

}  // namespace

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

namespace {

void append_escaped(std::string& out, char32_t c, char quote) {
  switch (c) {
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    case '\r': out += "\\r"; break;
    case '\\': out += "\\\\"; break;
    default:
      if (c == static_cast<char32_t>(quote)) {
        out.push_back('\\');
        out.push_back(quote);
      } else {
        append_utf8(out, c);
      }
  }
}

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string to_string(TypeSet set) {
  std::string out;
  for (std::size_t i = 0; i < kValueTypeCount; ++i) {
    if (set & type_bit(static_cast<ValueType>(i))) {
      if (!out.empty()) out += " | ";
      out += kTypeNames[i];
    }
  }
  return out.empty() ? "<none>" : out;
}

std::string_view type_name(ValueType t) { return kTypeNames[static_cast<std::size_t>(t)]; }

std::optional<ValueType> parse_type_name(std::string_view name) {
  for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
    if (kTypeNames[i] == name) return static_cast<ValueType>(i);
  }
  return std::nullopt;
}

__int128 int_min(ValueType t) {
  switch (t) {
    case ValueType::I8: return std::numeric_limits<std::int8_t>::min();
    case ValueType::I16: return std::numeric_limits<std::int16_t>::min();
    case ValueType::I32: return std::numeric_limits<std::int32_t>::min();
    case ValueType::I64:
    case ValueType::ISize: return std::numeric_limits<std::int64_t>::min();
    default: return 0;
  }
}

__int128 int_max(ValueType t) {
  switch (t) {
    case ValueType::I8: return std::numeric_limits<std::int8_t>::max();
    case ValueType::I16: return std::numeric_limits<std::int16_t>::max();
    case ValueType::I32: return std::numeric_limits<std::int32_t>::max();
    case ValueType::I64:
    case ValueType::ISize: return std::numeric_limits<std::int64_t>::max();
    case ValueType::U8: return std::numeric_limits<std::uint8_t>::max();
    case ValueType::U16: return std::numeric_limits<std::uint16_t>::max();
    case ValueType::U32: return std::numeric_limits<std::uint32_t>::max();
    case ValueType::U64:
    case ValueType::USize: return std::numeric_limits<std::uint64_t>::max();
    default: return 0;
  }
}

std::optional<Value> Value::integer(ValueType t, __int128 v) {
  if (!is_integer(t) || v < int_min(t) || v > int_max(t)) return std::nullopt;
  if (is_signed_int(t)) return Value(t, static_cast<std::int64_t>(v));
  return Value(t, static_cast<std::uint64_t>(v));
}

Value Value::floating(ValueType t, double d) {
  if (t == ValueType::F32) return Value(t, static_cast<double>(static_cast<float>(d)));
  return Value(ValueType::F64, d);
}

__int128 Value::as_wide_int() const {
  if (is_signed_int(type_)) return as_signed();
  return as_unsigned();
}

bool Value::is_nan() const { return is_float(type_) && std::isnan(as_float()); }

bool operator==(const Value& a, const Value& b) {
  if (a.type_ != b.type_) return false;
  if (is_float(a.type_)) return a.as_float() == b.as_float();
  return a.data_ == b.data_;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.type_ != b.type_) return a.type_ <=> b.type_;
  switch (a.data_.index()) {
    case 0: return a.as_bool() <=> b.as_bool();
    case 1: return a.as_char() <=> b.as_char();
    case 2: return a.as_signed() <=> b.as_signed();
    case 3: return a.as_unsigned() <=> b.as_unsigned();
    case 4: {
      // NaN never reaches a database; -0.0 and +0.0 compare equal.
      const double x = a.as_float();
      const double y = b.as_float();
      if (x < y) return std::strong_ordering::less;
      if (y < x) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    default: {
      const int c = a.as_string().compare(b.as_string());
      return c < 0 ? std::strong_ordering::less
                   : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
  }
}

std::size_t Value::hash() const {
  std::size_t h = static_cast<std::size_t>(type_);
  switch (data_.index()) {
    case 0: return mix(h, as_bool());
    case 1: return mix(h, as_char());
    case 2: return mix(h, std::hash<std::int64_t>{}(as_signed()));
    case 3: return mix(h, std::hash<std::uint64_t>{}(as_unsigned()));
    case 4: {
      double d = as_float();
      if (d == 0.0) d = 0.0;
      return mix(h, std::hash<double>{}(d));
    }
    default: return mix(h, std::hash<std::string>{}(as_string()));
  }
}

std::string to_string(const Value& v) {
  switch (v.type()) {
    case ValueType::Bool: return v.as_bool() ? "true" : "false";
    case ValueType::Char: {
      std::string out = "'";
      append_escaped(out, v.as_char(), '\'');
      out.push_back('\'');
      return out;
    }
    case ValueType::String: {
      std::string out = "\"";
      for (unsigned char c : v.as_string()) {
        if (c == '"' || c == '\\' || c == '\n' || c == '\t' || c == '\r') {
          append_escaped(out, c, '"');
        } else {
          out.push_back(static_cast<char>(c));
        }
      }
      out.push_back('"');
      return out;
    }
    case ValueType::F32:
    case ValueType::F64: {
      const double d = v.as_float();
      if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
      std::array<char, 64> buf{};
      auto res = v.type() == ValueType::F32
                     ? std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<float>(d))
                     : std::to_chars(buf.data(), buf.data() + buf.size(), d);
      std::string s(buf.data(), res.ptr);
      if (s.find_first_of(".en") == std::string::npos) s += ".0";
      return s;
    }
    default:
      if (is_signed_int(v.type())) return std::to_string(v.as_signed());
      return std::to_string(v.as_unsigned());
  }
}

std::ostream& operator<<(std::ostream& os, const Value& v) { return os << to_string(v); }

std::string to_string(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += to_string(t[i]);
  }
  out += ")";
  return out;
}

bool has_nan(const Tuple& t) {
  for (const auto& v : t) {
    if (v.is_nan()) return true;
  }
  return false;
}

std::size_t TupleHash::operator()(const Tuple& t) const {
  std::size_t h = t.size();
  for (const auto& v : t) h = mix(h, v.hash());
  return h;
}

bool RelationSignature::conforms(const Tuple& t) const {
  if (t.size() != columns.size()) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].type() != columns[i]) return false;
  }
  return true;
}

}  // namespace tagdl
