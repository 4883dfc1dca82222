#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "tagdl/database.hpp"
#include "tagdl/ff.hpp"
#include "tagdl/value.hpp"

using namespace tagdl;

namespace {

Tuple tup(std::initializer_list<std::uint64_t> xs) {
  Tuple t;
  for (auto x : xs) t.push_back(Value::usize(x));
  return t;
}

Value random_value(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
    case 0: return Value::boolean(rng() & 1);
    case 1: return Value::i32(std::uniform_int_distribution<int>(-3, 3)(rng));
    case 2: return Value::usize(rng() % 4);
    case 3: return Value::f64(std::uniform_int_distribution<int>(-2, 2)(rng) * 0.5);
    case 4: return Value::character(U'a' + static_cast<char32_t>(rng() % 3));
    default: return Value::string(std::string(rng() % 3, 'x'));
  }
}

Tuple random_tuple(std::mt19937_64& rng) {
  Tuple t;
  const auto n = rng() % 3;
  for (std::size_t i = 0; i < n; ++i) t.push_back(random_value(rng));
  return t;
}

}  // namespace

TEST_CASE("contains ignores the tag") {
  TaggedTuples<double> s{{tup({1, 2}), 0.9}};
  CHECK(contains(s, tup({1, 2})));
  CHECK_FALSE(contains(s, tup({2, 1})));
  CHECK_FALSE(contains(TaggedTuples<double>{}, tup({1, 2})));
}

TEST_CASE("relation lookup") {
  Database<double> db;
  db.declare("father", RelationSignature{{ValueType::String, ValueType::String}});
  db.declare("p", RelationSignature{{ValueType::USize}});
  db.insert("father", Tuple{Value::string("Alice"), Value::string("Bob")}, 1.0);
  db.insert("p", tup({1}), 0.5);
  db.insert("p", tup({2}), 0.25);

  auto father = db.lookup("father");
  REQUIRE(father.size() == 1);
  CHECK(father[0].tuple == Tuple{Value::string("Alice"), Value::string("Bob")});
  CHECK(father[0].tag == 1.0);
  CHECK(db.lookup("missing").empty());
  CHECK(db.lookup("p").size() == 2);
}

TEST_CASE("database rejects tuples that do not conform and writes after sealing") {
  Database<double> db;
  db.declare("p", RelationSignature{{ValueType::USize}});
  CHECK_THROWS(db.insert("p", Tuple{Value::string("x")}, 1.0));
  db.seal();
  CHECK_THROWS_AS(db.insert("p", tup({1}), 1.0), SealedDatabaseError);
}

TEST_CASE("values compare by type before payload") {
  CHECK(Value::usize(1) != Value::u64(1));
  CHECK(Value::boolean(true) < Value::character(U'a'));
  CHECK(Value::character(U'z') < Value::i32(-5));
  CHECK(Value::usize(9) < Value::f64(0.0));
  CHECK(Value::f64(1e9) < Value::string(""));
  CHECK(Value::f64(-0.0) == Value::f64(0.0));
  CHECK(Value::f64(std::nan("")).is_nan());
  CHECK(has_nan(Tuple{Value::usize(1), Value::f64(std::nan(""))}));
}

TEST_CASE("property: tuple order is a strict total order") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3000; ++i) {
    const Tuple a = random_tuple(rng), b = random_tuple(rng), c = random_tuple(rng);
    const int lt = (a < b) + (b < a) + (a == b);
    CHECK(lt == 1);
    if (a < b && b < c) CHECK(a < c);
    if (a == b) CHECK(TupleHash{}(a) == TupleHash{}(b));
  }
}

TEST_CASE("property: database round-trips a fact set") {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 50; ++round) {
    Database<double> db;
    db.declare("r", RelationSignature{{ValueType::USize, ValueType::USize}});
    std::set<Tuple> inserted;
    for (int i = 0; i < 20; ++i) {
      Tuple u = tup({rng() % 5, rng() % 5});
      inserted.insert(u);
      db.insert("r", u, 1.0);
    }
    std::set<Tuple> back;
    for (const auto& tt : db.lookup("r")) back.insert(tt.tuple);
    CHECK(back == inserted);
    CHECK(db.size() == inserted.size());
  }
}

TEST_CASE("integer division by zero fails") {
  CHECK_FALSE(apply_binary(BinaryOp::Div, Value::usize(6), Value::usize(0)));
  CHECK_FALSE(apply_binary(BinaryOp::Mod, Value::i32(6), Value::i32(0)));
  CHECK(apply_binary(BinaryOp::Div, Value::usize(6), Value::usize(2)) == Value::usize(3));
}

TEST_CASE("float division by zero is infinite, not a failure") {
  auto r = apply_binary(BinaryOp::Div, Value::f64(1.0), Value::f64(0.0));
  REQUIRE(r);
  CHECK(std::isinf(r->as_float()));
}

TEST_CASE("checked integer overflow fails") {
  CHECK_FALSE(apply_binary(BinaryOp::Add, Value::i32(std::numeric_limits<std::int32_t>::max()), Value::i32(1)));
  CHECK_FALSE(apply_binary(BinaryOp::Sub, Value::usize(0), Value::usize(1)));
  CHECK_FALSE(apply_binary(BinaryOp::Mul, Value::u64(std::uint64_t{1} << 63), Value::u64(2)));
  CHECK_FALSE(apply_unary(UnaryOp::Neg, Value::i64(std::numeric_limits<std::int64_t>::min())));
}

TEST_CASE("string_concat joins its arguments") {
  std::vector<Value> args{Value::string("Alice"), Value::string(" "), Value::string("Lee")};
  CHECK(apply_ff("string_concat", args) == Value::string("Alice Lee"));
}

TEST_CASE("string_length counts code points") {
  std::vector<Value> args{Value::string("h\xC3\xA9llo")};
  CHECK(apply_ff("string_length", args) == Value::usize(5));
}

TEST_CASE("abs keeps the argument type") {
  std::vector<Value> args{Value::i32(-4)};
  CHECK(apply_ff("abs", args) == Value::i32(4));
  std::vector<Value> fargs{Value::f64(-1.5)};
  CHECK(apply_ff("abs", fargs) == Value::f64(1.5));
}

TEST_CASE("casts") {
  CHECK(cast_value(Value::i32(42), ValueType::String) == Value::string("42"));
  CHECK(cast_value(Value::f64(-2.7), ValueType::I32) == Value::i32(-2));
  CHECK_FALSE(cast_value(Value::f64(1e30), ValueType::I32));
  CHECK_FALSE(cast_value(Value::i32(-1), ValueType::USize));
  CHECK(cast_value(Value::string("17"), ValueType::U8) == Value::integer(ValueType::U8, 17));
  CHECK_FALSE(cast_value(Value::string("x17"), ValueType::U8));
}

TEST_CASE("hash is FNV-1a over the documented encoding") {
  // Independent FNV-1a: type byte for usize, then the value as 8 LE bytes.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto byte = [&](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  byte(static_cast<unsigned char>(ValueType::USize));
  const std::uint64_t v = 0x0102030405060708ULL;
  for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));

  std::vector<Value> args{Value::usize(v)};
  CHECK(apply_ff("hash", args) == Value::u64(h));
  std::vector<Value> other{Value::u64(v)};
  CHECK(apply_ff("hash", other) != Value::u64(h));
}

TEST_CASE("foreign functions never trap on bad input") {
  std::mt19937_64 rng(3);
  for (const auto& f : foreign_functions()) {
    for (int i = 0; i < 200; ++i) {
      std::vector<Value> args;
      const auto n = rng() % 4;
      for (std::size_t j = 0; j < n; ++j) args.push_back(random_value(rng));
      CHECK_NOTHROW((void)f.apply(args));
    }
  }
  CHECK_FALSE(apply_ff("no_such_function", {}));
}
