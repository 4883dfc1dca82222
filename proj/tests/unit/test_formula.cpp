#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "tagdl/formula.hpp"

using namespace tagdl;

namespace {

using L = Literal;

DnfFormula dnf(std::initializer_list<std::initializer_list<Literal>> proofs) {
  std::vector<Proof> ps;
  for (auto p : proofs) ps.emplace_back(std::vector<Literal>(p));
  return DnfFormula(std::move(ps));
}

VariableMap vars(std::vector<double> probs) { return {std::move(probs), {}}; }

bool satisfies(const DnfFormula& f, std::uint64_t assignment) {
  for (const auto& p : f.proofs()) {
    bool ok = true;
    for (const auto& l : p.literals()) {
      const bool v = (assignment >> l.var) & 1;
      if (v == l.negated) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

double enumerate(const DnfFormula& f, const std::vector<double>& r) {
  double total = 0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << r.size()); ++a) {
    if (!satisfies(f, a)) continue;
    double w = 1;
    for (std::size_t i = 0; i < r.size(); ++i) w *= (a >> i) & 1 ? r[i] : 1 - r[i];
    total += w;
  }
  return total;
}

DnfFormula random_dnf(std::mt19937_64& rng, std::uint32_t n, int max_proofs, bool allow_neg = true) {
  std::vector<Proof> proofs;
  const int count = std::uniform_int_distribution<int>(0, max_proofs)(rng);
  for (int i = 0; i < count; ++i) {
    std::vector<Literal> lits;
    const int len = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int j = 0; j < len; ++j) {
      const auto v = std::uniform_int_distribution<std::uint32_t>(0, n - 1)(rng);
      lits.push_back(allow_neg && (rng() % 3 == 0) ? L::neg(v) : L::pos(v));
    }
    proofs.emplace_back(std::move(lits));
  }
  return DnfFormula(std::move(proofs));
}

}  // namespace

TEST_CASE("proof probability") {
  CHECK(proof_probability(Proof({L::pos(0)}), vars({0.3})) == doctest::Approx(0.3));
  CHECK(proof_probability(Proof{}, vars({})) == 1.0);
  CHECK(proof_probability(Proof({L::pos(0), L::neg(1)}), vars({0.5, 0.2})) == doctest::Approx(0.5 * (1 - 0.2)));
}

TEST_CASE("or_k") {
  const auto g = vars({0.9, 0.5, 0.1});
  FormulaContext ctx{&g, 3, false};
  CHECK(or_k(dnf({{L::pos(0)}}), dnf({{L::pos(1)}}), ctx) == dnf({{L::pos(0)}, {L::pos(1)}}));
  const auto phi = dnf({{L::pos(0)}, {L::pos(1)}, {L::pos(2)}});
  CHECK(or_k(phi, DnfFormula::falsum(), ctx) == top_k(phi, ctx));
  FormulaContext two{&g, 2, false};
  CHECK(or_k(dnf({{L::pos(2)}, {L::pos(1)}}), dnf({{L::pos(0)}}), two) == dnf({{L::pos(0)}, {L::pos(1)}}));
}

TEST_CASE("and_k") {
  const auto g = vars({0.5, 0.5});
  FormulaContext ctx{&g, 3, false};
  CHECK(and_k(dnf({{L::pos(0)}}), dnf({{L::neg(0)}}), ctx).is_false());
  CHECK(and_k(dnf({{L::pos(0)}}), dnf({{L::pos(1)}}), ctx) == dnf({{L::pos(0), L::pos(1)}}));

  VariableMap me{{0.5, 0.5}, {7, 7}};
  FormulaContext exclusive{&me, 3, true};
  CHECK(and_k(dnf({{L::pos(0)}}), dnf({{L::pos(1)}}), exclusive).is_false());
  FormulaContext plain{&me, 3, false};
  CHECK_FALSE(and_k(dnf({{L::pos(0)}}), dnf({{L::pos(1)}}), plain).is_false());
}

TEST_CASE("not_k") {
  const auto g = vars({0.5, 0.5});
  FormulaContext ctx{&g, 8, false};
  CHECK(not_k(DnfFormula::falsum(), ctx).is_true());
  CHECK(not_k(dnf({{L::pos(0)}}), ctx) == dnf({{L::neg(0)}}));
  CHECK(not_k(dnf({{L::pos(0)}, {L::pos(1)}}), ctx) == dnf({{L::neg(0), L::neg(1)}}));
  CHECK(not_k(DnfFormula::verum(), ctx).is_false());
}

TEST_CASE("top_k") {
  const auto g = vars({0.9, 0.5, 0.5});
  FormulaContext three{&g, 3, false};
  FormulaContext one{&g, 1, false};
  CHECK(top_k(dnf({{L::pos(1)}}), three) == dnf({{L::pos(1)}}));
  CHECK(top_k(dnf({{L::pos(0)}, {L::pos(1)}}), one) == dnf({{L::pos(0)}}));
  CHECK(top_k(dnf({{L::pos(2)}, {L::pos(1)}}), one) == dnf({{L::pos(1)}}));
}

TEST_CASE("wmc examples") {
  const auto a = wmc(dnf({{L::pos(0)}}), vars({0.3}));
  CHECK(a.prob == doctest::Approx(0.3));
  CHECK(a.grad == std::vector<double>{1.0});

  const auto b = wmc(dnf({{L::pos(0)}, {L::pos(1)}}), vars({0.5, 0.5}));
  CHECK(b.prob == doctest::Approx(0.75));
  CHECK(b.grad[0] == doctest::Approx(0.5));
  CHECK(b.grad[1] == doctest::Approx(0.5));

  const auto f = wmc(DnfFormula::falsum(), vars({0.2, 0.4}));
  CHECK(f.prob == 0.0);
  CHECK(f.grad == std::vector<double>{0.0, 0.0});
  const auto t = wmc(DnfFormula::verum(), vars({0.2, 0.4}));
  CHECK(t.prob == 1.0);
  CHECK(t.grad == std::vector<double>{0.0, 0.0});
}

TEST_CASE("property: wmc equals assignment enumeration") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 12);
    std::vector<double> r;
    for (std::uint32_t j = 0; j < n; ++j) r.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    const auto f = random_dnf(rng, n, 6);
    CHECK(std::abs(wmc(f, vars(r)).prob - enumerate(f, r)) <= 1e-12);
  }
}

TEST_CASE("property: wmc gradient matches central differences") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 8);
    std::vector<double> r;
    for (std::uint32_t j = 0; j < n; ++j) r.push_back(std::uniform_real_distribution<double>(0.05, 0.95)(rng));
    const auto f = random_dnf(rng, n, 5);
    const auto d = wmc(f, vars(r));
    for (std::uint32_t j = 0; j < n; ++j) {
      auto up = r, down = r;
      up[j] += 1e-4;
      down[j] -= 1e-4;
      const double fd = (wmc(f, vars(up)).prob - wmc(f, vars(down)).prob) / 2e-4;
      CHECK(std::abs(fd - d.grad[j]) <= 1e-4);
    }
  }
}

TEST_CASE("property: exclusive wmc equals categorical enumeration") {
  // Groups {0,1,2} and {3,4}; variable 5 is independent. Each group picks at
  // most one member, or none with the residual probability.
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> r(6);
    auto split = [&](std::size_t from, std::size_t count) {
      double left = 1.0;
      for (std::size_t j = 0; j < count; ++j) {
        r[from + j] = std::uniform_real_distribution<double>(0, left)(rng);
        left -= r[from + j];
      }
    };
    split(0, 3);
    split(3, 2);
    r[5] = std::uniform_real_distribution<double>(0, 1)(rng);
    VariableMap me{r, {1, 1, 1, 2, 2, std::nullopt}};
    const auto f = random_dnf(rng, 6, 5);

    double expected = 0;
    for (int g1 = -1; g1 < 3; ++g1) {
      for (int g2 = -1; g2 < 2; ++g2) {
        for (int v5 = 0; v5 < 2; ++v5) {
          std::uint64_t a = 0;
          if (g1 >= 0) a |= std::uint64_t{1} << g1;
          if (g2 >= 0) a |= std::uint64_t{1} << (3 + g2);
          if (v5) a |= std::uint64_t{1} << 5;
          const double w1 = g1 >= 0 ? r[static_cast<std::size_t>(g1)] : 1 - r[0] - r[1] - r[2];
          const double w2 = g2 >= 0 ? r[3 + static_cast<std::size_t>(g2)] : 1 - r[3] - r[4];
          const double w5 = v5 ? r[5] : 1 - r[5];
          if (satisfies(f, a)) expected += std::max(0.0, w1) * std::max(0.0, w2) * w5;
        }
      }
    }
    CHECK(std::abs(wmc(f, me, true).prob - expected) <= 1e-12);
  }
}

TEST_CASE("property: negation complements the model set") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 4);
    const auto g = vars(std::vector<double>(n, 0.5));
    FormulaContext ctx{&g, 0, false};
    const auto f = random_dnf(rng, n, 4);
    const auto nf = not_k(f, ctx);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) CHECK(satisfies(nf, a) != satisfies(f, a));
  }
}

TEST_CASE("property: retained proofs grow with k") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> r;
    for (int j = 0; j < 6; ++j) r.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    const auto g = vars(r);
    const auto a = random_dnf(rng, 6, 5);
    const auto b = random_dnf(rng, 6, 5);
    for (std::size_t k = 1; k < 8; ++k) {
      FormulaContext lo{&g, k, false}, hi{&g, k + 1, false};
      for (auto op : {or_k, and_k}) {
        const auto small = op(a, b, lo), large = op(a, b, hi);
        std::set<Proof> big(large.proofs().begin(), large.proofs().end());
        for (const auto& p : small.proofs()) CHECK(big.count(p));
      }
    }
  }
}

TEST_CASE("property: canonical form is idempotent") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 300; ++i) {
    const auto f = random_dnf(rng, 5, 6);
    CHECK(DnfFormula(f.proofs()) == f);
    CHECK(std::is_sorted(f.proofs().begin(), f.proofs().end()));
    CHECK(std::adjacent_find(f.proofs().begin(), f.proofs().end()) == f.proofs().end());
  }
}

TEST_CASE("formula printing") {
  CHECK(to_string(dnf({{L::pos(0), L::neg(1)}, {L::pos(2)}})) == "{pos(2)} \xe2\x88\xa8 {pos(0), neg(1)}");
  CHECK(to_string(DnfFormula::falsum()) == "false");
  CHECK(to_string(DnfFormula::verum()) == "true");
}
