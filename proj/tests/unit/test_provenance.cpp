#include <doctest.h>

#include <random>

#include "tagdl/dual.hpp"
#include "tagdl/provenance/basic.hpp"
#include "tagdl/provenance/dual_prob.hpp"
#include "tagdl/provenance/proofs.hpp"

using namespace tagdl;

namespace {

DualNumber dn(double p, std::vector<double> g) { return {p, std::move(g)}; }

std::vector<InputVariable> inputs(std::vector<double> probs) {
  std::vector<InputVariable> out;
  for (double p : probs) out.push_back({p, std::nullopt});
  return out;
}

template <Provenance P>
void check_interface_invariants(const P& prov) {
  CHECK(prov.saturated(prov.zero(), prov.zero()));
  CHECK(prov.saturated(prov.one(), prov.one()));
  CHECK_FALSE(prov.discard(prov.one()));
  if (auto n0 = prov.negate(prov.zero())) CHECK(prov.saturated(*n0, prov.one()));
  if (auto n1 = prov.negate(prov.one())) CHECK(prov.saturated(*n1, prov.zero()));
}

}  // namespace

TEST_CASE("dual number arithmetic") {
  CHECK(dual_add(dn(0.3, {1, 0}), dn(0.4, {0, 1})).prob == doctest::Approx(0.7));
  CHECK(dual_add(dn(0.3, {1, 0}), dn(0.4, {0, 1})).grad == std::vector<double>{1, 1});
  const auto x = dn(0.35, {0.5, -1});
  CHECK(dual_add(dn(0.0, {0, 0}), x) == x);
  CHECK(dual_add(dn(0.6, {1, 0}), dn(0.6, {0, 1})) == dn(1.2, {1, 1}));

  const auto m = dual_mult(dn(0.5, {1, 0}), dn(0.4, {0, 1}));
  CHECK(m.prob == doctest::Approx(0.2));
  CHECK(m.grad[0] == doctest::Approx(0.4));
  CHECK(m.grad[1] == doctest::Approx(0.5));
  CHECK(dual_mult(dn(1.0, {0, 0}), x) == x);
  const auto z = dual_mult(dn(0.0, {0, 0}), x);
  CHECK(z.prob == 0.0);
  CHECK(z.grad == std::vector<double>{0, 0});
}

TEST_CASE("dual min and max select an argument") {
  const auto a = dn(0.3, {1, 0}), b = dn(0.7, {0, 1});
  CHECK(dual_min(a, b) == a);
  CHECK(dual_max(a, b) == b);
  CHECK(dual_min(a, a) == a);
  const auto c = dn(0.3, {0, 5});
  CHECK(&dual_min(a, c) == &a);
  CHECK(&dual_max(a, c) == &a);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const auto p = dn(u(rng), {u(rng)}), q = dn(u(rng), {u(rng)});
    const auto* lo = &dual_min(p, q);
    const auto* hi = &dual_max(p, q);
    CHECK((lo == &p || lo == &q));
    CHECK((hi == &p || hi == &q));
  }
}

TEST_CASE("dual clamp keeps the derivative") {
  CHECK(dual_clamp(dn(1.2, {1, 1})) == dn(1.0, {1, 1}));
  CHECK(dual_clamp(dn(0.5, {1, 0})) == dn(0.5, {1, 0}));
  CHECK(dual_clamp(dn(-0.1, {1, 0})) == dn(0.0, {1, 0}));
}

TEST_CASE("tagging inputs") {
  const auto in = inputs({0.1, 0.2, 0.3, 0.9});
  const DiffTopKProofs dtkp({}, in);
  CHECK(dtkp.tag(in[3], 3) == DnfFormula::literal(Literal::pos(3)));
  const DiffMinMaxProb dmmp({}, inputs({0.9, 0.4}));
  CHECK(dmmp.tag({0.9, std::nullopt}, 0) == dn(0.9, {1, 0}));
  CHECK(dmmp.one() == dn(1.0, {0, 0}));
  CHECK(dtkp.one().is_true());
}

TEST_CASE("recovery") {
  const DiffTopKProofs dtkp({}, inputs({0.3}));
  const auto r = dtkp.recover(DnfFormula::literal(Literal::pos(0)));
  CHECK(r.prob == doctest::Approx(0.3));
  CHECK(r.grad == std::vector<double>{1.0});
  const auto f = dtkp.recover(DnfFormula::falsum());
  CHECK(f.prob == 0.0);
  CHECK(f.grad == std::vector<double>{0.0});
  CHECK(MinMaxProb().recover(0.8) == 0.8);
  const TopKProofs tkp({}, inputs({0.3}));
  CHECK(tkp.recover(DnfFormula::literal(Literal::pos(0))) == doctest::Approx(0.3));
  CHECK_FALSE(tkp.output(DnfFormula::verum()).grad);
}

TEST_CASE("weights") {
  CHECK(MinMaxProb().weight(0.7) == 0.7);
  CHECK(UnitProvenance().weight({}) == 1.0);
  const DiffTopKProofs dtkp({}, inputs({0.4, 0.5}));
  CHECK(dtkp.weight(DnfFormula::literal(Literal::pos(0))) == doctest::Approx(0.4));
  CHECK(dtkp.weight(DnfFormula(std::vector<Proof>{Proof({Literal::pos(0)}), Proof({Literal::pos(1)})})) ==
        doctest::Approx(0.5));
}

TEST_CASE("discarding") {
  const DiffTopKProofs dtkp({}, inputs({0.4}));
  CHECK(dtkp.discard(DnfFormula::falsum()));
  CHECK_FALSE(dtkp.discard(DnfFormula::literal(Literal::pos(0))));
  CHECK(MinMaxProb({3, 0.001}, {}).discard(0.0005));
  CHECK_FALSE(MinMaxProb({3, 0.0}, {}).discard(0.0005));
  CHECK_FALSE(AddMultProb({3, 0.0}, {}).discard(0.0));
}

TEST_CASE("interface invariants hold for every provenance") {
  const auto in = inputs({0.2, 0.7});
  check_interface_invariants(UnitProvenance({}, in));
  check_interface_invariants(MinMaxProb({}, in));
  check_interface_invariants(AddMultProb({}, in));
  check_interface_invariants(TopKProofs({}, in));
  check_interface_invariants(DiffMinMaxProb({}, in));
  check_interface_invariants(DiffAddMultProb({}, in));
  check_interface_invariants(DiffTopKProofs({}, in));
  check_interface_invariants(DiffTopKProofsMe({}, in));
  CHECK_FALSE(MinMaxProb().saturated(0.0, 1.0));
  CHECK_FALSE(DiffMinMaxProb({}, in).saturated(DiffMinMaxProb({}, in).zero(), DiffMinMaxProb({}, in).one()));
  CHECK_FALSE(DiffTopKProofs({}, in).saturated(DnfFormula::falsum(), DnfFormula::verum()));
}

TEST_CASE("diff-max-min saturation compares probabilities only") {
  const DiffMinMaxProb d({}, inputs({0.5, 0.5}));
  CHECK(d.saturated(dn(0.5, {1, 0}), dn(0.5, {0, 1})));
  CHECK_FALSE(d.saturated(dn(0.5, {1, 0}), dn(0.6, {1, 0})));
}

TEST_CASE("property: identities for every provenance") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0, 1);
  const auto in = inputs({0.3, 0.6, 0.8});
  const DiffMinMaxProb dmmp({}, in);
  const DiffAddMultProb damp({}, in);
  const DiffTopKProofs dtkp({0, 0.0}, in);
  for (int i = 0; i < 2000; ++i) {
    const auto x = dn(u(rng), {u(rng), u(rng), u(rng)});
    CHECK(dmmp.add(x, dmmp.zero()) == x);
    CHECK(dmmp.mult(x, dmmp.one()) == x);
    CHECK(dmmp.saturated(dmmp.mult(x, dmmp.zero()), dmmp.zero()));
    CHECK(damp.add(x, damp.zero()) == x);
    CHECK(damp.mult(x, damp.one()) == x);
    CHECK(damp.saturated(damp.mult(x, damp.zero()), damp.zero()));

    const auto v = static_cast<std::uint32_t>(rng() % 3);
    const auto f = dtkp.add(dtkp.tag(in[v], v), dtkp.mult(dtkp.tag(in[(v + 1) % 3], (v + 1) % 3),
                                                          *dtkp.negate(dtkp.tag(in[(v + 2) % 3], (v + 2) % 3))));
    CHECK(dtkp.add(f, dtkp.zero()) == f);
    CHECK(dtkp.mult(f, dtkp.one()) == f);
    CHECK(dtkp.mult(f, dtkp.zero()) == dtkp.zero());
  }
}

TEST_CASE("unit provenance cannot negate") { CHECK_FALSE(UnitProvenance().negate({})); }

TEST_CASE("min-max negation is the complement") {
  CHECK(*MinMaxProb().negate(0.2) == doctest::Approx(0.8));
  const DiffMinMaxProb d({}, inputs({0.2}));
  const auto n = *d.negate(dn(0.2, {1}));
  CHECK(n.prob == doctest::Approx(0.8));
  CHECK(n.grad == std::vector<double>{-1});
}
