#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tagdl/dual.hpp"

namespace tagdl {

/// `pos(i)` or `neg(i)` over input variable i.
struct Literal {
  std::uint32_t var = 0;
  bool negated = false;

  static Literal pos(std::uint32_t v) { return {v, false}; }
  static Literal neg(std::uint32_t v) { return {v, true}; }
  Literal complement() const { return {var, !negated}; }

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Conjunction of literals, kept sorted and duplicate-free.
class Proof {
 public:
  Proof() = default;
  explicit Proof(std::vector<Literal> lits);

  const std::vector<Literal>& literals() const { return lits_; }
  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }

  friend bool operator==(const Proof&, const Proof&) = default;
  /// Canonical order: shorter proofs first, then lexicographic.
  friend std::strong_ordering operator<=>(const Proof& a, const Proof& b);

 private:
  std::vector<Literal> lits_;
};

/// Γ: probability of every input variable, plus optional mutual-exclusion
/// group ids used by the `-me` variant.
struct VariableMap {
  std::vector<double> probs;
  std::vector<std::optional<std::uint64_t>> exclusion;

  std::size_t size() const { return probs.size(); }
  std::optional<std::uint64_t> group_of(std::uint32_t v) const {
    return v < exclusion.size() ? exclusion[v] : std::nullopt;
  }
};

/// Parameters shared by the k-truncated boolean operations.
struct FormulaContext {
  const VariableMap* vars = nullptr;
  std::size_t k = 3;
  /// Reject proofs holding two positive literals of one exclusion group.
  bool mutual_exclusion = false;
  /// `k == 0` disables truncation entirely.
  bool truncate() const { return k != 0; }
};

/// Disjunction of proofs; canonical (sorted, deduplicated) at all times.
class DnfFormula {
 public:
  DnfFormula() = default;
  explicit DnfFormula(std::vector<Proof> proofs);

  /// `∅` (false)
  static DnfFormula falsum() { return {}; }
  /// `{∅}` (true)
  static DnfFormula verum() { return DnfFormula(std::vector<Proof>{Proof{}}); }
  static DnfFormula literal(Literal l) { return DnfFormula(std::vector<Proof>{Proof({l})}); }

  const std::vector<Proof>& proofs() const { return proofs_; }
  std::size_t size() const { return proofs_.size(); }
  bool is_false() const { return proofs_.empty(); }
  bool is_true() const { return !proofs_.empty() && proofs_.front().empty(); }

  friend bool operator==(const DnfFormula&, const DnfFormula&) = default;
  friend auto operator<=>(const DnfFormula& a, const DnfFormula& b) { return a.proofs_ <=> b.proofs_; }

 private:
  std::vector<Proof> proofs_;
};

/// `Pr(η) = ∏ Pr(ν)`; the empty proof has probability 1.
double proof_probability(const Proof& proof, const VariableMap& vars);

/// True when the proof is contradictory: some pos(i)/neg(i) pair, or in
/// mutual-exclusion mode two positive literals sharing a group.
bool has_conflict(const Proof& proof, const VariableMap& vars, bool mutual_exclusion);

/// Keeps the k most probable proofs; ties go to the canonically smaller proof.
DnfFormula top_k(const DnfFormula& f, const FormulaContext& ctx);
DnfFormula or_k(const DnfFormula& a, const DnfFormula& b, const FormulaContext& ctx);
DnfFormula and_k(const DnfFormula& a, const DnfFormula& b, const FormulaContext& ctx);
DnfFormula not_k(const DnfFormula& a, const FormulaContext& ctx);

/// Highest single-proof probability; 0 for the false formula.
double max_proof_probability(const DnfFormula& f, const VariableMap& vars);

/// Exact weighted model count of `f` with its gradient over all n inputs.
/// Variables sharing an exclusion group are counted as one categorical
/// choice when `mutual_exclusion` is set.
DualNumber wmc(const DnfFormula& f, const VariableMap& vars, bool mutual_exclusion = false);

std::string to_string(const Literal& l);
std::string to_string(const Proof& p);
/// `{pos(0), neg(1)} ∨ {pos(2)}`; `false` / `true` for the constants.
std::string to_string(const DnfFormula& f);
std::ostream& operator<<(std::ostream& os, const DnfFormula& f);

}  // namespace tagdl
