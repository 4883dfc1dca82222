#include "tagdl/formula.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace tagdl {

Proof::Proof(std::vector<Literal> lits) : lits_(std::move(lits)) {
  std::sort(lits_.begin(), lits_.end());
  lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
}

std::strong_ordering operator<=>(const Proof& a, const Proof& b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  return a.lits_ <=> b.lits_;
}

DnfFormula::DnfFormula(std::vector<Proof> proofs) : proofs_(std::move(proofs)) {
  std::sort(proofs_.begin(), proofs_.end());
  proofs_.erase(std::unique(proofs_.begin(), proofs_.end()), proofs_.end());
}

double proof_probability(const Proof& proof, const VariableMap& vars) {
  double p = 1.0;
  for (const auto& l : proof.literals()) {
    const double r = vars.probs.at(l.var);
    p *= l.negated ? 1.0 - r : r;
  }
  return p;
}

bool has_conflict(const Proof& proof, const VariableMap& vars, bool mutual_exclusion) {
  const auto& lits = proof.literals();
  // Literals are sorted by (var, sign), so a pos/neg pair is adjacent.
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (lits[i].var == lits[i - 1].var) return true;
  }
  if (!mutual_exclusion) return false;
  std::vector<std::uint64_t> groups;
  for (const auto& l : lits) {
    if (l.negated) continue;
    if (auto g = vars.group_of(l.var)) groups.push_back(*g);
  }
  std::sort(groups.begin(), groups.end());
  return std::adjacent_find(groups.begin(), groups.end()) != groups.end();
}

namespace {

std::vector<Literal> merge_literals(const Proof& a, const Proof& b) {
  std::vector<Literal> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.literals().begin(), a.literals().end(), b.literals().begin(), b.literals().end(),
                 std::back_inserter(out));
  return out;
}

std::vector<Proof> truncate(std::vector<Proof> proofs, const FormulaContext& ctx) {
  std::sort(proofs.begin(), proofs.end());
  proofs.erase(std::unique(proofs.begin(), proofs.end()), proofs.end());
  if (!ctx.truncate() || proofs.size() <= ctx.k) return proofs;
  std::vector<double> probs(proofs.size());
  for (std::size_t i = 0; i < proofs.size(); ++i) probs[i] = proof_probability(proofs[i], *ctx.vars);
  std::vector<std::size_t> order(proofs.size());
  std::iota(order.begin(), order.end(), 0);
  // Proofs are already in canonical order, so a stable sort breaks ties by it.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return probs[x] > probs[y]; });
  order.resize(ctx.k);
  std::sort(order.begin(), order.end());
  std::vector<Proof> kept;
  kept.reserve(ctx.k);
  for (auto i : order) kept.push_back(std::move(proofs[i]));
  return kept;
}

}  // namespace

DnfFormula top_k(const DnfFormula& f, const FormulaContext& ctx) { return DnfFormula(truncate(f.proofs(), ctx)); }

DnfFormula or_k(const DnfFormula& a, const DnfFormula& b, const FormulaContext& ctx) {
  std::vector<Proof> all = a.proofs();
  all.insert(all.end(), b.proofs().begin(), b.proofs().end());
  return DnfFormula(truncate(std::move(all), ctx));
}

DnfFormula and_k(const DnfFormula& a, const DnfFormula& b, const FormulaContext& ctx) {
  std::vector<Proof> out;
  out.reserve(a.size() * b.size());
  for (const auto& pa : a.proofs()) {
    for (const auto& pb : b.proofs()) {
      Proof merged(merge_literals(pa, pb));
      if (!has_conflict(merged, *ctx.vars, ctx.mutual_exclusion)) out.push_back(std::move(merged));
    }
  }
  return DnfFormula(truncate(std::move(out), ctx));
}

DnfFormula not_k(const DnfFormula& a, const FormulaContext& ctx) {
  // ¬(η₁ ∨ … ∨ ηₘ) is the CNF ∧ⱼ ∨_{ν∈ηⱼ} ¬ν; distribute it one clause at a time.
  std::vector<Proof> current{Proof{}};
  for (const auto& proof : a.proofs()) {
    if (proof.empty()) return DnfFormula::falsum();
    std::vector<Proof> next;
    for (const auto& partial : current) {
      const auto& have = partial.literals();
      const bool satisfied = std::any_of(proof.literals().begin(), proof.literals().end(), [&](const Literal& l) {
        return std::binary_search(have.begin(), have.end(), l.complement());
      });
      if (satisfied) {
        // Any extension of `partial` would be subsumed by it.
        next.push_back(partial);
        continue;
      }
      for (const auto& l : proof.literals()) {
        std::vector<Literal> lits = have;
        lits.push_back(l.complement());
        Proof extended(std::move(lits));
        if (!has_conflict(extended, *ctx.vars, ctx.mutual_exclusion)) next.push_back(std::move(extended));
      }
    }
    current = truncate(std::move(next), ctx);
    if (current.empty()) break;
  }
  return DnfFormula(std::move(current));
}

double max_proof_probability(const DnfFormula& f, const VariableMap& vars) {
  double best = 0.0;
  for (const auto& p : f.proofs()) best = std::max(best, proof_probability(p, vars));
  return best;
}

std::string to_string(const Literal& l) {
  return (l.negated ? "neg(" : "pos(") + std::to_string(l.var) + ")";
}

std::string to_string(const Proof& p) {
  std::string out = "{";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += to_string(p.literals()[i]);
  }
  return out + "}";
}

std::string to_string(const DnfFormula& f) {
  if (f.is_false()) return "false";
  if (f.is_true()) return "true";
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += " ∨ ";
    out += to_string(f.proofs()[i]);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const DnfFormula& f) { return os << to_string(f); }

}  // namespace tagdl
