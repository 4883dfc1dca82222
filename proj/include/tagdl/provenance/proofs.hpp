#pragma once

#include <memory>
#include <span>
#include <string_view>

#include "tagdl/formula.hpp"
#include "tagdl/provenance/provenance.hpp"

namespace tagdl {

enum class ProofsMode { Probability, Differentiable, DifferentiableExclusive };

/// Top-k proofs family: tags are DNF formulas over input variables, recovered
/// through weighted model counting.
template <ProofsMode Mode>
class ProofsProvenance {
 public:
  using Tag = DnfFormula;
  using Output = std::conditional_t<Mode == ProofsMode::Probability, double, DualNumber>;
  static constexpr std::string_view kName = Mode == ProofsMode::Probability      ? "topkproofs"
                                            : Mode == ProofsMode::Differentiable ? "difftopkproofs"
                                                                                 : "difftopkproofsme";
  static constexpr bool kIdempotentAdd = true;
  static constexpr bool kDiscrete = false;
  static constexpr bool kMaxMin = false;
  static constexpr bool kExclusive = Mode == ProofsMode::DifferentiableExclusive;
  /// Tags denote boolean conditions on the inputs, so x ⊕ ¬x covers every
  /// world and quantifiers need no world enumeration.
  static constexpr bool kBooleanAlgebra = true;

  ProofsProvenance() : vars_(std::make_shared<VariableMap>()) { ctx_.vars = vars_.get(); }

  ProofsProvenance(const ProvenanceOptions& opts, std::span<const InputVariable> inputs)
      : vars_(std::make_shared<VariableMap>()) {
    for (const auto& in : inputs) {
      vars_->probs.push_back(in.prob);
      vars_->exclusion.push_back(kExclusive ? in.exclusion : std::nullopt);
    }
    ctx_.vars = vars_.get();
    ctx_.k = opts.k;
    ctx_.mutual_exclusion = kExclusive;
  }

  const VariableMap& variables() const { return *vars_; }
  const FormulaContext& context() const { return ctx_; }

  Tag zero() const { return DnfFormula::falsum(); }
  Tag one() const { return DnfFormula::verum(); }
  Tag add(const Tag& a, const Tag& b) const { return or_k(a, b, ctx_); }
  Tag mult(const Tag& a, const Tag& b) const { return and_k(a, b, ctx_); }
  std::optional<Tag> negate(const Tag& a) const { return not_k(a, ctx_); }
  bool saturated(const Tag& a, const Tag& b) const { return a == b; }
  /// The false formula can never become true again.
  bool discard(const Tag& a) const { return a.is_false(); }
  /// Probability of the best single proof; used to rank tuples for sampling.
  double weight(const Tag& a) const { return max_proof_probability(a, *vars_); }
  /// `{{pos(i)}}`
  Tag tag(const InputVariable&, std::size_t id) const {
    return DnfFormula::literal(Literal::pos(static_cast<std::uint32_t>(id)));
  }

  Output recover(const Tag& t) const {
    DualNumber d = wmc(t, *vars_, kExclusive);
    if constexpr (Mode == ProofsMode::Probability) {
      return d.prob;
    } else {
      return d;
    }
  }

  OutputTag output(const Tag& t) const {
    if constexpr (Mode == ProofsMode::Probability) {
      return {recover(t), std::nullopt};
    } else {
      DualNumber d = recover(t);
      return {d.prob, std::move(d.grad)};
    }
  }

 private:
  std::shared_ptr<VariableMap> vars_;
  FormulaContext ctx_;
};

using TopKProofs = ProofsProvenance<ProofsMode::Probability>;
using DiffTopKProofs = ProofsProvenance<ProofsMode::Differentiable>;
using DiffTopKProofsMe = ProofsProvenance<ProofsMode::DifferentiableExclusive>;

}  // namespace tagdl
