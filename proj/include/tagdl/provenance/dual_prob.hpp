#pragma once

#include <span>
#include <string_view>

#include "tagdl/dual.hpp"
#include "tagdl/provenance/provenance.hpp"

namespace tagdl {

/// Shared state of the dual-number provenances: the gradient dimension n.
class DualProvenanceBase {
 public:
  using Tag = DualNumber;
  using Output = DualNumber;

  DualProvenanceBase() = default;
  DualProvenanceBase(const ProvenanceOptions& opts, std::span<const InputVariable> inputs)
      : n_(inputs.size()), eps_(opts.discard_eps) {}

  std::size_t dim() const { return n_; }

  Tag zero() const { return DualNumber::constant(0.0, n_); }
  Tag one() const { return DualNumber::constant(1.0, n_); }
  std::optional<Tag> negate(const Tag& a) const { return dual_complement(a); }
  bool discard(const Tag& a) const { return a.prob < eps_; }
  double weight(const Tag& a) const { return a.prob; }
  /// `(r_i, ê_i)`
  Tag tag(const InputVariable& in, std::size_t id) const { return DualNumber::variable(in.prob, id, n_); }
  Output recover(const Tag& t) const { return t; }
  OutputTag output(const Tag& t) const { return {t.prob, t.grad}; }

 private:
  std::size_t n_ = 0;
  double eps_ = 0.0;
};

/// Dual numbers propagated with max / min; saturation looks at the
/// probability part only.
class DiffMinMaxProb : public DualProvenanceBase {
 public:
  static constexpr std::string_view kName = "diffminmaxprob";
  static constexpr bool kIdempotentAdd = true;
  static constexpr bool kDiscrete = false;
  static constexpr bool kMaxMin = true;

  using DualProvenanceBase::DualProvenanceBase;

  Tag add(const Tag& a, const Tag& b) const { return dual_max(a, b); }
  Tag mult(const Tag& a, const Tag& b) const { return dual_min(a, b); }
  bool saturated(const Tag& a, const Tag& b) const { return a.prob == b.prob; }
};

/// Dual numbers propagated with clamped sum and product; always saturated.
class DiffAddMultProb : public DualProvenanceBase {
 public:
  static constexpr std::string_view kName = "diffaddmultprob";
  static constexpr bool kIdempotentAdd = false;
  static constexpr bool kDiscrete = false;
  static constexpr bool kMaxMin = false;

  using DualProvenanceBase::DualProvenanceBase;

  Tag add(const Tag& a, const Tag& b) const { return dual_clamp(dual_add(a, b)); }
  Tag mult(const Tag& a, const Tag& b) const { return dual_mult(a, b); }
  bool saturated(const Tag&, const Tag&) const { return true; }
};

}  // namespace tagdl
