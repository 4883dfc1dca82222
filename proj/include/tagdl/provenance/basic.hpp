#pragma once

#include <algorithm>
#include <span>
#include <string_view>

#include "tagdl/provenance/provenance.hpp"

namespace tagdl {

struct UnitTag {
  friend bool operator==(UnitTag, UnitTag) { return true; }
  friend auto operator<=>(UnitTag, UnitTag) = default;
};

/// Classical untagged Datalog: one tag, negation removes tuples.
class UnitProvenance {
 public:
  using Tag = UnitTag;
  using Output = UnitTag;
  static constexpr std::string_view kName = "unit";
  static constexpr bool kIdempotentAdd = true;
  static constexpr bool kDiscrete = true;
  static constexpr bool kMaxMin = false;

  UnitProvenance() = default;
  UnitProvenance(const ProvenanceOptions&, std::span<const InputVariable>) {}

  Tag zero() const { return {}; }
  Tag one() const { return {}; }
  Tag add(const Tag&, const Tag&) const { return {}; }
  Tag mult(const Tag&, const Tag&) const { return {}; }
  std::optional<Tag> negate(const Tag&) const { return std::nullopt; }
  bool saturated(const Tag&, const Tag&) const { return true; }
  bool discard(const Tag&) const { return false; }
  double weight(const Tag&) const { return 1.0; }
  Tag tag(const InputVariable&, std::size_t) const { return {}; }
  Output recover(const Tag& t) const { return t; }
  OutputTag output(const Tag&) const { return {}; }
};

/// `([0,1], 0, 1, max, min, 1 - x, ==)`
class MinMaxProb {
 public:
  using Tag = double;
  using Output = double;
  static constexpr std::string_view kName = "minmaxprob";
  static constexpr bool kIdempotentAdd = true;
  static constexpr bool kDiscrete = false;
  static constexpr bool kMaxMin = true;

  MinMaxProb() = default;
  MinMaxProb(const ProvenanceOptions& opts, std::span<const InputVariable>) : eps_(opts.discard_eps) {}

  Tag zero() const { return 0.0; }
  Tag one() const { return 1.0; }
  Tag add(const Tag& a, const Tag& b) const { return std::max(a, b); }
  Tag mult(const Tag& a, const Tag& b) const { return std::min(a, b); }
  std::optional<Tag> negate(const Tag& a) const { return 1.0 - a; }
  bool saturated(const Tag& a, const Tag& b) const { return a == b; }
  bool discard(const Tag& a) const { return a < eps_; }
  double weight(const Tag& a) const { return a; }
  Tag tag(const InputVariable& in, std::size_t) const { return in.prob; }
  Output recover(const Tag& t) const { return t; }
  OutputTag output(const Tag& t) const { return {t, std::nullopt}; }

 private:
  double eps_ = 0.0;
};

/// Probability-only counterpart of diff-add-mult-prob: clamped sum and product.
class AddMultProb {
 public:
  using Tag = double;
  using Output = double;
  static constexpr std::string_view kName = "addmultprob";
  static constexpr bool kIdempotentAdd = false;
  static constexpr bool kDiscrete = false;
  static constexpr bool kMaxMin = false;

  AddMultProb() = default;
  AddMultProb(const ProvenanceOptions& opts, std::span<const InputVariable>) : eps_(opts.discard_eps) {}

  Tag zero() const { return 0.0; }
  Tag one() const { return 1.0; }
  Tag add(const Tag& a, const Tag& b) const { return std::clamp(a + b, 0.0, 1.0); }
  Tag mult(const Tag& a, const Tag& b) const { return a * b; }
  std::optional<Tag> negate(const Tag& a) const { return 1.0 - a; }
  bool saturated(const Tag&, const Tag&) const { return true; }
  bool discard(const Tag& a) const { return a < eps_; }
  double weight(const Tag& a) const { return a; }
  Tag tag(const InputVariable& in, std::size_t) const { return in.prob; }
  Output recover(const Tag& t) const { return t; }
  OutputTag output(const Tag& t) const { return {t, std::nullopt}; }

 private:
  double eps_ = 0.0;
};

}  // namespace tagdl
