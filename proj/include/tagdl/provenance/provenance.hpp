#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tagdl {

/// External input tag attached to an EDB fact. A missing probability means
/// the fact is untagged and enters the computation as 𝟙.
struct InputTag {
  std::optional<double> prob;
  std::optional<std::uint64_t> exclusion;

  static InputTag untagged() { return {}; }
  static InputTag probabilistic(double p) { return {p, std::nullopt}; }
  static InputTag exclusive(double p, std::uint64_t group) { return {p, group}; }
};

/// One probabilistic input of an evaluation, indexed by its variable id.
struct InputVariable {
  double prob = 1.0;
  std::optional<std::uint64_t> exclusion;
};

struct ProvenanceOptions {
  /// Proof bound for the top-k proofs provenances; 0 disables truncation.
  std::size_t k = 3;
  /// Probability-based provenances discard tags whose weight is below this.
  double discard_eps = 0.0;
};

/// Uniform external view of a recovered tag.
struct OutputTag {
  std::optional<double> prob;
  std::optional<std::vector<double>> grad;
};

/// The algebraic interface every provenance implements. `negate` returns
/// nullopt when the provenance cannot represent negation; a tuple whose tag
/// would need it is dropped instead (discrete semantics).
///
/// kIdempotentAdd: t ⊕ t = t, which makes semi-naive evaluation agree with
/// naive evaluation. kDiscrete: aggregation sees only the all-positive world.
/// kMaxMin: ⊕/⊗ are max/min on the weight, enabling the closed-form count.
template <class P>
concept Provenance = requires(const P& p, const typename P::Tag& t, const InputVariable& in, std::size_t id) {
  typename P::Tag;
  typename P::Output;
  { P::kName } -> std::convertible_to<std::string_view>;
  { P::kIdempotentAdd } -> std::convertible_to<bool>;
  { P::kDiscrete } -> std::convertible_to<bool>;
  { P::kMaxMin } -> std::convertible_to<bool>;
  { p.zero() } -> std::same_as<typename P::Tag>;
  { p.one() } -> std::same_as<typename P::Tag>;
  { p.add(t, t) } -> std::same_as<typename P::Tag>;
  { p.mult(t, t) } -> std::same_as<typename P::Tag>;
  { p.negate(t) } -> std::same_as<std::optional<typename P::Tag>>;
  { p.saturated(t, t) } -> std::same_as<bool>;
  { p.discard(t) } -> std::same_as<bool>;
  { p.weight(t) } -> std::same_as<double>;
  { p.tag(in, id) } -> std::same_as<typename P::Tag>;
  { p.recover(t) } -> std::same_as<typename P::Output>;
  { p.output(t) } -> std::same_as<OutputTag>;
};

}  // namespace tagdl
