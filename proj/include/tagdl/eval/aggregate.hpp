#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tagdl/database.hpp"
#include "tagdl/error.hpp"
#include "tagdl/eval/kernels.hpp"
#include "tagdl/provenance/provenance.hpp"
#include "tagdl/ram.hpp"

namespace tagdl {

/// Applies an aggregator to one world, i.e. a set of untagged binding
/// tuples. Returns the result tuples (possibly none, e.g. max of nothing or
/// an overflowing sum).
std::vector<Tuple> apply_aggregator(const ram::Aggregator& g, std::span<const Tuple* const> world);

/// Picks indices of `weights` according to a sampler. Indices come back
/// sorted ascending. `rng_seed` fully determines random choices.
std::vector<std::size_t> apply_sampler(const ram::Sampler& s, std::span<const double> weights,
                                       std::uint64_t rng_seed);

/// Seed for one sampler invocation from the run seed, the sampler node and
/// the group key.
std::uint64_t sampler_seed(std::uint64_t run_seed, std::size_t node_id, const Tuple& group);

struct AggregateOptions {
  std::size_t world_cap = 16;
  bool parallel = true;
};

namespace detail {

template <class P>
concept BooleanTags = requires { P::kBooleanAlgebra; } && P::kBooleanAlgebra;

template <Provenance P>
bool is_certain(const P& prov, const typename P::Tag& t) {
  return t == prov.one();
}

template <Provenance P>
bool is_zero(const P& prov, const typename P::Tag& t) {
  return t == prov.zero();
}

/// Count results under a max/min provenance: the best world with exactly c
/// present tuples takes the c heaviest tags as present.
template <Provenance P>
TaggedTuples<typename P::Tag> maxmin_counts(const P& prov, const TaggedTuples<typename P::Tag>& uncertain) {
  using Tag = typename P::Tag;
  std::vector<std::size_t> order(uncertain.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prov.weight(uncertain[a].tag) < prov.weight(uncertain[b].tag);
  });
  const std::size_t n = order.size();
  // low[i]: ⊗ of ⊖t over the i lightest; high[i]: ⊗ of t over the i heaviest.
  std::vector<Tag> low{prov.one()};
  std::vector<Tag> high{prov.one()};
  for (std::size_t i = 0; i < n; ++i) {
    low.push_back(prov.mult(low.back(), *prov.negate(uncertain[order[i]].tag)));
    high.push_back(prov.mult(high.back(), uncertain[order[n - 1 - i]].tag));
  }
  TaggedTuples<Tag> out;
  for (std::size_t c = 0; c <= n; ++c) {
    Tag t = prov.mult(high[c], low[n - c]);
    out.push_back({Tuple{}, std::move(t)});
  }
  return out;
}

}  // namespace detail

/// World semantics of `γ_g` over one normalized group. Each world keeps a
/// subset of the uncertain tuples; certain tuples (tag 𝟙) are in every world
/// since their absence has tag 𝟘. Results tagged 𝟘 are not emitted.
template <Provenance P>
TaggedTuples<typename P::Tag> aggregate_worlds(const P& prov, const ram::Aggregator& g,
                                               const TaggedTuples<typename P::Tag>& input,
                                               const AggregateOptions& opts) {
  using Tag = typename P::Tag;
  using ram::AggregatorKind;
  TaggedTuples<Tag> out;

  if constexpr (P::kDiscrete) {
    if (input.empty() && g.skip_empty_world) return out;
    std::vector<const Tuple*> world;
    for (const auto& tt : input) world.push_back(&tt.tuple);
    for (auto& u : apply_aggregator(g, world)) out.push_back({std::move(u), prov.one()});
    return out;
  } else {
    std::vector<const Tuple*> certain;
    TaggedTuples<Tag> uncertain;
    for (const auto& tt : input) {
      if (detail::is_certain(prov, tt.tag)) {
        certain.push_back(&tt.tuple);
      } else {
        uncertain.push_back(tt);
      }
    }
    const bool quantifier = g.kind == AggregatorKind::Exists || g.kind == AggregatorKind::Forall;
    auto quantifier_result = [&](bool some, Tag t) {
      if (detail::is_zero(prov, t)) return;
      const bool value = g.kind == AggregatorKind::Exists ? some : !some;
      out.push_back({Tuple{Value::boolean(value)}, std::move(t)});
    };

    if constexpr (P::kMaxMin) {
      if (g.kind == AggregatorKind::Count || quantifier) {
        auto counts = detail::maxmin_counts(prov, uncertain);
        std::optional<Tag> some;
        for (std::size_t c = 0; c < counts.size(); ++c) {
          const std::size_t total = c + certain.size();
          if (total == 0 && g.skip_empty_world) continue;
          Tag& t = counts[c].tag;
          if (quantifier) {
            if (total == 0) {
              quantifier_result(false, t);
            } else {
              some = some ? prov.add(*some, t) : t;
            }
            continue;
          }
          if (detail::is_zero(prov, t)) continue;
          auto v = Value::integer(g.result_type, total);
          if (v) out.push_back({Tuple{*v}, std::move(t)});
        }
        if (some) quantifier_result(true, *some);
        return out;
      }
    }
    if constexpr (detail::BooleanTags<P>) {
      if (quantifier) {
        // Some tuple present is ⊕ of the tags; none present is ⊗ of ⊖.
        if (!certain.empty()) {
          quantifier_result(true, prov.one());
          return out;
        }
        if (!uncertain.empty()) {
          Tag some = prov.zero();
          for (const auto& tt : uncertain) some = prov.add(some, tt.tag);
          quantifier_result(true, some);
        }
        if (!g.skip_empty_world) {
          Tag none = prov.one();
          for (const auto& tt : uncertain) none = prov.mult(none, *prov.negate(tt.tag));
          quantifier_result(false, none);
        }
        return out;
      }
    }

    const std::size_t n = uncertain.size();
    if (n > opts.world_cap) {
      throw RuntimeError("aggregate " + std::string(ram::name(g.kind)) + " over " + std::to_string(n) +
                         " uncertain tuples exceeds the world cap of " + std::to_string(opts.world_cap));
    }
    std::vector<Tag> negated;
    negated.reserve(n);
    for (const auto& tt : uncertain) negated.push_back(*prov.negate(tt.tag));

    auto emit = [&](std::uint64_t mask, TaggedTuples<Tag>& sink) {
      if (mask == 0 && certain.empty() && g.skip_empty_world) return;
      Tag t = prov.one();
      std::vector<const Tuple*> world = certain;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) {
          t = prov.mult(t, uncertain[i].tag);
          world.push_back(&uncertain[i].tuple);
        } else {
          t = prov.mult(t, negated[i]);
        }
      }
      if (detail::is_zero(prov, t)) return;
      for (auto& u : apply_aggregator(g, world)) sink.push_back({std::move(u), t});
    };
    return opts.parallel ? kernels::worlds_parallel<Tag>(n, emit) : kernels::worlds_serial<Tag>(n, emit);
  }
}

}  // namespace tagdl
