#include "tagdl/eval/aggregate.hpp"

#include <random>

namespace tagdl {

namespace {

using ram::AggregatorKind;

std::optional<Value> identity_of(ValueType t, int unit) {
  if (is_integer(t)) return Value::integer(t, unit);
  if (is_float(t)) return Value::floating(t, unit);
  return std::nullopt;
}

std::vector<Tuple> fold(const ram::Aggregator& g, std::span<const Tuple* const> world, BinaryOp op, int unit) {
  auto acc = identity_of(g.result_type, unit);
  if (!acc) return {};
  for (const Tuple* u : world) {
    acc = apply_binary(op, *acc, u->back());
    if (!acc) return {};
  }
  return {Tuple{*acc}};
}

std::vector<Tuple> extremum(const ram::Aggregator& g, std::span<const Tuple* const> world, bool minimum) {
  if (world.empty()) return {};
  const Value* best = &world.front()->back();
  for (const Tuple* u : world) {
    const Value& v = u->back();
    if (minimum ? v < *best : v > *best) best = &v;
  }
  if (g.kind == AggregatorKind::Min || g.kind == AggregatorKind::Max) return {Tuple{*best}};
  std::vector<Tuple> out;
  for (const Tuple* u : world) {
    if (u->back() != *best) continue;
    Tuple r(u->begin(), u->begin() + std::min(g.arg_count, u->size() - 1));
    r.push_back(u->back());
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(unit_interval(rng) * static_cast<double>(n)));
}

}  // namespace

std::vector<Tuple> apply_aggregator(const ram::Aggregator& g, std::span<const Tuple* const> world) {
  switch (g.kind) {
    case AggregatorKind::Count: {
      auto v = Value::integer(g.result_type, world.size());
      if (!v) return {};
      return {Tuple{*v}};
    }
    case AggregatorKind::Sum: return fold(g, world, BinaryOp::Add, 0);
    case AggregatorKind::Prod: return fold(g, world, BinaryOp::Mul, 1);
    case AggregatorKind::Min:
    case AggregatorKind::Argmin: return extremum(g, world, true);
    case AggregatorKind::Max:
    case AggregatorKind::Argmax: return extremum(g, world, false);
    case AggregatorKind::Exists: return {Tuple{Value::boolean(!world.empty())}};
    case AggregatorKind::Forall: return {Tuple{Value::boolean(world.empty())}};
  }
  return {};
}

std::uint64_t sampler_seed(std::uint64_t run_seed, std::size_t node_id, const Tuple& group) {
  std::vector<Value> parts{Value::u64(run_seed), Value::u64(node_id)};
  parts.insert(parts.end(), group.begin(), group.end());
  return stable_hash(parts);
}

std::vector<std::size_t> apply_sampler(const ram::Sampler& s, std::span<const double> weights,
                                       std::uint64_t rng_seed) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> chosen;
  if (n == 0 || s.k == 0) return chosen;
  if (s.kind == ram::SamplerKind::Top) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    order.resize(std::min(n, s.k));
    std::sort(order.begin(), order.end());
    return order;
  }

  std::mt19937_64 rng(rng_seed);
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  std::vector<bool> picked(n, false);
  if (s.kind == ram::SamplerKind::Categorical && total > 0.0) {
    for (std::size_t draw = 0; draw < s.k; ++draw) {
      const double r = unit_interval(rng) * total;
      double acc = 0.0;
      std::size_t pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += std::max(weights[i], 0.0);
        if (r < acc) {
          pick = i;
          break;
        }
      }
      picked[pick] = true;
    }
  } else if (s.kind == ram::SamplerKind::Categorical) {
    // All weights zero: fall back to uniform draws with replacement.
    for (std::size_t draw = 0; draw < s.k; ++draw) picked[below(rng, n)] = true;
  } else {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t draw = 0; draw < std::min(n, s.k); ++draw) {
      const std::size_t j = draw + below(rng, n - draw);
      std::swap(pool[draw], pool[j]);
      picked[pool[draw]] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (picked[i]) chosen.push_back(i);
  }
  return chosen;
}

}  // namespace tagdl
