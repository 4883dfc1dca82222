#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include <omp.h>

#include "tagdl/database.hpp"
#include "tagdl/provenance/provenance.hpp"

namespace tagdl::kernels {

// Data-parallel probes behind product, join and antijoin. Each has a serial
// reference and an OpenMP version; the parallel one splits the left operand
// into contiguous chunks and concatenates the chunk outputs in order, so
// both produce identical sequences.

/// Below this many left tuples the parallel versions run serially.
inline constexpr std::size_t kParallelThreshold = 512;

namespace detail {

inline Tuple key_of(const Tuple& u, std::size_t key_len) { return Tuple(u.begin(), u.begin() + key_len); }

template <class Tag>
using KeyIndex = std::unordered_map<Tuple, std::vector<std::size_t>, TupleHash>;

template <class Tag>
KeyIndex<Tag> build_index(const TaggedTuples<Tag>& rows, std::size_t key_len) {
  KeyIndex<Tag> index;
  for (std::size_t i = 0; i < rows.size(); ++i) index[key_of(rows[i].tuple, key_len)].push_back(i);
  return index;
}

/// Runs `body(i, out)` for every left index, chunked across threads.
template <class Tag, class Body>
TaggedTuples<Tag> chunked(std::size_t n, Body body) {
  const int threads = omp_get_max_threads();
  if (n < kParallelThreshold || threads <= 1) {
    TaggedTuples<Tag> out;
    for (std::size_t i = 0; i < n; ++i) body(i, out);
    return out;
  }
  const std::size_t chunks = static_cast<std::size_t>(threads) * 4;
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<TaggedTuples<Tag>> parts(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * step;
    const std::size_t hi = std::min(n, lo + step);
    for (std::size_t i = lo; i < hi; ++i) body(i, parts[c]);
  }
  TaggedTuples<Tag> out;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

/// `(t₁ ⊗ t₂) :: (u₁, u₂)` for every pair.
template <Provenance P>
TaggedTuples<typename P::Tag> product_serial(const P& prov, const TaggedTuples<typename P::Tag>& a,
                                             const TaggedTuples<typename P::Tag>& b) {
  TaggedTuples<typename P::Tag> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      Tuple u = x.tuple;
      u.insert(u.end(), y.tuple.begin(), y.tuple.end());
      out.push_back({std::move(u), prov.mult(x.tag, y.tag)});
    }
  }
  return out;
}

template <Provenance P>
TaggedTuples<typename P::Tag> product_parallel(const P& prov, const TaggedTuples<typename P::Tag>& a,
                                               const TaggedTuples<typename P::Tag>& b) {
  using Tag = typename P::Tag;
  return detail::chunked<Tag>(a.size(), [&](std::size_t i, TaggedTuples<Tag>& out) {
    const auto& x = a[i];
    for (const auto& y : b) {
      Tuple u = x.tuple;
      u.insert(u.end(), y.tuple.begin(), y.tuple.end());
      out.push_back({std::move(u), prov.mult(x.tag, y.tag)});
    }
  });
}

/// `(t₁ ⊗ t₂) :: (u, u₁, u₂)` for `(u, u₁)` in a and `(u, u₂)` in b.
template <Provenance P>
TaggedTuples<typename P::Tag> join_serial(const P& prov, const TaggedTuples<typename P::Tag>& a,
                                          const TaggedTuples<typename P::Tag>& b, std::size_t key_len) {
  using Tag = typename P::Tag;
  TaggedTuples<Tag> out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (!std::equal(x.tuple.begin(), x.tuple.begin() + key_len, y.tuple.begin())) continue;
      Tuple u = x.tuple;
      u.insert(u.end(), y.tuple.begin() + key_len, y.tuple.end());
      out.push_back({std::move(u), prov.mult(x.tag, y.tag)});
    }
  }
  return out;
}

template <Provenance P>
TaggedTuples<typename P::Tag> join_parallel(const P& prov, const TaggedTuples<typename P::Tag>& a,
                                            const TaggedTuples<typename P::Tag>& b, std::size_t key_len) {
  using Tag = typename P::Tag;
  const auto index = detail::build_index<Tag>(b, key_len);
  return detail::chunked<Tag>(a.size(), [&](std::size_t i, TaggedTuples<Tag>& out) {
    const auto& x = a[i];
    auto it = index.find(detail::key_of(x.tuple, key_len));
    if (it == index.end()) return;
    for (std::size_t j : it->second) {
      const auto& y = b[j];
      Tuple u = x.tuple;
      u.insert(u.end(), y.tuple.begin() + key_len, y.tuple.end());
      out.push_back({std::move(u), prov.mult(x.tag, y.tag)});
    }
  });
}

/// Difference and antijoin against a normalized right side keyed by the
/// first `key_len` columns of the left tuples: absent keys pass through,
/// present keys yield `t₁ ⊗ (⊖ t₂)`, or drop the tuple when the provenance
/// has no negation.
template <Provenance P>
TaggedTuples<typename P::Tag> antijoin_serial(const P& prov, const TaggedTuples<typename P::Tag>& a,
                                              const Relation<typename P::Tag>& b, std::size_t key_len) {
  TaggedTuples<typename P::Tag> out;
  for (const auto& x : a) {
    auto it = b.find(detail::key_of(x.tuple, key_len));
    if (it == b.end()) {
      out.push_back(x);
    } else if (auto neg = prov.negate(it->second)) {
      out.push_back({x.tuple, prov.mult(x.tag, *neg)});
    }
  }
  return out;
}

template <Provenance P>
TaggedTuples<typename P::Tag> antijoin_parallel(const P& prov, const TaggedTuples<typename P::Tag>& a,
                                                const Relation<typename P::Tag>& b, std::size_t key_len) {
  using Tag = typename P::Tag;
  return detail::chunked<Tag>(a.size(), [&](std::size_t i, TaggedTuples<Tag>& out) {
    const auto& x = a[i];
    auto it = b.find(detail::key_of(x.tuple, key_len));
    if (it == b.end()) {
      out.push_back(x);
    } else if (auto neg = prov.negate(it->second)) {
      out.push_back({x.tuple, prov.mult(x.tag, *neg)});
    }
  });
}

/// One aggregate world: bit i of the mask selects the i-th uncertain tuple.
/// `emit(mask, tag, out)` appends the world's results. Masks are visited in
/// increasing order in both versions.
template <class Tag, class Emit>
TaggedTuples<Tag> worlds_serial(std::size_t n, Emit emit) {
  TaggedTuples<Tag> out;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t m = 0; m < count; ++m) emit(m, out);
  return out;
}

template <class Tag, class Emit>
TaggedTuples<Tag> worlds_parallel(std::size_t n, Emit emit) {
  return detail::chunked<Tag>(std::size_t{1} << n,
                              [&](std::size_t m, TaggedTuples<Tag>& out) { emit(std::uint64_t{m}, out); });
}

}  // namespace tagdl::kernels
