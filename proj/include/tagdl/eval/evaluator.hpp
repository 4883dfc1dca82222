#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tagdl/database.hpp"
#include "tagdl/error.hpp"
#include "tagdl/eval/aggregate.hpp"
#include "tagdl/eval/kernels.hpp"
#include "tagdl/provenance/provenance.hpp"
#include "tagdl/ram.hpp"

namespace tagdl {

struct EvalOptions {
  /// Per stratum; exceeding it aborts the run.
  std::size_t iteration_limit = std::size_t{1} << 20;
  /// Largest number of uncertain tuples an aggregate may enumerate worlds over.
  std::size_t world_cap = 16;
  std::uint64_t seed = 0;
  /// Recompute every rule over the whole database each iteration, even when
  /// the provenance allows incremental evaluation.
  bool naive = false;
  bool parallel = true;
};

struct EvalStats {
  /// Rule applications until saturation, per stratum.
  std::vector<std::size_t> iterations;
  /// Tuples dropped because a foreign function failed or produced NaN.
  std::size_t ff_failures = 0;
};

/// Runs a RAM program over a tagged database under provenance P.
///
/// With an idempotent ⊕ the fixpoint is incremental: after the first round
/// each rule is re-evaluated once per occurrence of a same-stratum predicate,
/// with that occurrence reading only the facts whose tag changed (failed ⊜)
/// in the previous round. Otherwise, or when `naive` is set, every round
/// recomputes all rules and stops at the first state that saturates.
template <Provenance P>
class Evaluator {
 public:
  using Tag = typename P::Tag;
  using Db = Database<Tag>;
  using Observer = std::function<void(std::size_t stratum, std::size_t iteration, const Db& db)>;

  Evaluator(const ram::Program& program, const P& prov, EvalOptions opts = {})
      : program_(program), prov_(prov), opts_(opts) {}

  bool incremental() const { return P::kIdempotentAdd && !opts_.naive; }

  /// Called after every round, including the final one that saturates.
  void set_observer(Observer obs) { observer_ = std::move(obs); }

  const EvalStats& stats() const { return stats_; }

  /// `⟦s_n⟧ ∘ ⋯ ∘ ⟦s_1⟧`
  void run(Db& db) {
    stats_.iterations.assign(program_.strata.size(), 0);
    for (std::size_t i = 0; i < program_.strata.size(); ++i) run_stratum(i, db);
  }

  void run_stratum(std::size_t index, Db& db) {
    if (stats_.iterations.size() <= index) stats_.iterations.resize(index + 1, 0);
    const auto& stratum = program_.strata.at(index);
    if (stratum.rules.empty()) return;
    if (incremental()) {
      run_incremental(index, db);
    } else {
      run_naive(index, db);
    }
  }

  /// `⟦e⟧(F)` as a multiset; callers normalize.
  TaggedTuples<Tag> eval(const ram::Expr& e, const Db& db) { return eval_impl(e, db, nullptr); }

  /// `⟨U⟩`: merges duplicates with ⊕ in order of appearance, drops discarded
  /// tags, and returns tuples in canonical order.
  TaggedTuples<Tag> normalize(const TaggedTuples<Tag>& tuples) const {
    TaggedTuples<Tag> out;
    for (auto& [u, t] : normalize_to_relation(tuples)) out.push_back({u, t});
    return out;
  }

  Relation<Tag> normalize_to_relation(const TaggedTuples<Tag>& tuples) const {
    Relation<Tag> merged;
    for (const auto& tt : tuples) {
      auto [it, fresh] = merged.try_emplace(tt.tuple, tt.tag);
      if (!fresh) it->second = prov_.add(it->second, tt.tag);
    }
    std::erase_if(merged, [&](const auto& kv) { return prov_.discard(kv.second); });
    return merged;
  }

 private:
  using RelationMap = std::map<std::string, Relation<Tag>>;

  /// Reads of one predicate occurrence (by node id) are redirected to `rels`.
  struct Delta {
    std::size_t node;
    const RelationMap* rels;
  };

  void bump_iteration(std::size_t index) {
    if (++stats_.iterations[index] > opts_.iteration_limit) {
      throw RuntimeError("stratum " + std::to_string(index) + " did not saturate within the iteration limit of " +
                         std::to_string(opts_.iteration_limit));
    }
  }

  void run_naive(std::size_t index, Db& db) {
    const auto& rules = program_.strata[index].rules;
    while (true) {
      bump_iteration(index);
      std::vector<Relation<Tag>> next;
      next.reserve(rules.size());
      for (const auto& r : rules) {
        Relation<Tag> merged = db.relation(r.head);
        for (auto& [u, t] : normalize_to_relation(eval(*r.body, db))) {
          auto [it, fresh] = merged.try_emplace(u, t);
          if (!fresh) it->second = prov_.add(it->second, t);
        }
        next.push_back(std::move(merged));
      }
      bool saturated = true;
      for (std::size_t i = 0; i < rules.size() && saturated; ++i) {
        const auto& old = db.relation(rules[i].head);
        for (const auto& [u, t] : next[i]) {
          auto it = old.find(u);
          if (it == old.end() || !prov_.saturated(it->second, t)) {
            saturated = false;
            break;
          }
        }
      }
      if (!saturated) {
        for (std::size_t i = 0; i < rules.size(); ++i) db.mutable_relation(rules[i].head) = std::move(next[i]);
      }
      if (observer_) observer_(index, stats_.iterations[index], db);
      if (saturated) return;
    }
  }

  void run_incremental(std::size_t index, Db& db) {
    const auto& stratum = program_.strata[index];
    std::set<std::string> heads;
    for (const auto& r : stratum.rules) heads.insert(r.head);
    std::vector<std::vector<std::size_t>> occurrences;
    for (const auto& r : stratum.rules) {
      std::vector<std::size_t> ids;
      collect_occurrences(*r.body, heads, ids);
      occurrences.push_back(std::move(ids));
    }

    RelationMap delta;
    for (bool first = true;; first = false) {
      bump_iteration(index);
      std::vector<Relation<Tag>> derived;
      derived.reserve(stratum.rules.size());
      for (std::size_t i = 0; i < stratum.rules.size(); ++i) {
        const auto& body = *stratum.rules[i].body;
        TaggedTuples<Tag> tuples;
        if (first) {
          tuples = eval(body, db);
        } else {
          for (std::size_t node : occurrences[i]) {
            Delta d{node, &delta};
            auto part = eval_impl(body, db, &d);
            std::move(part.begin(), part.end(), std::back_inserter(tuples));
          }
        }
        derived.push_back(normalize_to_relation(tuples));
      }
      RelationMap next_delta;
      for (std::size_t i = 0; i < stratum.rules.size(); ++i) {
        const std::string& head = stratum.rules[i].head;
        auto& rel = db.mutable_relation(head);
        for (auto& [u, t] : derived[i]) {
          auto it = rel.find(u);
          if (it == rel.end()) {
            rel.emplace(u, t);
            next_delta[head].emplace(u, t);
            continue;
          }
          Tag merged = prov_.add(it->second, t);
          if (!prov_.saturated(it->second, merged)) {
            it->second = merged;
            next_delta[head].insert_or_assign(u, std::move(merged));
          }
        }
      }
      if (observer_) observer_(index, stats_.iterations[index], db);
      if (next_delta.empty()) return;
      delta = std::move(next_delta);
    }
  }

  static void collect_occurrences(const ram::Expr& e, const std::set<std::string>& heads,
                                  std::vector<std::size_t>& out) {
    if (e.kind == ram::ExprKind::Predicate && heads.count(e.predicate)) out.push_back(e.id);
    for (const auto& c : e.children) collect_occurrences(*c, heads, out);
  }

  TaggedTuples<Tag> lookup(const ram::Expr& e, const Db& db, const Delta* delta) const {
    if (delta && delta->node == e.id) {
      TaggedTuples<Tag> out;
      auto it = delta->rels->find(e.predicate);
      if (it != delta->rels->end()) {
        for (const auto& [u, t] : it->second) out.push_back({u, t});
      }
      return out;
    }
    return db.lookup(e.predicate);
  }

  /// Splits normalized body tuples by their key prefix.
  static std::map<Tuple, TaggedTuples<Tag>> partition(const TaggedTuples<Tag>& body, std::size_t key_len) {
    std::map<Tuple, TaggedTuples<Tag>> groups;
    for (const auto& tt : body) {
      Tuple key(tt.tuple.begin(), tt.tuple.begin() + key_len);
      groups[std::move(key)].push_back({Tuple(tt.tuple.begin() + key_len, tt.tuple.end()), tt.tag});
    }
    return groups;
  }

  TaggedTuples<Tag> sample(const ram::Expr& e, const TaggedTuples<Tag>& input, const Tuple& group) const {
    std::vector<double> weights;
    weights.reserve(input.size());
    for (const auto& tt : input) weights.push_back(prov_.weight(tt.tag));
    TaggedTuples<Tag> out;
    for (std::size_t i : apply_sampler(e.sampler, weights, sampler_seed(opts_.seed, e.id, group))) {
      out.push_back(input[i]);
    }
    return out;
  }

  TaggedTuples<Tag> eval_impl(const ram::Expr& e, const Db& db, const Delta* delta) {
    using K = ram::ExprKind;
    auto child = [&](std::size_t i) { return eval_impl(*e.children[i], db, delta); };
    const AggregateOptions agg_opts{opts_.world_cap, opts_.parallel};
    switch (e.kind) {
      case K::Empty: return {};
      case K::Predicate: return lookup(e, db, delta);
      case K::ZeroOverwrite:
      case K::OneOverwrite: {
        auto in = child(0);
        for (auto& tt : in) tt.tag = e.kind == K::ZeroOverwrite ? prov_.zero() : prov_.one();
        return in;
      }
      case K::Select: {
        TaggedTuples<Tag> out;
        for (auto& tt : child(0)) {
          auto v = ram::evaluate(*e.condition, tt.tuple);
          if (!v) {
            ++stats_.ff_failures;
            continue;
          }
          if (v->type() == ValueType::Bool && v->as_bool()) out.push_back(std::move(tt));
        }
        return out;
      }
      case K::Project: {
        TaggedTuples<Tag> out;
        for (auto& tt : child(0)) {
          Tuple u;
          u.reserve(e.projection.size());
          bool ok = true;
          for (const auto& col : e.projection) {
            auto v = ram::evaluate(*col, tt.tuple);
            if (!v || v->is_nan()) {
              ok = false;
              break;
            }
            u.push_back(std::move(*v));
          }
          if (!ok) {
            ++stats_.ff_failures;
            continue;
          }
          out.push_back({std::move(u), std::move(tt.tag)});
        }
        return out;
      }
      case K::Union: {
        auto a = child(0);
        auto b = child(1);
        std::move(b.begin(), b.end(), std::back_inserter(a));
        return a;
      }
      case K::Product: {
        auto a = child(0);
        auto b = child(1);
        return opts_.parallel ? kernels::product_parallel(prov_, a, b) : kernels::product_serial(prov_, a, b);
      }
      case K::Intersect: {
        auto a = child(0);
        auto b = normalize_to_relation(child(1));
        TaggedTuples<Tag> out;
        for (auto& tt : a) {
          auto it = b.find(tt.tuple);
          if (it != b.end()) out.push_back({std::move(tt.tuple), prov_.mult(tt.tag, it->second)});
        }
        return out;
      }
      case K::NaturalJoin: {
        auto a = child(0);
        auto b = child(1);
        // The hash probe is the evaluation path; the nested-loop version is a
        // test reference only.
        return kernels::join_parallel(prov_, a, b, e.key_len);
      }
      case K::Difference:
      case K::AntiJoin: {
        auto a = child(0);
        auto b = normalize_to_relation(child(1));
        const std::size_t key = e.kind == K::Difference ? e.arity : e.key_len;
        return opts_.parallel ? kernels::antijoin_parallel(prov_, a, b, key)
                              : kernels::antijoin_serial(prov_, a, b, key);
      }
      case K::Aggregate: return aggregate_worlds(prov_, e.aggregator, normalize(child(0)), agg_opts);
      case K::GroupByAggregate: {
        auto groups = normalize(child(0));
        auto body = partition(normalize(child(1)), e.key_len);
        std::map<Tuple, TaggedTuples<Tag>> cache;
        const TaggedTuples<Tag> none;
        TaggedTuples<Tag> out;
        for (const auto& g : groups) {
          Tuple key(g.tuple.begin(), g.tuple.begin() + e.key_len);
          auto it = cache.find(key);
          if (it == cache.end()) {
            auto members = body.find(key);
            it = cache.emplace(key, aggregate_worlds(prov_, e.aggregator, members == body.end() ? none : members->second,
                                                     agg_opts))
                     .first;
          }
          for (const auto& r : it->second) {
            Tuple u = g.tuple;
            u.insert(u.end(), r.tuple.begin(), r.tuple.end());
            out.push_back({std::move(u), prov_.mult(g.tag, r.tag)});
          }
        }
        return out;
      }
      case K::Sample: return sample(e, normalize(child(0)), {});
      case K::GroupBySample: {
        auto groups = normalize(child(0));
        auto body = partition(normalize(child(1)), e.key_len);
        std::map<Tuple, TaggedTuples<Tag>> cache;
        TaggedTuples<Tag> out;
        for (const auto& g : groups) {
          Tuple key(g.tuple.begin(), g.tuple.begin() + e.key_len);
          auto members = body.find(key);
          if (members == body.end()) continue;
          auto it = cache.find(key);
          if (it == cache.end()) it = cache.emplace(key, sample(e, members->second, key)).first;
          for (const auto& r : it->second) {
            Tuple u = g.tuple;
            u.insert(u.end(), r.tuple.begin(), r.tuple.end());
            out.push_back({std::move(u), prov_.mult(g.tag, r.tag)});
          }
        }
        return out;
      }
    }
    return {};
  }

  const ram::Program& program_;
  const P& prov_;
  EvalOptions opts_;
  EvalStats stats_;
  Observer observer_;
};

}  // namespace tagdl
