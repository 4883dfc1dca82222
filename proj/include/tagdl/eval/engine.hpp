#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tagdl/eval/evaluator.hpp"
#include "tagdl/provenance/provenance.hpp"
#include "tagdl/ram.hpp"
#include "tagdl/value.hpp"

namespace tagdl {

/// One input fact. Facts without a probability get tag 𝟙.
struct EdbFact {
  std::string relation;
  Tuple tuple;
  InputTag tag;
};

/// An input that received a variable id.
struct InputRecord {
  std::size_t id = 0;
  std::string relation;
  Tuple tuple;
  double prob = 0;
  std::optional<std::uint64_t> exclusion;
};

struct OutputFact {
  Tuple tuple;
  OutputTag tag;
};

struct OutputRelation {
  std::string name;
  /// Canonical tuple order.
  std::vector<OutputFact> facts;
};

struct EvaluationResult {
  std::string provenance;
  std::vector<InputRecord> inputs;
  std::vector<OutputRelation> relations;
  EvalStats stats;

  const OutputRelation* find(std::string_view name) const;
  /// Recovered tag of one output fact, if derived.
  const OutputTag* lookup(std::string_view relation, const Tuple& tuple) const;
};

/// Names accepted by `evaluate`, in a fixed order.
std::span<const std::string_view> provenance_names();
bool is_provenance_name(std::string_view name);
/// The provenance tracks proofs and so needs k ≥ 1.
bool uses_proofs(std::string_view name);

/// Evaluates a program over input facts under the named provenance. Facts
/// with a probability become variables numbered in input order; facts with
/// NaN columns are skipped; duplicates are ⊕-merged.
EvaluationResult evaluate(const ram::Program& program, std::span<const EdbFact> facts, std::string_view provenance,
                          const ProvenanceOptions& prov_opts = {}, const EvalOptions& eval_opts = {});

}  // namespace tagdl
