#include "tagdl/eval/engine.hpp"

#include <algorithm>
#include <array>

#include "tagdl/error.hpp"
#include "tagdl/provenance/basic.hpp"
#include "tagdl/provenance/dual_prob.hpp"
#include "tagdl/provenance/proofs.hpp"

namespace tagdl {

namespace {

constexpr std::array<std::string_view, 8> kNames = {
    UnitProvenance::kName, MinMaxProb::kName,     AddMultProb::kName,    TopKProofs::kName,
    DiffMinMaxProb::kName, DiffAddMultProb::kName, DiffTopKProofs::kName, DiffTopKProofsMe::kName,
};

template <Provenance P>
EvaluationResult run(const ram::Program& program, std::span<const EdbFact> facts, const ProvenanceOptions& prov_opts,
                     const EvalOptions& eval_opts) {
  using Tag = typename P::Tag;
  EvaluationResult result;
  result.provenance = std::string(P::kName);

  std::vector<InputVariable> vars;
  for (const auto& f : facts) {
    if (!f.tag.prob || has_nan(f.tuple)) continue;
    result.inputs.push_back({vars.size(), f.relation, f.tuple, *f.tag.prob, f.tag.exclusion});
    vars.push_back({*f.tag.prob, f.tag.exclusion});
  }
  const P prov(prov_opts, vars);

  Database<Tag> db;
  for (const auto& r : program.relations) db.declare(r.name, r.signature);
  std::size_t next_var = 0;
  for (const auto& f : facts) {
    if (has_nan(f.tuple)) continue;
    const auto* info = program.find(f.relation);
    if (!info) throw LoadError("fact for undeclared relation " + f.relation);
    if (!info->signature.conforms(f.tuple)) {
      throw LoadError("fact " + f.relation + to_string(f.tuple) + " does not match the relation's type");
    }
    Tag t = f.tag.prob ? prov.tag(vars[next_var], next_var) : prov.one();
    if (f.tag.prob) ++next_var;
    auto& rel = db.mutable_relation(f.relation);
    auto [it, fresh] = rel.try_emplace(f.tuple, t);
    if (!fresh) it->second = prov.add(it->second, t);
  }

  Evaluator<P> ev(program, prov, eval_opts);
  ev.run(db);
  result.stats = ev.stats();

  for (const auto& name : program.outputs) {
    OutputRelation out{name, {}};
    for (const auto& [u, t] : db.relation(name)) {
      if (prov.discard(t)) continue;
      out.facts.push_back({u, prov.output(t)});
    }
    result.relations.push_back(std::move(out));
  }
  return result;
}

}  // namespace

const OutputRelation* EvaluationResult::find(std::string_view name) const {
  for (const auto& r : relations) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const OutputTag* EvaluationResult::lookup(std::string_view relation, const Tuple& tuple) const {
  const auto* r = find(relation);
  if (!r) return nullptr;
  for (const auto& f : r->facts) {
    if (f.tuple == tuple) return &f.tag;
  }
  return nullptr;
}

std::span<const std::string_view> provenance_names() { return kNames; }

bool is_provenance_name(std::string_view name) { return std::ranges::find(kNames, name) != kNames.end(); }

bool uses_proofs(std::string_view name) {
  return name == TopKProofs::kName || name == DiffTopKProofs::kName || name == DiffTopKProofsMe::kName;
}

EvaluationResult evaluate(const ram::Program& program, std::span<const EdbFact> facts, std::string_view provenance,
                          const ProvenanceOptions& prov_opts, const EvalOptions& eval_opts) {
  if (provenance == UnitProvenance::kName) return run<UnitProvenance>(program, facts, prov_opts, eval_opts);
  if (provenance == MinMaxProb::kName) return run<MinMaxProb>(program, facts, prov_opts, eval_opts);
  if (provenance == AddMultProb::kName) return run<AddMultProb>(program, facts, prov_opts, eval_opts);
  if (provenance == TopKProofs::kName) return run<TopKProofs>(program, facts, prov_opts, eval_opts);
  if (provenance == DiffMinMaxProb::kName) return run<DiffMinMaxProb>(program, facts, prov_opts, eval_opts);
  if (provenance == DiffAddMultProb::kName) return run<DiffAddMultProb>(program, facts, prov_opts, eval_opts);
  if (provenance == DiffTopKProofs::kName) return run<DiffTopKProofs>(program, facts, prov_opts, eval_opts);
  if (provenance == DiffTopKProofsMe::kName) return run<DiffTopKProofsMe>(program, facts, prov_opts, eval_opts);
  throw std::invalid_argument("unknown provenance " + std::string(provenance));
}

}  // namespace tagdl
