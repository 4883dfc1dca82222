#pragma once

#include <map>
#include <string_view>

#include "oracle.hpp"
#include "tagdl/eval/engine.hpp"
#include "tagdl/frontend/compiler.hpp"

namespace testing_support {

inline std::int64_t as_int(const tagdl::Value& v) {
  return tagdl::is_signed_int(v.type()) ? v.as_signed() : static_cast<std::int64_t>(v.as_unsigned());
}

/// Compiles the program's source text and evaluates it; returns every output
/// fact keyed the way the oracle keys them.
inline std::map<oracle::FactKey, tagdl::OutputTag> engine_outputs(const oracle::Program& p, std::string_view provenance,
                                                                  const tagdl::ProvenanceOptions& opts = {},
                                                                  const std::vector<double>* probs = nullptr) {
  auto compiled = tagdl::compile(oracle::to_source(p), "<random>");
  if (probs) {
    std::size_t i = 0;
    for (auto& f : compiled.facts) {
      if (f.tag.prob) f.tag.prob = probs->at(i++);
    }
  }
  auto result = tagdl::evaluate(compiled.ram, compiled.facts, provenance, opts);
  std::map<oracle::FactKey, tagdl::OutputTag> out;
  for (const auto& rel : result.relations) {
    for (const auto& f : rel.facts) {
      oracle::Row row;
      for (const auto& v : f.tuple) row.push_back(as_int(v));
      out[{rel.name, row}] = f.tag;
    }
  }
  return out;
}

}  // namespace testing_support
