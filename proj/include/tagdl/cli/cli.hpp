#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tagdl/eval/engine.hpp"

namespace tagdl::cli {

struct RunConfig {
  std::filesystem::path program;
  std::string provenance = "unit";
  std::size_t k = 3;
  std::vector<std::string> queries;
  std::size_t iteration_limit = std::size_t{1} << 20;
  std::uint64_t seed = 0;
  double discard_eps = 0.0;
  enum class Format { Table, Json } format = Format::Table;
  bool dump_ram = false;
  /// Relation → CSV path, replacing that relation's facts from the program.
  std::map<std::string, std::filesystem::path> edb;
  /// Batch mode: each entry is one EDB override set evaluated separately.
  std::vector<std::map<std::string, std::filesystem::path>> edb_sets;
  std::size_t jobs = 1;
  bool stats = false;
};

/// One line per fact, `0.950000::rel(v1, v2)`, relations in output order and
/// facts in canonical order. Provenances without probabilities print no tag.
std::string render_table(const EvaluationResult& result);

/// Inputs (variable id → relation and tuple), then each output relation with
/// its facts, probabilities and gradients.
nlohmann::json render_json(const EvaluationResult& result);

nlohmann::json value_to_json(const Value& v);

/// Runs one configuration; returns the process exit status: 0 on success, 1
/// on a compile, load or usage error, 2 when evaluation aborts.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line flags, then runs.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tagdl::cli
