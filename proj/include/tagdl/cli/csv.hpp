#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tagdl/eval/engine.hpp"
#include "tagdl/value.hpp"

namespace tagdl {

/// RFC-4180 records: comma-separated, `"`-quoted fields with `""` escapes,
/// LF or CRLF line ends. Throws LoadError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text, const std::string& source);

/// Exclusion ids from CSV `me` columns live above this bit so they never
/// collide with groups written in program text.
inline constexpr std::uint64_t kCsvExclusionBase = std::uint64_t{1} << 63;

/// Facts for one relation. The header row is required; a `prob` column holds
/// the fact probability (empty for an untagged fact) and a `me` column an
/// integer mutual-exclusion id. The remaining columns map to the relation's
/// columns in order. Errors name the offending row, counting the header as
/// row 1.
std::vector<EdbFact> load_edb_csv(const std::string& relation, const RelationSignature& signature,
                                  std::string_view text, const std::string& source);
std::vector<EdbFact> load_edb_csv(const std::string& relation, const RelationSignature& signature,
                                  const std::filesystem::path& path);

}  // namespace tagdl
