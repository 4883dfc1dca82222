#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "tagdl/eval/engine.hpp"
#include "tagdl/frontend/ast.hpp"
#include "tagdl/frontend/core.hpp"
#include "tagdl/ram.hpp"

namespace tagdl {

/// Name of the hidden 0-ary relation holding one 𝟙-tagged fact; rules whose
/// body has no positive atom start from it.
inline constexpr std::string_view kUnitRelation = "#unit";

/// Splices imported files in place of `import` items. Paths resolve relative
/// to the importing file; a file importing itself (directly or not) is an
/// error. `read` returns the file contents or throws.
using FileReader = std::function<std::string(const std::filesystem::path&)>;
ast::Program resolve_imports(ast::Program program, const std::filesystem::path& file, const FileReader& read);

/// Substitutes constants, resolves type aliases, splits `or`/`implies` into
/// separate rules, and moves rule tags into hidden 0-ary facts.
core::Program desugar(const ast::Program& program);

/// Unification over the candidate type sets of every column, variable and
/// literal. Nonnegative integer literals default to usize, negative ones to
/// i32, floats to f64.
core::TypeInfo infer_types(const core::Program& program);

/// Relations grouped into strongly connected components of the dependency
/// graph, in evaluation order; only components that contain rule heads are
/// returned. Throws when negation or aggregation is used within a cycle.
std::vector<std::vector<std::string>> stratify(const core::Program& program);

struct CompiledProgram {
  ram::Program ram;
  /// Facts written in the program text, in source order.
  std::vector<EdbFact> facts;
};

/// Builds the RAM program: joins in body order, selections as early as
/// their variables are bound, heads as projections.
CompiledProgram lower(const core::Program& program, const core::TypeInfo& types,
                      const std::vector<std::vector<std::string>>& strata);

/// Whole pipeline for source text.
CompiledProgram compile(std::string_view source, const std::string& file = "<input>");

/// Whole pipeline for a file on disk, following imports.
CompiledProgram compile_file(const std::filesystem::path& path);

/// Restricts the outputs to the given relations; throws CompileError for an
/// unknown name.
void set_outputs(CompiledProgram& program, const std::vector<std::string>& relations);

}  // namespace tagdl
