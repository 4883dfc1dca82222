#pragma once

#include <string>
#include <string_view>

#include "tagdl/frontend/ast.hpp"

namespace tagdl {

/// Parses one source file. Throws CompileError with the location and the
/// expected tokens on a syntax error.
ast::Program parse(std::string_view source, const std::string& file = "<input>");

}  // namespace tagdl
