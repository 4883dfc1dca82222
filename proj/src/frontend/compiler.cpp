#include "tagdl/frontend/compiler.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "tagdl/frontend/parser.hpp"

namespace tagdl {

namespace {

void splice(ast::Program& out, ast::Program program, const std::filesystem::path& file, const FileReader& read,
            std::vector<std::filesystem::path>& active) {
  for (auto& item : program.items) {
    const auto* imp = std::get_if<ast::ImportDef>(&item.def);
    if (!imp) {
      out.items.push_back(std::move(item));
      continue;
    }
    auto target = std::filesystem::weakly_canonical(file.parent_path() / imp->path);
    if (std::ranges::find(active, target) != active.end()) {
      std::string chain;
      for (const auto& p : active) chain += p.filename().string() + " -> ";
      throw CompileError(item.loc, "import cycle: " + chain + target.filename().string());
    }
    std::string text;
    try {
      text = read(target);
    } catch (const CompileError&) {
      throw;
    } catch (const std::exception& e) {
      throw CompileError(item.loc, "cannot import " + imp->path + ": " + e.what());
    }
    active.push_back(target);
    splice(out, parse(text, target.string()), target, read, active);
    active.pop_back();
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CompiledProgram finish(const ast::Program& program) {
  auto core = desugar(program);
  auto types = infer_types(core);
  auto strata = stratify(core);
  return lower(core, types, strata);
}

}  // namespace

ast::Program resolve_imports(ast::Program program, const std::filesystem::path& file, const FileReader& read) {
  ast::Program out;
  std::vector<std::filesystem::path> active{std::filesystem::weakly_canonical(file)};
  splice(out, std::move(program), file, read, active);
  return out;
}

CompiledProgram compile(std::string_view source, const std::string& file) { return finish(parse(source, file)); }

CompiledProgram compile_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw CompileError({path.string(), 0, 0}, e.what());
  }
  return finish(resolve_imports(parse(text, path.string()), path, read_file));
}

void set_outputs(CompiledProgram& program, const std::vector<std::string>& relations) {
  std::vector<std::string> outputs;
  for (const auto& r : relations) {
    const auto* info = program.ram.find(r);
    if (!info || info->hidden) throw CompileError({}, "unknown query relation `" + r + "`");
    if (std::ranges::find(outputs, r) == outputs.end()) outputs.push_back(r);
  }
  program.ram.outputs = std::move(outputs);
}

}  // namespace tagdl
