#include "tagdl/cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "tagdl/cli/csv.hpp"
#include "tagdl/error.hpp"
#include "tagdl/ff.hpp"
#include "tagdl/frontend/compiler.hpp"

namespace tagdl::cli {

namespace {

std::string probability_text(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", p);
  return buf;
}

std::string fact_text(const std::string& relation, const Tuple& u) {
  std::string out = relation + "(";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) out += ", ";
    out += to_string(u[i]);
  }
  return out + ")";
}

nlohmann::json tuple_to_json(const Tuple& u) {
  auto arr = nlohmann::json::array();
  for (const auto& v : u) arr.push_back(value_to_json(v));
  return arr;
}

/// `REL=PATH` pairs, comma separated.
std::map<std::string, std::filesystem::path> parse_overrides(const std::vector<std::string>& specs) {
  std::map<std::string, std::filesystem::path> out;
  for (const auto& spec : specs) {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
      auto eq = part.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == part.size()) {
        throw LoadError("expected REL=PATH, got `" + part + "`");
      }
      out[part.substr(0, eq)] = part.substr(eq + 1);
    }
  }
  return out;
}

std::vector<EdbFact> facts_with_overrides(const CompiledProgram& program,
                                          const std::map<std::string, std::filesystem::path>& overrides) {
  std::vector<EdbFact> facts;
  for (const auto& f : program.facts) {
    if (!overrides.count(f.relation)) facts.push_back(f);
  }
  for (const auto& [relation, path] : overrides) {
    const auto* info = program.ram.find(relation);
    if (!info || info->hidden) throw LoadError("--edb names unknown relation `" + relation + "`");
    auto loaded = load_edb_csv(relation, info->signature, path);
    facts.insert(facts.end(), std::make_move_iterator(loaded.begin()), std::make_move_iterator(loaded.end()));
  }
  return facts;
}

void print_stats(const EvaluationResult& r, std::ostream& err) {
  for (std::size_t i = 0; i < r.stats.iterations.size(); ++i) {
    err << "stratum " << i << ": " << r.stats.iterations[i] << " iterations\n";
  }
  err << "foreign-function failures: " << r.stats.ff_failures << "\n";
}

}  // namespace

nlohmann::json value_to_json(const Value& v) {
  switch (v.type()) {
    case ValueType::Bool: return v.as_bool();
    case ValueType::Char: {
      std::string s;
      append_utf8(s, v.as_char());
      return s;
    }
    case ValueType::String: return v.as_string();
    case ValueType::F32:
    case ValueType::F64: return v.as_float();
    default: break;
  }
  if (is_signed_int(v.type())) return v.as_signed();
  return v.as_unsigned();
}

std::string render_table(const EvaluationResult& result) {
  std::string out;
  for (const auto& rel : result.relations) {
    for (const auto& f : rel.facts) {
      if (f.tag.prob) out += probability_text(*f.tag.prob) + "::";
      out += fact_text(rel.name, f.tuple);
      out += '\n';
    }
  }
  return out;
}

nlohmann::json render_json(const EvaluationResult& result) {
  nlohmann::json j;
  j["provenance"] = result.provenance;
  auto inputs = nlohmann::json::array();
  for (const auto& in : result.inputs) {
    nlohmann::json e{{"id", in.id}, {"relation", in.relation}, {"tuple", tuple_to_json(in.tuple)}, {"prob", in.prob}};
    if (in.exclusion) e["exclusion"] = *in.exclusion;
    inputs.push_back(std::move(e));
  }
  j["inputs"] = std::move(inputs);
  auto relations = nlohmann::json::array();
  for (const auto& rel : result.relations) {
    auto facts = nlohmann::json::array();
    for (const auto& f : rel.facts) {
      nlohmann::json e{{"tuple", tuple_to_json(f.tuple)}};
      if (f.tag.prob) e["prob"] = *f.tag.prob;
      if (f.tag.grad) e["grad"] = *f.tag.grad;
      facts.push_back(std::move(e));
    }
    relations.push_back({{"name", rel.name}, {"facts", std::move(facts)}});
  }
  j["relations"] = std::move(relations);
  return j;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!is_provenance_name(config.provenance)) {
      std::string names;
      for (auto n : provenance_names()) names += (names.empty() ? "" : ", ") + std::string(n);
      err << "error: unknown provenance `" << config.provenance << "` (expected one of " << names << ")\n";
      return 1;
    }
    if (uses_proofs(config.provenance) && config.k < 1) {
      err << "error: --k must be at least 1 for " << config.provenance << "\n";
      return 1;
    }
    if (!(config.discard_eps >= 0.0)) {
      err << "error: --discard-eps must be nonnegative\n";
      return 1;
    }
    CompiledProgram program = compile_file(config.program);
    if (!config.queries.empty()) set_outputs(program, config.queries);
    if (config.dump_ram) {
      out << ram::to_string(program.ram);
      return 0;
    }

    std::vector<std::map<std::string, std::filesystem::path>> sets = config.edb_sets;
    if (sets.empty()) sets.push_back({});
    for (auto& s : sets) {
      for (const auto& [rel, path] : config.edb) s.try_emplace(rel, path);
    }
    std::vector<std::vector<EdbFact>> inputs;
    for (const auto& s : sets) inputs.push_back(facts_with_overrides(program, s));

    const ProvenanceOptions popts{config.k, config.discard_eps};
    EvalOptions eopts;
    eopts.iteration_limit = config.iteration_limit;
    eopts.seed = config.seed;
    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, sets.size()));
    eopts.parallel = jobs == 1;

    std::vector<std::optional<EvaluationResult>> results(sets.size());
    std::vector<std::string> failures(sets.size());
    auto work = [&](std::size_t worker) {
      for (std::size_t i = worker; i < sets.size(); i += jobs) {
        try {
          results[i] = evaluate(program.ram, inputs[i], config.provenance, popts, eopts);
        } catch (const RuntimeError& e) {
          failures[i] = e.what();
        }
      }
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (!failures[i].empty()) {
        err << "runtime error: " << failures[i] << "\n";
        return 2;
      }
    }

    const bool batch = !config.edb_sets.empty();
    if (config.format == RunConfig::Format::Json) {
      if (batch) {
        auto arr = nlohmann::json::array();
        for (const auto& r : results) arr.push_back(render_json(*r));
        out << arr.dump(2) << "\n";
      } else {
        out << render_json(*results.front()).dump(2) << "\n";
      }
    } else {
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (batch) out << "# set " << i << "\n";
        out << render_table(*results[i]);
      }
    }
    if (config.stats) {
      for (const auto& r : results) print_stats(*r, err);
    }
    return 0;
  } catch (const CompileError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const LoadError& e) {
    err << "load error: " << e.what() << "\n";
    return 1;
  } catch (const RuntimeError& e) {
    err << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate a tagged Datalog program"};
  RunConfig config;
  std::string program;
  std::string format = "table";
  std::vector<std::string> edb;
  std::vector<std::string> edb_sets;
  bool list = false;

  app.add_option("program", program, "Program file (.scl)");
  app.add_option("--provenance", config.provenance, "Provenance name")->capture_default_str();
  app.add_option("--k", config.k, "Proof bound for the top-k proofs provenances")->capture_default_str();
  app.add_option("--query", config.queries, "Output relation (repeatable)");
  app.add_option("--iter-limit", config.iteration_limit, "Iterations per stratum before aborting")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "Sampler seed")->capture_default_str();
  app.add_option("--discard-eps", config.discard_eps, "Drop facts whose weight falls below this")
      ->capture_default_str();
  app.add_option("--output", format, "Output format")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
  app.add_flag("--dump-ram", config.dump_ram, "Print the compiled RAM program and exit");
  app.add_option("--edb", edb, "Replace a relation's facts with a CSV file: REL=PATH (repeatable)");
  app.add_option("--edb-set", edb_sets,
                 "Batch mode: one evaluation per occurrence, each with its own REL=PATH[,REL=PATH...] overrides");
  app.add_option("--jobs", config.jobs, "Parallel evaluations in batch mode")->check(CLI::PositiveNumber);
  app.add_flag("--list-functions", list, "List built-in foreign functions and exit");
  app.add_flag("--stats", config.stats, "Print iteration counts and foreign-function failures to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (list) {
    for (const auto& f : foreign_functions()) out << f.signature << "\n";
    return 0;
  }
  if (program.empty()) {
    err << "error: a program file is required\n";
    return 1;
  }
  config.program = program;
  config.format = format == "json" ? RunConfig::Format::Json : RunConfig::Format::Table;
  try {
    config.edb = parse_overrides(edb);
    for (const auto& s : edb_sets) config.edb_sets.push_back(parse_overrides({s}));
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return run(config, out, err);
}

}  // namespace tagdl::cli
