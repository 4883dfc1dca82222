#pragma once

// Reference interpreter for small integer Datalog programs. It shares no code
// with the engine: programs are evaluated per world by brute force and
// rendered to source text for the engine to compile.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Row = std::vector<std::int64_t>;
using FactKey = std::pair<std::string, Row>;
using FactSet = std::set<FactKey>;

struct Term {
  bool is_var = true;
  std::int64_t value = 0;  // variable index or constant

  static Term var(int v) { return {true, v}; }
  static Term constant(std::int64_t c) { return {false, c}; }
};

struct Atom {
  std::string pred;
  std::vector<Term> args;
};

struct BodyLiteral {
  bool negated = false;
  Atom atom;
};

/// `n := count(counted: body)`, grouped by the body variables that also
/// appear in the head. Without group variables the empty world yields 0.
struct Count {
  int result_var = 0;
  std::vector<int> counted;
  Atom body;
};

struct Rule {
  Atom head;
  std::vector<BodyLiteral> body;
  std::vector<std::pair<int, int>> neq;
  std::optional<Count> count;
};

struct Fact {
  std::string pred;
  Row args;
  std::optional<double> prob;
};

struct Program {
  std::map<std::string, std::size_t> edb;  // relation → arity
  std::vector<Fact> facts;
  std::vector<std::vector<Rule>> strata;
  std::vector<std::string> outputs;

  std::size_t probabilistic_count() const;
};

/// Least model of one world: the certain facts plus the probabilistic facts
/// whose bit is set (in order of appearance).
FactSet evaluate_world(const Program& p, const std::vector<bool>& present);

/// Output facts only.
FactSet output_facts(const Program& p, const FactSet& all);

/// Pr(fact) for every output fact derivable in some world, by enumerating
/// all 2^n worlds. `probs` overrides the fact probabilities when given.
std::map<FactKey, double> world_probabilities(const Program& p, const std::vector<double>* probs = nullptr);

std::string to_source(const Program& p);

struct GenOptions {
  std::size_t max_inputs = 10;
  std::size_t max_strata = 3;
  std::int64_t domain = 3;
};

/// Up to three strata over `a/2`, `b/1`, `c/2`: a possibly recursive `p/2`,
/// then negation into `q/1`, then a count aggregate.
Program random_program(std::mt19937_64& rng, const GenOptions& opts = {});

/// Untagged transitive-closure shaped program on at most `nodes` nodes.
Program random_closure(std::mt19937_64& rng, std::int64_t nodes = 10);

}  // namespace oracle
