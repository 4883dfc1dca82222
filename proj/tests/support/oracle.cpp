#include "oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace oracle {

namespace {

using Db = std::map<std::string, std::set<Row>>;
using Binding = std::vector<std::optional<std::int64_t>>;

constexpr std::size_t kMaxVars = 8;

bool unify(const Atom& atom, const Row& row, Binding& b, std::vector<int>& bound) {
  if (atom.args.size() != row.size()) return false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const Term& t = atom.args[i];
    if (!t.is_var) {
      if (t.value != row[i]) return false;
      continue;
    }
    auto& slot = b[static_cast<std::size_t>(t.value)];
    if (slot) {
      if (*slot != row[i]) return false;
    } else {
      slot = row[i];
      bound.push_back(static_cast<int>(t.value));
    }
  }
  return true;
}

Row instantiate(const Atom& atom, const Binding& b) {
  Row r;
  for (const auto& t : atom.args) {
    if (!t.is_var) {
      r.push_back(t.value);
    } else {
      const auto& v = b[static_cast<std::size_t>(t.value)];
      if (!v) throw std::logic_error("unbound variable in " + atom.pred);
      r.push_back(*v);
    }
  }
  return r;
}

void solve(const Db& db, const std::vector<const Atom*>& atoms, std::size_t i, Binding& b,
           const std::function<void(const Binding&)>& emit) {
  if (i == atoms.size()) {
    emit(b);
    return;
  }
  auto it = db.find(atoms[i]->pred);
  if (it == db.end()) return;
  for (const Row& row : it->second) {
    std::vector<int> bound;
    if (unify(*atoms[i], row, b, bound)) solve(db, atoms, i + 1, b, emit);
    for (int v : bound) b[static_cast<std::size_t>(v)].reset();
  }
}

bool holds(const Db& db, const std::string& pred, const Row& row) {
  auto it = db.find(pred);
  return it != db.end() && it->second.count(row);
}

std::set<Row> apply_rule(const Rule& r, const Db& db) {
  std::set<Row> out;
  Binding b(kMaxVars);
  if (r.count) {
    const Count& c = *r.count;
    std::vector<int> group;
    for (const auto& t : r.head.args) {
      if (t.is_var && t.value != c.result_var) group.push_back(static_cast<int>(t.value));
    }
    std::map<Row, std::set<Row>> members;
    solve(db, {&c.body}, 0, b, [&](const Binding& bb) {
      Row key;
      for (int v : group) key.push_back(*bb[static_cast<std::size_t>(v)]);
      Row counted;
      for (int v : c.counted) counted.push_back(*bb[static_cast<std::size_t>(v)]);
      members[key].insert(counted);
    });
    if (group.empty() && members.empty()) members[Row{}];
    for (const auto& [key, set] : members) {
      Binding hb(kMaxVars);
      for (std::size_t i = 0; i < group.size(); ++i) hb[static_cast<std::size_t>(group[i])] = key[i];
      hb[static_cast<std::size_t>(c.result_var)] = static_cast<std::int64_t>(set.size());
      out.insert(instantiate(r.head, hb));
    }
    return out;
  }
  std::vector<const Atom*> positive;
  for (const auto& l : r.body) {
    if (!l.negated) positive.push_back(&l.atom);
  }
  solve(db, positive, 0, b, [&](const Binding& bb) {
    for (const auto& [x, y] : r.neq) {
      if (*bb[static_cast<std::size_t>(x)] == *bb[static_cast<std::size_t>(y)]) return;
    }
    for (const auto& l : r.body) {
      if (l.negated && holds(db, l.atom.pred, instantiate(l.atom, bb))) return;
    }
    out.insert(instantiate(r.head, bb));
  });
  return out;
}

std::string term_text(const Term& t) {
  return t.is_var ? "v" + std::to_string(t.value) : std::to_string(t.value);
}

std::string atom_text(const Atom& a) {
  std::string s = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ", ";
    s += term_text(a.args[i]);
  }
  return s + ")";
}

std::string prob_text(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

Atom atom(std::string pred, std::vector<Term> args) { return {std::move(pred), std::move(args)}; }
BodyLiteral pos(Atom a) { return {false, std::move(a)}; }
BodyLiteral neg(Atom a) { return {true, std::move(a)}; }

const Term X = Term::var(0);
const Term Y = Term::var(1);
const Term Z = Term::var(2);
const Term N = Term::var(3);

}  // namespace

std::size_t Program::probabilistic_count() const {
  return static_cast<std::size_t>(std::count_if(facts.begin(), facts.end(), [](const Fact& f) { return f.prob; }));
}

FactSet evaluate_world(const Program& p, const std::vector<bool>& present) {
  Db db;
  std::size_t next = 0;
  for (const auto& f : p.facts) {
    if (f.prob && !present.at(next++)) continue;
    db[f.pred].insert(f.args);
  }
  for (const auto& stratum : p.strata) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& r : stratum) {
        for (auto& row : apply_rule(r, db)) changed |= db[r.head.pred].insert(std::move(row)).second;
      }
    }
  }
  FactSet out;
  for (const auto& [pred, rows] : db) {
    for (const auto& row : rows) out.insert({pred, row});
  }
  return out;
}

FactSet output_facts(const Program& p, const FactSet& all) {
  FactSet out;
  for (const auto& f : all) {
    if (std::find(p.outputs.begin(), p.outputs.end(), f.first) != p.outputs.end()) out.insert(f);
  }
  return out;
}

std::map<FactKey, double> world_probabilities(const Program& p, const std::vector<double>* probs) {
  std::vector<double> r;
  for (const auto& f : p.facts) {
    if (f.prob) r.push_back(*f.prob);
  }
  if (probs) r = *probs;
  const std::size_t n = r.size();
  if (n > 20) throw std::invalid_argument("too many probabilistic facts for world enumeration");
  std::map<FactKey, double> out;
  std::vector<bool> present(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      present[i] = (mask >> i) & 1;
      w *= present[i] ? r[i] : 1.0 - r[i];
    }
    for (const auto& f : output_facts(p, evaluate_world(p, present))) out[f] += w;
  }
  return out;
}

std::string to_source(const Program& p) {
  std::ostringstream os;
  for (const auto& [name, arity] : p.edb) {
    os << "type " << name << "(";
    for (std::size_t i = 0; i < arity; ++i) os << (i ? ", " : "") << "usize";
    os << ")\n";
  }
  for (const auto& f : p.facts) {
    os << "rel ";
    if (f.prob) os << prob_text(*f.prob) << "::";
    os << f.pred << "(";
    for (std::size_t i = 0; i < f.args.size(); ++i) os << (i ? ", " : "") << f.args[i];
    os << ")\n";
  }
  for (const auto& stratum : p.strata) {
    for (const auto& r : stratum) {
      os << "rel " << atom_text(r.head) << " = ";
      if (r.count) {
        os << "v" << r.count->result_var << " := count(";
        for (std::size_t i = 0; i < r.count->counted.size(); ++i) os << (i ? ", " : "") << "v" << r.count->counted[i];
        os << ": " << atom_text(r.count->body) << ")\n";
        continue;
      }
      bool first = true;
      for (const auto& l : r.body) {
        os << (first ? "" : " and ") << (l.negated ? "not " : "") << atom_text(l.atom);
        first = false;
      }
      for (const auto& [x, y] : r.neq) os << " and v" << x << " != v" << y;
      os << "\n";
    }
  }
  for (const auto& o : p.outputs) os << "query " << o << "\n";
  return os.str();
}

Program random_program(std::mt19937_64& rng, const GenOptions& opts) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const std::int64_t d = opts.domain;

  Program p;
  p.edb = {{"a", 2}, {"b", 1}, {"c", 2}};
  std::vector<Fact> candidates;
  for (std::int64_t i = 0; i < d; ++i) {
    candidates.push_back({"b", {i}, std::nullopt});
    for (std::int64_t j = 0; j < d; ++j) {
      candidates.push_back({"a", {i, j}, std::nullopt});
      candidates.push_back({"c", {i, j}, std::nullopt});
    }
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(3, opts.max_inputs)(rng);
  const std::size_t certain = pick(4);
  std::uniform_real_distribution<double> prob(0.05, 0.95);
  for (std::size_t i = 0; i < n + certain && i < candidates.size(); ++i) {
    Fact f = candidates[i];
    if (i < n) f.prob = prob(rng);
    p.facts.push_back(std::move(f));
  }

  const std::size_t strata = 1 + pick(opts.max_strata);
  const Atom p_xy = atom("p", {X, Y});

  std::vector<Rule> base = {
      {p_xy, {pos(atom("a", {X, Y}))}, {}, {}},
      {p_xy, {pos(atom("c", {X, Y}))}, {}, {}},
      {p_xy, {pos(atom("a", {X, Z})), pos(atom("c", {Z, Y}))}, {}, {}},
      {p_xy, {pos(atom("b", {X})), pos(atom("a", {X, Y}))}, {}, {}},
      {p_xy, {pos(atom("a", {Y, X})), pos(atom("b", {Y}))}, {}, {}},
      {p_xy, {pos(atom("c", {X, Y}))}, {{0, 1}}, {}},
  };
  std::vector<Rule> recursive = {
      {p_xy, {pos(atom("p", {X, Z})), pos(atom("a", {Z, Y}))}, {}, {}},
      {p_xy, {pos(atom("p", {X, Z})), pos(atom("p", {Z, Y}))}, {}, {}},
      {p_xy, {pos(atom("c", {X, Z})), pos(atom("p", {Z, Y}))}, {}, {}},
      {p_xy, {pos(atom("p", {Y, X}))}, {}, {}},
  };
  std::shuffle(base.begin(), base.end(), rng);
  std::vector<Rule> s1(base.begin(), base.begin() + 1 + static_cast<std::ptrdiff_t>(pick(2)));
  if (chance(0.6)) s1.push_back(recursive[pick(recursive.size())]);
  p.strata.push_back(std::move(s1));
  p.outputs.push_back("p");

  if (strata >= 2) {
    const Atom q_x = atom("q", {X});
    std::vector<Rule> negs = {
        {q_x, {pos(atom("b", {X})), neg(atom("p", {X, X}))}, {}, {}},
        {q_x, {pos(atom("p", {X, Y})), neg(atom("b", {Y}))}, {}, {}},
        {q_x, {pos(atom("a", {X, Y})), neg(atom("p", {Y, X}))}, {}, {}},
        {q_x, {pos(atom("b", {X})), neg(atom("c", {X, Term::constant(static_cast<std::int64_t>(pick(d)))}))}, {}, {}},
    };
    std::shuffle(negs.begin(), negs.end(), rng);
    p.strata.emplace_back(negs.begin(), negs.begin() + 1 + static_cast<std::ptrdiff_t>(pick(2)));
    p.outputs.push_back("q");
  }

  if (strata >= 3) {
    std::vector<Rule> counts = {
        {atom("r", {X, N}), {}, {}, Count{3, {1}, atom("p", {X, Y})}},
        {atom("r", {X, N}), {}, {}, Count{3, {1}, atom("p", {Y, X})}},
        {atom("r", {N}), {}, {}, Count{3, {0}, atom("q", {X})}},
        {atom("r", {N}), {}, {}, Count{3, {0}, atom("b", {X})}},
    };
    p.strata.push_back({counts[pick(counts.size())]});
    p.outputs.push_back("r");
  }
  return p;
}

Program random_closure(std::mt19937_64& rng, std::int64_t nodes) {
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const std::int64_t n = std::uniform_int_distribution<std::int64_t>(2, nodes)(rng);
  const double density = std::uniform_real_distribution<double>(0.1, 0.4)(rng);

  Program p;
  p.edb = {{"edge", 2}};
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (chance(density)) p.facts.push_back({"edge", {i, j}, std::nullopt});
    }
  }
  const Atom path_xy = atom("path", {X, Y});
  std::vector<Rule> s1 = {{path_xy, {pos(atom("edge", {X, Y}))}, {}, {}}};
  const std::vector<Rule> steps = {
      {path_xy, {pos(atom("path", {X, Z})), pos(atom("edge", {Z, Y}))}, {}, {}},
      {path_xy, {pos(atom("edge", {X, Z})), pos(atom("path", {Z, Y}))}, {}, {}},
      {path_xy, {pos(atom("path", {X, Z})), pos(atom("path", {Z, Y}))}, {}, {}},
  };
  s1.push_back(steps[std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng)]);
  if (chance(0.3)) s1.push_back({path_xy, {pos(atom("path", {Y, X}))}, {}, {}});
  s1.push_back({atom("node", {X}), {pos(atom("edge", {X, Y}))}, {}, {}});
  s1.push_back({atom("node", {Y}), {pos(atom("edge", {X, Y}))}, {}, {}});
  p.strata.push_back(std::move(s1));
  p.outputs = {"path", "node"};

  std::vector<Rule> s2;
  if (chance(0.5)) {
    s2.push_back({atom("unreach", {X, Y}),
                  {pos(atom("node", {X})), pos(atom("node", {Y})), neg(atom("path", {X, Y}))},
                  {},
                  {}});
    p.outputs.push_back("unreach");
  }
  if (chance(0.5)) {
    s2.push_back({atom("meet", {X, Y}), {pos(atom("path", {X, Z})), pos(atom("path", {Y, Z}))}, {{0, 1}}, {}});
    p.outputs.push_back("meet");
  }
  if (!s2.empty()) p.strata.push_back(std::move(s2));
  return p;
}

}  // namespace oracle
