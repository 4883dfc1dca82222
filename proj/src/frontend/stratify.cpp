#include <algorithm>
#include <deque>
#include <map>

#include "tagdl/frontend/compiler.hpp"

namespace tagdl {

namespace {

enum class Edge { Positive, Negative, Aggregate };

struct Dependency {
  std::size_t target;
  Edge kind;
  const SourceLocation* loc;
};

class Graph {
 public:
  explicit Graph(const core::Program& p) {
    for (const auto& r : p.rules) node(r.head.predicate);
    for (const auto& r : p.rules) {
      const std::size_t head = node(r.head.predicate);
      add(head, r.body, Edge::Positive, r.loc);
    }
  }

  std::vector<std::vector<std::string>> strata(const core::Program& p) {
    index_.assign(names_.size(), kUnvisited);
    low_.assign(names_.size(), 0);
    on_stack_.assign(names_.size(), false);
    component_.assign(names_.size(), 0);
    for (std::size_t v = 0; v < names_.size(); ++v) {
      if (index_[v] == kUnvisited) connect(v);
    }
    for (std::size_t v = 0; v < names_.size(); ++v) {
      for (const auto& d : edges_[v]) {
        if (d.kind == Edge::Positive || component_[v] != component_[d.target]) continue;
        const std::string what = d.kind == Edge::Negative ? "negation" : "aggregation";
        throw CompileError(*d.loc, what + " is not stratified: `" + names_[v] + "` depends on itself through " +
                                       (d.kind == Edge::Negative ? "negation" : "an aggregation") +
                                       " (cycle: " + cycle(v, d.target) + ")");
      }
    }
    std::set<std::string> heads;
    for (const auto& r : p.rules) heads.insert(r.head.predicate);
    std::vector<std::vector<std::string>> out;
    for (const auto& comp : components_) {
      std::vector<std::string> names;
      for (std::size_t v : comp) {
        if (heads.count(names_[v])) names.push_back(names_[v]);
      }
      if (names.empty()) continue;
      std::ranges::sort(names, [&](const auto& a, const auto& b) { return ids_.at(a) < ids_.at(b); });
      out.push_back(std::move(names));
    }
    return out;
  }

 private:
  static constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);

  std::size_t node(const std::string& name) {
    auto [it, fresh] = ids_.try_emplace(name, names_.size());
    if (fresh) {
      names_.push_back(name);
      edges_.emplace_back();
    }
    return it->second;
  }

  void add(std::size_t head, const core::Conjunction& conj, Edge ctx, const SourceLocation& loc) {
    for (const auto& lit : conj) {
      switch (lit.kind) {
        case core::Literal::Kind::Positive:
        {
          const auto to = node(lit.atom.predicate);
          edges_[head].push_back({to, ctx, &lit.loc});
          break;
        }
        case core::Literal::Kind::Negative:
        {
          const auto to = node(lit.atom.predicate);
          edges_[head].push_back({to, ctx == Edge::Aggregate ? Edge::Aggregate : Edge::Negative, &lit.loc});
          break;
        }
        case core::Literal::Kind::Constraint: break;
        case core::Literal::Kind::Reduce:
          for (const auto& c : lit.reduce->body) add(head, c, Edge::Aggregate, loc);
          for (const auto& c : lit.reduce->group_body) add(head, c, Edge::Aggregate, loc);
          break;
      }
    }
  }

  void connect(std::size_t v) {
    index_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = true;
    for (const auto& d : edges_[v]) {
      const std::size_t w = d.target;
      if (index_[w] == kUnvisited) {
        connect(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] != index_[v]) return;
    std::vector<std::size_t> comp;
    std::size_t w;
    do {
      w = stack_.back();
      stack_.pop_back();
      on_stack_[w] = false;
      component_[w] = components_.size();
      comp.push_back(w);
    } while (w != v);
    components_.push_back(std::move(comp));
  }

  /// `from -> to -> ... -> from` within one component.
  std::string cycle(std::size_t from, std::size_t to) const {
    std::map<std::size_t, std::size_t> prev;
    std::deque<std::size_t> queue{to};
    prev[to] = to;
    while (!queue.empty() && !prev.count(from)) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (const auto& d : edges_[v]) {
        if (component_[d.target] != component_[from] || prev.count(d.target)) continue;
        prev[d.target] = v;
        queue.push_back(d.target);
      }
    }
    std::vector<std::size_t> back;
    for (std::size_t v = from; v != to; v = prev.at(v)) back.push_back(v);
    back.push_back(to);
    std::string out = names_[from];
    for (std::size_t i = back.size(); i-- > 0;) out += " -> " + names_[back[i]];
    return out;
  }

  std::map<std::string, std::size_t> ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<Dependency>> edges_;
  std::vector<std::size_t> index_, low_, component_, stack_;
  std::vector<bool> on_stack_;
  std::vector<std::vector<std::size_t>> components_;
  std::size_t counter_ = 0;
};

}  // namespace

std::vector<std::vector<std::string>> stratify(const core::Program& program) {
  return Graph(program).strata(program);
}

}  // namespace tagdl
