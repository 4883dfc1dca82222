#include <algorithm>
#include <map>
#include <unordered_map>

#include "tagdl/formula.hpp"

namespace tagdl {

namespace {

using Clauses = std::vector<std::vector<Literal>>;

/// Shannon expansion with memoization on canonical sub-formulas.
class ModelCounter {
 public:
  ModelCounter(const VariableMap& vars, bool mutual_exclusion)
      : vars_(vars), mutual_exclusion_(mutual_exclusion), n_(vars.size()) {
    if (mutual_exclusion_) {
      for (std::uint32_t v = 0; v < vars_.size(); ++v) {
        if (auto g = vars_.group_of(v)) members_[*g].push_back(v);
      }
    }
  }

  DualNumber count(Clauses f) {
    canonicalize(f);
    return count_canonical(f);
  }

 private:
  static void canonicalize(Clauses& f) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }

  /// Applies an assignment to a subset of variables. Returns true when some
  /// proof became empty, i.e. the conditioned formula is valid.
  static bool condition(const Clauses& f, const std::vector<std::pair<std::uint32_t, bool>>& assignment,
                        Clauses& out) {
    out.clear();
    for (const auto& proof : f) {
      std::vector<Literal> rest;
      bool dead = false;
      for (const auto& l : proof) {
        auto it = std::find_if(assignment.begin(), assignment.end(), [&](const auto& a) { return a.first == l.var; });
        if (it == assignment.end()) {
          rest.push_back(l);
        } else if (it->second == l.negated) {
          dead = true;
          break;
        }
      }
      if (dead) continue;
      if (rest.empty()) return true;
      out.push_back(std::move(rest));
    }
    canonicalize(out);
    return false;
  }

  DualNumber count_canonical(const Clauses& f) {
    if (f.empty()) return DualNumber::constant(0.0, n_);
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;

    std::map<std::uint32_t, std::size_t> freq;
    for (const auto& proof : f) {
      for (const auto& l : proof) ++freq[l.var];
    }
    std::uint32_t pivot = freq.begin()->first;
    std::size_t best = 0;
    for (const auto& [v, c] : freq) {
      if (c > best) {
        best = c;
        pivot = v;
      }
    }

    std::optional<std::uint64_t> group;
    if (mutual_exclusion_) group = vars_.group_of(pivot);
    DualNumber result = group ? expand_group(f, *group, freq) : expand_variable(f, pivot);
    memo_.emplace(f, result);
    return result;
  }

  DualNumber branch(const Clauses& f, const std::vector<std::pair<std::uint32_t, bool>>& assignment) {
    Clauses sub;
    if (condition(f, assignment, sub)) return DualNumber::constant(1.0, n_);
    return count_canonical(sub);
  }

  DualNumber expand_variable(const Clauses& f, std::uint32_t v) {
    const double r = vars_.probs.at(v);
    DualNumber hi = branch(f, {{v, true}});
    DualNumber lo = branch(f, {{v, false}});
    DualNumber out = DualNumber::constant(r * hi.prob + (1.0 - r) * lo.prob, n_);
    for (std::size_t i = 0; i < n_; ++i) out.grad[i] = r * hi.grad[i] + (1.0 - r) * lo.grad[i];
    out.grad[v] += hi.prob - lo.prob;
    return out;
  }

  /// Categorical expansion over the members of one exclusion group: exactly
  /// one member holds, or none does. Weights are r_j / Z with
  /// Z = max(1, Σ r) taken over the whole group.
  DualNumber expand_group(const Clauses& f, std::uint64_t group, const std::map<std::uint32_t, std::size_t>& freq) {
    const auto& all = members_.at(group);
    double total = 0.0;
    for (auto m : all) total += vars_.probs[m];
    const bool normalized = total > 1.0;
    const double z = normalized ? total : 1.0;

    std::vector<std::uint32_t> present;
    for (auto m : all) {
      if (freq.count(m)) present.push_back(m);
    }

    std::vector<std::pair<std::uint32_t, bool>> none;
    for (auto m : present) none.emplace_back(m, false);
    DualNumber rest = branch(f, none);

    DualNumber out = DualNumber::constant(0.0, n_);
    double rest_weight = 1.0;
    std::vector<double> diffs;
    for (auto j : present) {
      auto assignment = none;
      for (auto& a : assignment) a.second = a.first == j;
      DualNumber pj = branch(f, assignment);
      const double w = vars_.probs[j] / z;
      rest_weight -= w;
      out.prob += w * pj.prob;
      for (std::size_t i = 0; i < n_; ++i) out.grad[i] += w * pj.grad[i];
      diffs.push_back(pj.prob - rest.prob);
    }
    rest_weight = std::max(rest_weight, 0.0);
    out.prob += rest_weight * rest.prob;
    for (std::size_t i = 0; i < n_; ++i) out.grad[i] += rest_weight * rest.grad[i];

    // ∂P/∂r_i = Σ_j ∂w_j/∂r_i · (P_j − P_rest)
    for (std::size_t idx = 0; idx < present.size(); ++idx) {
      const auto j = present[idx];
      if (!normalized) {
        out.grad[j] += diffs[idx];
        continue;
      }
      const double rj = vars_.probs[j];
      for (auto i : all) {
        const double dw = (i == j ? 1.0 / z : 0.0) - rj / (z * z);
        out.grad[i] += dw * diffs[idx];
      }
    }
    return out;
  }

  const VariableMap& vars_;
  bool mutual_exclusion_;
  std::size_t n_;
  std::map<std::uint64_t, std::vector<std::uint32_t>> members_;
  std::map<Clauses, DualNumber> memo_;
};

}  // namespace

DualNumber wmc(const DnfFormula& f, const VariableMap& vars, bool mutual_exclusion) {
  const std::size_t n = vars.size();
  if (f.is_false()) return DualNumber::constant(0.0, n);
  if (f.is_true()) return DualNumber::constant(1.0, n);
  Clauses clauses;
  clauses.reserve(f.size());
  for (const auto& p : f.proofs()) clauses.push_back(p.literals());
  return ModelCounter(vars, mutual_exclusion).count(std::move(clauses));
}

}  // namespace tagdl
