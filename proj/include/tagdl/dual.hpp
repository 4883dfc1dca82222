#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace tagdl {

/// A probability paired with its dense gradient with respect to the n input
/// probabilities of an evaluation.
struct DualNumber {
  double prob = 0.0;
  std::vector<double> grad;

  DualNumber() = default;
  DualNumber(double p, std::vector<double> g) : prob(p), grad(std::move(g)) {}

  static DualNumber constant(double p, std::size_t n) { return {p, std::vector<double>(n, 0.0)}; }
  /// `(r_i, ê_i)`
  static DualNumber variable(double p, std::size_t i, std::size_t n) {
    DualNumber d = constant(p, n);
    d.grad.at(i) = 1.0;
    return d;
  }

  std::size_t dim() const { return grad.size(); }

  friend bool operator==(const DualNumber&, const DualNumber&) = default;
};

namespace detail {
inline void check_dims(const DualNumber& a, const DualNumber& b) {
  if (a.grad.size() != b.grad.size()) throw std::logic_error("dual number gradient length mismatch");
}
}  // namespace detail

/// Componentwise sum; no clamping.
inline DualNumber dual_add(const DualNumber& a, const DualNumber& b) {
  detail::check_dims(a, b);
  DualNumber r{a.prob + b.prob, a.grad};
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] += b.grad[i];
  return r;
}

/// Product rule.
inline DualNumber dual_mult(const DualNumber& a, const DualNumber& b) {
  detail::check_dims(a, b);
  DualNumber r{a.prob * b.prob, std::vector<double>(a.grad.size())};
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = b.prob * a.grad[i] + a.prob * b.grad[i];
  return r;
}

inline DualNumber dual_neg(const DualNumber& a) {
  DualNumber r{-a.prob, a.grad};
  for (auto& g : r.grad) g = -g;
  return r;
}

/// `1̂ - a`
inline DualNumber dual_complement(const DualNumber& a) {
  DualNumber r = dual_neg(a);
  r.prob += 1.0;
  return r;
}

/// Returns whichever argument has the smaller probability; the first on ties.
inline const DualNumber& dual_min(const DualNumber& a, const DualNumber& b) {
  detail::check_dims(a, b);
  return b.prob < a.prob ? b : a;
}

/// Returns whichever argument has the larger probability; the first on ties.
inline const DualNumber& dual_max(const DualNumber& a, const DualNumber& b) {
  detail::check_dims(a, b);
  return b.prob > a.prob ? b : a;
}

/// Clips the probability into [0, 1] and keeps the gradient untouched.
inline DualNumber dual_clamp(DualNumber a) {
  a.prob = std::clamp(a.prob, 0.0, 1.0);
  return a;
}

inline std::ostream& operator<<(std::ostream& os, const DualNumber& d) {
  os << '(' << d.prob << ", [";
  for (std::size_t i = 0; i < d.grad.size(); ++i) os << (i ? ", " : "") << d.grad[i];
  return os << "])";
}

}  // namespace tagdl
