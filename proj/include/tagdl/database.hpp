#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tagdl/value.hpp"

namespace tagdl {

/// `t :: u`
template <class Tag>
struct TaggedTuple {
  Tuple tuple;
  Tag tag;
};

/// Multiset of tagged tuples as produced by expression evaluation; duplicates
/// are merged only by normalization.
template <class Tag>
using TaggedTuples = std::vector<TaggedTuple<Tag>>;

/// `U_T ⊨ u`: some tag is attached to `u`, whatever its value.
template <class Tag>
bool contains(const TaggedTuples<Tag>& tuples, const Tuple& u) {
  for (const auto& tt : tuples) {
    if (tt.tuple == u) return true;
  }
  return false;
}

/// Facts under one predicate, at most one tag per tuple, iterated in
/// canonical tuple order.
template <class Tag>
using Relation = std::map<Tuple, Tag>;

class SealedDatabaseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Tagged facts keyed by predicate, plus the signatures they conform to.
template <class Tag>
class Database {
 public:
  void declare(const std::string& name, RelationSignature sig) {
    check_mutable();
    signatures_[name] = std::move(sig);
    relations_.try_emplace(name);
  }

  const RelationSignature* signature(const std::string& name) const {
    auto it = signatures_.find(name);
    return it == signatures_.end() ? nullptr : &it->second;
  }

  /// Inserts or overwrites the tag of `p(u)`. Throws when the tuple does not
  /// conform to a declared signature.
  void insert(const std::string& name, Tuple u, Tag tag) {
    check_mutable();
    if (const auto* sig = signature(name); sig && !sig->conforms(u)) {
      throw std::invalid_argument("tuple " + to_string(u) + " does not conform to relation " + name);
    }
    relations_[name].insert_or_assign(std::move(u), std::move(tag));
  }

  /// `F_T[p]`; empty when the predicate is unknown.
  const Relation<Tag>& relation(const std::string& name) const {
    static const Relation<Tag> kEmpty;
    auto it = relations_.find(name);
    return it == relations_.end() ? kEmpty : it->second;
  }

  Relation<Tag>& mutable_relation(const std::string& name) {
    check_mutable();
    return relations_[name];
  }

  TaggedTuples<Tag> lookup(const std::string& name) const {
    TaggedTuples<Tag> out;
    for (const auto& [u, t] : relation(name)) out.push_back({u, t});
    return out;
  }

  const std::map<std::string, Relation<Tag>>& relations() const { return relations_; }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, r] : relations_) n += r.size();
    return n;
  }

  /// After sealing the database is a read-only snapshot.
  void seal() { sealed_ = true; }
  bool sealed() const { return sealed_; }

 private:
  void check_mutable() const {
    if (sealed_) throw SealedDatabaseError("database is sealed");
  }

  std::map<std::string, Relation<Tag>> relations_;
  std::map<std::string, RelationSignature> signatures_;
  bool sealed_ = false;
};

}  // namespace tagdl
