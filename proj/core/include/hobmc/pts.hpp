#pragma once

// Points-to sets for method names. Shapes follow types: arrow and ground
// positions hold a set of names, non-ground products hold a pair of sets.

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hobmc/syntax.hpp"

namespace hobmc {

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MissingPtEntry : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class PtsSet {
 public:
  PtsSet() = default;  // empty Names
  static PtsSet names(std::set<Name> ms);
  static PtsSet pair(PtsSet a, PtsSet b);
  /// The empty set shaped for values of type t.
  static PtsSet empty_for(const Type& t);

  bool is_pair() const { return pair_ != nullptr; }
  bool empty() const;
  const std::set<Name>& names() const;
  const PtsSet& first() const;
  const PtsSet& second() const;
  /// Projection; the empty Names set projects to itself.
  PtsSet project(int index) const;

  std::string str() const;
  friend bool operator==(const PtsSet& a, const PtsSet& b);

 private:
  std::set<Name> names_;
  std::shared_ptr<const std::pair<PtsSet, PtsSet>> pair_;
};

PtsSet pts_union(const PtsSet& a, const PtsSet& b);

using PtMap = std::map<Name, PtsSet>;

PtMap pt_merge(const std::vector<PtMap>& maps);

}  // namespace hobmc
