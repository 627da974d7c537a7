#include "hobmc/pts.hpp"

namespace hobmc {

PtsSet PtsSet::names(std::set<Name> ms) {
  PtsSet p;
  p.names_ = std::move(ms);
  return p;
}

PtsSet PtsSet::pair(PtsSet a, PtsSet b) {
  PtsSet p;
  p.pair_ = std::make_shared<const std::pair<PtsSet, PtsSet>>(std::move(a), std::move(b));
  return p;
}

PtsSet PtsSet::empty_for(const Type& t) {
  if (t.is_prod() && !t.is_ground()) return pair(empty_for(t.left()), empty_for(t.right()));
  return PtsSet{};
}

bool PtsSet::empty() const {
  if (pair_) return pair_->first.empty() && pair_->second.empty();
  return names_.empty();
}

const std::set<Name>& PtsSet::names() const {
  if (pair_) throw ShapeMismatch("points-to pair used as a name set");
  return names_;
}

const PtsSet& PtsSet::first() const {
  if (!pair_) throw ShapeMismatch("name set used as a points-to pair");
  return pair_->first;
}

const PtsSet& PtsSet::second() const {
  if (!pair_) throw ShapeMismatch("name set used as a points-to pair");
  return pair_->second;
}

PtsSet PtsSet::project(int index) const {
  if (!pair_) {
    if (!names_.empty()) throw ShapeMismatch("projection of a non-empty name set");
    return PtsSet{};
  }
  return index == 1 ? pair_->first : pair_->second;
}

std::string PtsSet::str() const {
  if (pair_) return "<" + pair_->first.str() + ", " + pair_->second.str() + ">";
  std::string s = "{";
  bool first = true;
  for (const auto& m : names_) {
    s += (first ? "" : ", ") + m.id;
    first = false;
  }
  return s + "}";
}

bool operator==(const PtsSet& a, const PtsSet& b) {
  if (a.is_pair() != b.is_pair()) return a.empty() && b.empty();
  if (a.is_pair()) return a.first() == b.first() && a.second() == b.second();
  return a.names_ == b.names_;
}

PtsSet pts_union(const PtsSet& a, const PtsSet& b) {
  if (a.is_pair() && b.is_pair()) return PtsSet::pair(pts_union(a.first(), b.first()), pts_union(a.second(), b.second()));
  if (!a.is_pair() && !b.is_pair()) {
    std::set<Name> u = a.names();
    u.insert(b.names().begin(), b.names().end());
    return PtsSet::names(std::move(u));
  }
  // An empty name set (from nil, fail or a ground value) is the unit of union.
  if (!a.is_pair() && a.empty()) return b;
  if (!b.is_pair() && b.empty()) return a;
  throw ShapeMismatch("union of " + a.str() + " and " + b.str());
}

PtMap pt_merge(const std::vector<PtMap>& maps) {
  PtMap out;
  for (const auto& m : maps) {
    for (const auto& [k, v] : m) {
      auto it = out.find(k);
      if (it == out.end()) {
        out.emplace(k, v);
      } else {
        it->second = pts_union(it->second, v);
      }
    }
  }
  return out;
}

}  // namespace hobmc
