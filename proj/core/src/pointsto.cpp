#include "hobmc/pointsto.hpp"

#include <algorithm>

#include "json.hpp"

namespace hobmc {

PtsSet pts_of_value(const Value& v) {
  switch (v.kind) {
    case ValueKind::Meth:
      return PtsSet::names({v.name});
    case ValueKind::Pair: {
      Type t = type_of(v);
      if (t.is_ground()) return PtsSet{};
      return PtsSet::pair(pts_of_value(v.first()), pts_of_value(v.second()));
    }
    default:
      return PtsSet{};
  }
}

PtMap initial_pt(const Config& c) {
  PtMap pt;
  for (const auto& [r, v] : c.store) pt.emplace(r, pts_of_value(v));
  for (const auto& x : free_vars(c.term)) pt.emplace(x, PtsSet::empty_for(x.type));
  return pt;
}

PtAnalysis pt_analyze(const TermPtr& term, const Repository& repo, const PtMap& pt, Bound k,
                      const std::vector<Name>& refs) {
  SymbolicConfig sc;
  sc.term = term;
  sc.repo = repo;
  sc.C = SSAMap(refs);
  sc.D = sc.C;
  sc.bound = k;
  OptTranslation t = translate_with_pt(sc, pt);
  return PtAnalysis{t.result.ret, t.A, t.result.repo, t.pt};
}

OptTranslation translate_opt(const SymbolicConfig& sc, const PtMap& pt, const TranslateOptions& opts) {
  return translate_with_pt(sc, pt, opts);
}

namespace {

nlohmann::json to_json(const PtsSet& a, const std::map<Name, std::int64_t>& ids) {
  if (a.is_pair()) return nlohmann::json::array({to_json(a.first(), ids), to_json(a.second(), ids)});
  std::vector<std::int64_t> out;
  for (const auto& m : a.names()) {
    auto it = ids.find(m);
    out.push_back(it == ids.end() ? -1 : it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string pt_to_json(const PtMap& pt, const std::map<Name, std::int64_t>& ids) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [n, a] : pt) j[n.id] = to_json(a, ids);
  return j.dump(2);
}

}  // namespace hobmc
