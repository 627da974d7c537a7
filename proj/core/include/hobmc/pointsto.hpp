#pragma once

// Points-to analysis for method names and the translation it guides.

#include <string>
#include <vector>

#include "hobmc/pts.hpp"
#include "hobmc/syntax.hpp"
#include "hobmc/translate.hpp"

namespace hobmc {

/// Points-to set of a closed value.
PtsSet pts_of_value(const Value& v);

/// References start from their initial store value, free (ground) variables
/// from the empty set.
PtMap initial_pt(const Config& c);

struct PtAnalysis {
  LogVar ret;
  PtsSet A;
  Repository repo;
  PtMap pt;
};

/// PT(M, R, pt, k). Runs in lock-step with the guided translation, whose
/// formula is dropped.
PtAnalysis pt_analyze(const TermPtr& term, const Repository& repo, const PtMap& pt, Bound k,
                      const std::vector<Name>& refs = {});

/// Translation with `x M` restricted to pt(x).
OptTranslation translate_opt(const SymbolicConfig& sc, const PtMap& pt, const TranslateOptions& opts = {});

/// {"r": [ids...], "ret3": [...], ...}; pairs as two-element arrays.
std::string pt_to_json(const PtMap& pt, const std::map<Name, std::int64_t>& ids);

}  // namespace hobmc
