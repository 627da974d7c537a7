#pragma once

// Shared helpers: corpus access, batched solver calls, the differential
// interpreter-vs-solver comparison and the translation lemma checks.

#include <map>
#include <string>
#include <vector>

#include "hobmc/checker.hpp"
#include "hobmc/parser.hpp"

namespace hobmc::testing {

std::string corpus_dir();
std::string corpus_file(const std::string& name);
std::vector<std::string> corpus_names();

bool solver_available();

/// One solver process answering every query against the same translation.
/// Each query is asserted on top of the formula inside push/pop.
std::vector<SolverStatus> solve_batch(const Prepared& p, const std::vector<FormulaPtr>& queries,
                                      const SolverConfig& cfg = {});

/// Every combination of values in [-radius, radius] for the Int inputs.
std::vector<std::map<Name, Value>> int_grid(const std::vector<Name>& inputs, int radius);

struct DiffReport {
  std::size_t runs = 0;       // (sigma, k) pairs compared
  std::size_t queries = 0;    // solver answers checked
  std::size_t excluded = 0;   // arithmetic faults
  std::vector<std::string> mismatches;
};

/// For each sigma: the interpreter outcome at bound k must be reflected by the
/// solver: ret=fail sat iff fail, ret=nil sat iff nil, and for ground values
/// ret != value unsat.
void differential(const std::string& label, const Config& c, const std::vector<std::map<Name, Value>>& grid,
                  unsigned k, bool opt, DiffReport& report, const SolverConfig& cfg = {});

/// Repository preservation and precondition propagation on one translation.
/// Returns an empty string on success, otherwise what failed.
std::string check_lemmas(const Config& c, bool opt, std::size_t max_clauses = 0);

}  // namespace hobmc::testing
