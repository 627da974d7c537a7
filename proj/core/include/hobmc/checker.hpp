#pragma once

// The checking procedure: preconditions, translation, query, solver, model.

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hobmc/formula.hpp"
#include "hobmc/interp.hpp"
#include "hobmc/syntax.hpp"
#include "hobmc/translate.hpp"

namespace hobmc {

// ---------------------------------------------------------------------------
// Solver process
// ---------------------------------------------------------------------------

class SolverError : public std::runtime_error {
 public:
  enum class Kind { NotFound, Timeout, Crashed, Error };
  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SolverConfig {
  std::string path = "z3";
  double timeout_seconds = 10.0;
  bool keep_files = false;
  std::string temp_dir = "/tmp";
};

enum class SolverStatus { Sat, Unsat, Unknown };
const char* to_string(SolverStatus s);

struct SolverResult {
  SolverStatus status = SolverStatus::Unknown;
  std::string model_text;  // everything after the status line
  std::string raw;
  std::string file;  // kept script, if requested
  double seconds = 0;
};

/// Runs `<path> <file.smt2>` with a deadline; the process is killed when it
/// passes. Reads sat/unsat/unknown from the first output line.
SolverResult run_solver(const std::string& smtlib, const SolverConfig& cfg);

/// Several check-sat commands in one script; one status per command.
std::vector<SolverStatus> run_solver_batch(const std::string& smtlib, std::size_t expected, const SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

class ModelParseError : public std::runtime_error {
 public:
  ModelParseError(const std::string& what, std::string fragment)
      : std::runtime_error(what + ": " + fragment), fragment_(std::move(fragment)) {}
  const std::string& fragment() const { return fragment_; }

 private:
  std::string fragment_;
};

struct ModelValue {
  enum class Kind { Val, Fail, Nil, Unconstrained } kind = Kind::Unconstrained;
  Value value;
};

std::string to_string(const ModelValue& v);

using Assignment = std::map<std::string, ModelValue>;

/// Decodes the requested constants from a get-model answer. Method ids are
/// mapped back through `methods`; missing constants are Unconstrained.
Assignment parse_model(const std::string& model_text, const std::vector<LogVar>& wanted,
                       const std::vector<SmtMethod>& methods);

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

/// Predicate over an Int-sorted result, e.g. ret > 5 as {Gt, 5}.
struct IntPredicate {
  BinOpKind op = BinOpKind::Ge;
  std::int64_t value = 0;
  FormulaPtr holds(const ExprPtr& e) const;
};

struct CheckMode {
  enum class Kind { FailReach, NilReach, ReturnProp, StoreProp } kind = Kind::FailReach;
  IntPredicate ret_property;
  std::vector<std::pair<Name, IntPredicate>> store_properties;

  static CheckMode fail() { return {Kind::FailReach, {}, {}}; }
  static CheckMode nil() { return {Kind::NilReach, {}, {}}; }
  static CheckMode returns(IntPredicate p) { return {Kind::ReturnProp, p, {}}; }
  static CheckMode stores(std::vector<std::pair<Name, IntPredicate>> ps) { return {Kind::StoreProp, {}, std::move(ps)}; }
};

enum class VerdictKind { Sat, Unsat, Unknown, Verified, BoundReached };
const char* to_string(VerdictKind v);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  Assignment model;  // Main's inputs plus "ret"
  std::string reason;
};

struct CheckOptions {
  bool opt = true;
  bool prune = true;
  /// Passed to the translation; 0 for no limit.
  std::size_t max_clauses = 2'000'000;
  SolverConfig solver;
  /// Extra conjuncts, e.g. ofSig of an input assignment.
  std::vector<FormulaPtr> assumptions;
  /// Write the script here as well.
  std::string emit_smt;
};

/// A translated program ready for queries.
struct Prepared {
  TranslationResult tr;
  std::vector<Name> inputs;
  double translate_seconds = 0;
};

Prepared prepare(const Config& c, bool opt, bool prune, std::size_t max_clauses = 0);
FormulaPtr query_formula(const Prepared& p, const CheckMode& mode);
std::string smt_script(const Prepared& p, const CheckMode& mode, const std::vector<FormulaPtr>& assumptions);

struct CheckResult {
  Verdict verdict;
  TranslationStats stats;
  double translate_seconds = 0;
  double solve_seconds = 0;
  std::string smt;
};

CheckResult check(const Config& c, const CheckMode& mode, const CheckOptions& opts = {});
CheckResult check_prepared(const Prepared& p, const CheckMode& mode, const CheckOptions& opts = {});

/// (x = v) for each input, the assignment as a formula.
std::vector<FormulaPtr> of_sig(const std::map<Name, Value>& sigma, const Repository& repo);

/// Smallest value of Int input `x` (not below `lower`) for which the query is
/// satisfiable, by binary search on x <= c. Empty if unsat.
std::optional<std::int64_t> minimize(const Prepared& p, const CheckMode& mode, const Name& x, std::int64_t lower,
                                     std::int64_t upper, const CheckOptions& opts = {});

struct BoundStep {
  unsigned k = 0;
  VerdictKind fail = VerdictKind::Unknown;
  VerdictKind nil = VerdictKind::Unknown;  // Unknown when not asked
  double seconds = 0;
  std::string note;
};

struct IterateResult {
  Verdict verdict;  // Sat (counterexample), Verified, BoundReached or Unknown
  unsigned k = 0;   // bound of the final verdict
  std::vector<BoundStep> log;
};

/// k = 0..kmax: a fail counterexample stops, unsat nil verifies, otherwise
/// the bound grows. A solver timeout is logged and, unless `stop_on_timeout`,
/// skipped.
IterateResult bound_iterate(const Config& c, unsigned kmax, const CheckOptions& opts = {}, bool stop_on_timeout = false);

/// Closes the program with the model's input values and runs the interpreter.
Outcome replay(const Config& c, const std::vector<Name>& inputs, const Assignment& model, std::uint64_t seed = 0);

}  // namespace hobmc
