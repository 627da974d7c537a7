#pragma once

// Bounded SSA translation of configurations into formulas.
//
//   [[M, R, C, D, phi, k]] = (ret, phi', R', C', D')
//
// C counts assignments per reference along the whole translation, D is the
// version the current path reads. Results name a fresh `ret<n>` variable.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hobmc/formula.hpp"
#include "hobmc/pts.hpp"
#include "hobmc/syntax.hpp"

namespace hobmc {

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The base translation grows factorially on some programs.
class TranslationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference -> current SSA version.
class SSAMap {
 public:
  SSAMap() = default;
  /// Version 0 for every reference.
  explicit SSAMap(const std::vector<Name>& refs);

  unsigned version(const Name& r) const;
  LogVar at(const Name& r) const;
  void bump(const Name& r) { ++versions_.at(r); }
  void set(const Name& r, unsigned v) { versions_.at(r) = v; }
  std::vector<Name> domain() const;

  friend bool operator==(const SSAMap&, const SSAMap&) = default;

 private:
  std::map<Name, unsigned> versions_;
};

LogVar ssa_var(const Name& r, unsigned version);

struct SymbolicConfig {
  TermPtr term;
  Repository repo;
  SSAMap C;
  SSAMap D;
  std::vector<FormulaPtr> phi;
  Bound bound;
};

struct TranslateOptions {
  /// Replace every F by its pruned form (fail/nil reachability of the
  /// operand). Off reproduces the unpruned clauses.
  bool prune = true;
  /// Abort with TranslationLimit past this many clauses; 0 means no limit.
  std::size_t max_clauses = 0;
};

/// One non-deterministic application `x M`.
struct BranchStat {
  unsigned depth = 0;  // enclosing method applications
  std::size_t candidates = 0;
  std::uint32_t site = 0;
  /// Where each candidate method was created (MethodDef::origin).
  std::vector<std::uint32_t> origins;
};

struct ClauseInfo {
  std::string rule;
  SourceLoc loc;
  std::uint32_t site = 0;
};

struct TranslationStats {
  std::size_t vars = 0;
  std::size_t clauses = 0;
  std::size_t branches = 0;  // sum of candidates over all x M cases
  std::vector<BranchStat> applications;
  bool division = false;  // a div/mod whose divisor may be zero
};

struct TranslationResult {
  LogVar ret;
  /// Input clauses followed by the new ones.
  std::vector<FormulaPtr> phi;
  Repository repo;
  SSAMap C;
  SSAMap D;
  Q q = Q::Both;

  /// Everything the SMT script must declare, in creation order.
  std::vector<LogVar> decls;
  std::vector<SmtMethod> methods;
  /// Parallel to the new clauses (phi minus the input prefix).
  std::vector<ClauseInfo> clause_info;
  TranslationStats stats;
  /// Free variables of the input term (kept under their own names).
  std::vector<LogVar> inputs;
};

/// Steps 1 and 2 of checking: phi0 = AND (r_0 = S(r)), C0 = D0 = {r -> r_0}.
SymbolicConfig build_initial(const Config& c);

/// Base translation: `x M` ranges over every method of x's type.
TranslationResult translate(const SymbolicConfig& sc, const TranslateOptions& opts = {});

/// Points-to guided translation; also returns the final points-to set and map.
struct OptTranslation {
  TranslationResult result;
  PtsSet A;
  PtMap pt;
};
OptTranslation translate_with_pt(const SymbolicConfig& sc, const PtMap& pt, const TranslateOptions& opts = {});

/// Static over-approximation: fail literals contribute Fail, applications
/// contribute Nil, and an application may reach fail in any method body.
Q reachability_q(const TermPtr& term, const Repository& repo);

/// Integer id a method gets in formulas: its position in the repository.
std::map<Name, std::int64_t> method_ids(const Repository& repo);

/// Formula expression of a closed value (or one whose variables are logical).
ExprPtr value_expr(const Value& v, const std::map<Name, std::int64_t>& ids);

/// Clause listing with the rule and source position that produced each.
std::string dump_clauses(const TranslationResult& r);

}  // namespace hobmc
