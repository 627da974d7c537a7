#pragma once

// Reference interpreter for the bounded big-step semantics, plus the nominal
// utilities (permutations of method names, equivalence up to permutation).

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "hobmc/syntax.hpp"

namespace hobmc {

enum class OutcomeKind { Val, Fail, Nil };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Nil;
  Value value;  // Val only
  Repository repo;
  Store store;
};

std::string to_string(const Outcome& o);

/// Supplier of fresh method names. Names depend on the seed, never collide
/// with the repository, and are never handed out twice.
class NameGen {
 public:
  explicit NameGen(std::uint64_t seed = 0) : rng_(seed) {}
  Name fresh(const Type& t, const Repository& repo);

 private:
  std::mt19937_64 rng_;
  std::set<std::string> issued_;
};

/// Evaluation reached a state no rule covers. On typechecked closed input this
/// is a defect.
class StuckState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Division by zero or int64 overflow. The solver's integers are unbounded,
/// so these runs are excluded from differential comparisons.
class ArithmeticFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Meta-level step limit exceeded. A harness problem, never an outcome.
class FuelExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A call `m v` whose head was a variable in the source.
struct ApplyEvent {
  std::uint32_t site = 0;  // the application
  Name method;
  std::uint32_t origin = 0;  // where the applied method was created
};

struct EvalOptions {
  std::uint64_t fuel = 5'000'000;
  std::ostream* trace = nullptr;
  std::function<void(const ApplyEvent&)> on_apply;
};

struct EvalStats {
  std::uint64_t steps = 0;
  unsigned max_call_depth = 0;
};

Outcome eval(const Config& c, NameGen& g, const EvalOptions& opts = {}, EvalStats* stats = nullptr);

/// Integer operators with the solver's semantics (Euclidean div/mod).
std::int64_t apply_binop(BinOpKind op, std::int64_t a, std::int64_t b);

// ---------------------------------------------------------------------------
// Nominal utilities
// ---------------------------------------------------------------------------

class TypeViolatingPermutation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finite permutation of method names. Unlisted names are fixed.
class Permutation {
 public:
  Permutation() = default;
  /// Checks bijectivity on its support and type preservation.
  explicit Permutation(std::map<Name, Name> mapping);
  static Permutation swap(const Name& a, const Name& b);

  const Name& operator()(const Name& m) const;

 private:
  std::map<Name, Name> map_;
};

Value apply_permutation(const Value& v, const Permutation& pi);
TermPtr apply_permutation(const TermPtr& t, const Permutation& pi);
Repository apply_permutation(const Repository& r, const Permutation& pi);
Store apply_permutation(const Store& s, const Permutation& pi);
Outcome apply_permutation(const Outcome& o, const Permutation& pi);

bool nominally_equiv(const Value& a, const Value& b, const std::set<Name>& delta);
bool nominally_equiv(const TermPtr& a, const TermPtr& b, const std::set<Name>& delta);
/// Repositories are matched positionally (insertion order), then values,
/// stores and method bodies structurally under the resulting bijection.
bool nominally_equiv(const Outcome& a, const Outcome& b, const std::set<Name>& delta);

}  // namespace hobmc
