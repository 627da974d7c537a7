#pragma once

// Core abstract syntax of the higher-order language with global references:
// intrinsically typed names, terms, values, method repositories, stores and
// configurations.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hobmc {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind { Unit, Int, Prod, Arrow };

/// Simple type. Immutable, shared, compared structurally through a canonical
/// spelling computed at construction.
class Type {
 public:
  Type() = default;

  static Type unit();
  static Type integer();
  static Type prod(Type left, Type right);
  static Type arrow(Type domain, Type codomain);

  bool valid() const { return node_ != nullptr; }
  TypeKind kind() const;
  /// Left component of a product or domain of an arrow.
  const Type& left() const;
  /// Right component of a product or codomain of an arrow.
  const Type& right() const;

  bool is_ground() const;
  bool is_arrow() const { return valid() && kind() == TypeKind::Arrow; }
  bool is_prod() const { return valid() && kind() == TypeKind::Prod; }

  /// Surface spelling, e.g. `Int -> (Int * Unit)`.
  const std::string& str() const;
  /// Identifier-safe prefix spelling used for SMT sort names, e.g.
  /// `fun_int_pair_int_unit`.
  const std::string& mangled() const;

  friend bool operator==(const Type& a, const Type& b);
  friend std::strong_ordering operator<=>(const Type& a, const Type& b);

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

enum class NameKind { Var, Ref, Meth };

/// A typed name. The three kinds are disjoint namespaces and a name keeps its
/// type for its whole lifetime.
struct Name {
  NameKind kind = NameKind::Var;
  std::string id;
  Type type;

  static Name var(std::string id, Type t) { return {NameKind::Var, std::move(id), std::move(t)}; }
  static Name ref(std::string id, Type t) { return {NameKind::Ref, std::move(id), std::move(t)}; }
  static Name meth(std::string id, Type t) { return {NameKind::Meth, std::move(id), std::move(t)}; }

  bool empty() const { return id.empty(); }

  friend bool operator==(const Name& a, const Name& b) {
    return a.kind == b.kind && a.id == b.id && a.type == b.type;
  }
  friend std::strong_ordering operator<=>(const Name& a, const Name& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.id <=> b.id; c != 0) return c;
    return a.type <=> b.type;
  }
};

std::string to_string(const Name& n);

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

enum class TermKind {
  Fail,
  Var,
  Meth,
  Int,
  Unit,
  Assign,
  Deref,
  BinOp,
  Pair,
  Proj,
  AppVar,
  AppMeth,
  If,
  Let,
  Letrec,
  Lambda,
};

enum class BinOpKind { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

const char* to_string(BinOpKind op);
bool is_comparison(BinOpKind op);

struct SourceLoc {
  int line = 0;
  int column = 0;
  bool known() const { return line > 0; }
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// One node of the core calculus. Built only through the factory functions in
/// namespace `mk`; immutable afterwards.
struct Term {
  TermKind kind = TermKind::Unit;
  /// Var / Meth / AppVar head / AppMeth head / bound variable of Let and
  /// Lambda / recursive name of Letrec / reference of Assign and Deref.
  Name name;
  /// Parameter of a Letrec lambda.
  Name param;
  std::int64_t value = 0;  // Int literal
  BinOpKind op = BinOpKind::Add;
  int index = 0;  // Proj: 1 or 2
  Type fail_type;  // Fail
  std::array<TermPtr, 3> kids{};
  SourceLoc loc;
  /// Stable syntactic site; copies made by substitution keep it.
  std::uint32_t site = 0;
  /// AppMeth produced by substituting a method value for an applied variable.
  bool via_var = false;

  const TermPtr& kid(std::size_t i) const { return kids[i]; }
};

namespace mk {
TermPtr fail(Type t);
TermPtr var(Name x);
TermPtr meth(Name m);
TermPtr integer(std::int64_t i);
TermPtr unit();
TermPtr assign(Name r, TermPtr rhs);
TermPtr deref(Name r);
TermPtr binop(BinOpKind op, TermPtr a, TermPtr b);
TermPtr pair(TermPtr a, TermPtr b);
TermPtr proj(int index, TermPtr t);
TermPtr app_var(Name x, TermPtr arg);
TermPtr app_meth(Name m, TermPtr arg);
TermPtr ite(TermPtr cond, TermPtr then_branch, TermPtr else_branch);
TermPtr let(Name x, TermPtr bound, TermPtr body);
TermPtr letrec(Name f, Name x, TermPtr fn_body, TermPtr body);
TermPtr lambda(Name x, TermPtr body);

/// Copy of `t` with location and site information replaced.
TermPtr located(const TermPtr& t, SourceLoc loc, std::uint32_t site);
}  // namespace mk

/// Allocates a fresh syntactic site id (process-wide, thread-safe).
std::uint32_t next_site();

/// Structural equality ignoring locations and sites.
bool same_term(const TermPtr& a, const TermPtr& b);

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

enum class ValueKind { Var, Meth, Int, Unit, Pair };

struct Value {
  ValueKind kind = ValueKind::Unit;
  Name name;  // Var / Meth
  std::int64_t i = 0;
  std::shared_ptr<const std::array<Value, 2>> components;

  static Value var(Name x);
  static Value meth(Name m);
  static Value integer(std::int64_t i);
  static Value unit();
  static Value pair(Value a, Value b);

  const Value& first() const { return (*components)[0]; }
  const Value& second() const { return (*components)[1]; }

  friend bool operator==(const Value& a, const Value& b);
};

std::string to_string(const Value& v);
TermPtr to_term(const Value& v);
/// Returns the value a term denotes when the term is syntactically a value.
std::optional<Value> as_value(const TermPtr& t);
Type type_of(const Value& v);

// ---------------------------------------------------------------------------
// Repository, store, configuration
// ---------------------------------------------------------------------------

struct MethodDef {
  Name param;
  TermPtr body;
  /// Site of the lambda / letrec / declaration that created the method.
  std::uint32_t origin = 0;
};

/// Finite map from method names to lambda abstractions. Remembers insertion
/// order so repositories produced by the same run can be matched positionally.
class Repository {
 public:
  void insert(const Name& m, MethodDef def);
  bool contains(const Name& m) const { return defs_.count(m) != 0; }
  const MethodDef& at(const Name& m) const;
  const MethodDef* find(const Name& m) const;
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  /// Names in insertion order.
  const std::vector<Name>& names() const { return order_; }
  /// Names of the given arrow type, in insertion order.
  std::vector<Name> names_of_type(const Type& t) const;

  friend bool operator==(const Repository& a, const Repository& b);

 private:
  std::vector<Name> order_;
  std::map<Name, MethodDef> defs_;
};

using Store = std::map<Name, Value>;

/// Call-depth bound: a natural number or the exhausted marker nil.
class Bound {
 public:
  Bound() = default;
  explicit Bound(unsigned k) : k_(k) {}
  static Bound nil() { return Bound{}; }

  bool is_nil() const { return !k_.has_value(); }
  unsigned value() const { return *k_; }
  /// k - 1, or nil when k is 0 or nil.
  Bound decremented() const;

  friend bool operator==(const Bound&, const Bound&) = default;

 private:
  std::optional<unsigned> k_;
};

std::string to_string(const Bound& b);

struct Config {
  TermPtr term;
  Repository repo;
  Store store;
  Bound bound;
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class TypeError : public std::runtime_error {
 public:
  TypeError(const std::string& what, TermPtr subterm)
      : std::runtime_error(what), subterm_(std::move(subterm)) {}
  const TermPtr& subterm() const { return subterm_; }

 private:
  TermPtr subterm_;
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { DanglingName, NonGroundFreeVar, IllTypedRepository, IllTypedStore, OpenRepository };
  ConfigError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// The unique type of a term. Names are intrinsically typed, so no context is
/// needed. Throws TypeError.
Type typecheck(const TermPtr& term);

struct ConfigReport {
  std::set<Name> free_vars;
  bool all_free_ground = true;
};

/// Checks repository and store typing and that every method and reference
/// occurring in the configuration is defined. Throws ConfigError on a dangling
/// name or an ill-typed entry, and on a non-ground free variable unless
/// `allow_higher_order_free` is set.
ConfigReport validate_config(const Config& c, bool allow_higher_order_free = false);

std::set<Name> free_vars(const TermPtr& t);
/// Methods and references occurring syntactically in a term.
void collect_names(const TermPtr& t, std::set<Name>& meths, std::set<Name>& refs);
void collect_names(const Value& v, std::set<Name>& meths);

/// Capture-avoiding only under the convention that replacements are closed or
/// fresh: substitutes `replacement` for free occurrences of variable `x`.
/// When the replacement is a method name, applications of `x` become known
/// method applications.
TermPtr substitute(const TermPtr& t, const Name& x, const TermPtr& replacement);
TermPtr substitute(const TermPtr& t, const std::map<Name, TermPtr>& sigma);

/// Applies a closing substitution of values to the term, repository bodies
/// and store.
Config close_config(const Config& c, const std::map<Name, Value>& sigma);

/// Pretty-prints a term in the concrete input syntax.
std::string print_term(const TermPtr& t);
std::string print_type(const Type& t);

}  // namespace hobmc
