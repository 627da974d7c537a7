#pragma once

// Surface syntax: the core calculus plus sugar (sequencing, increment,
// assert, multi-parameter functions, general application), with names still
// unresolved. `desugar` resolves names and produces core terms.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hobmc/syntax.hpp"

namespace hobmc {

enum class SurfaceKind {
  Fail,
  Ident,
  Int,
  Unit,
  Assign,
  Deref,
  Incr,
  BinOp,
  Pair,
  Proj,
  App,
  If,
  Let,
  Letrec,
  Lambda,
  Seq,
  Assert,
};

struct Param {
  std::string name;
  Type type;
};

struct SurfaceTerm;
using SurfacePtr = std::shared_ptr<const SurfaceTerm>;

struct SurfaceTerm {
  SurfaceKind kind = SurfaceKind::Unit;
  std::string ident;  // Ident, Assign/Deref/Incr reference, Let/Letrec binder
  Type annot;         // Let/Letrec binder type; Proj argument type
  std::vector<Param> params;  // Lambda / Letrec parameters
  std::int64_t value = 0;
  BinOpKind op = BinOpKind::Add;
  int index = 0;
  /// App: head then arguments. If: cond, then, else. Let/Letrec: bound, body.
  std::vector<SurfacePtr> kids;
  SourceLoc loc;
};

class ElaborationError : public std::runtime_error {
 public:
  ElaborationError(SourceLoc loc, const std::string& msg);
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

/// Name-resolution state shared by every body of one program: declared
/// references and methods, the global one-name-one-type table for variables,
/// and the set of identifiers already taken (so generated names never clash).
class DesugarContext {
 public:
  DesugarContext(std::map<std::string, Name> refs, std::map<std::string, Name> methods,
                 std::set<std::string> reserved);

  /// Introduces a binder for the source identifier `source`. Enforces the
  /// global same-type rule and renames apart so all binders are distinct.
  Name bind(const std::string& source, const Type& t, SourceLoc loc);
  /// Registers a free variable (Main parameter); keeps its spelling.
  Name declare_free(const std::string& source, const Type& t, SourceLoc loc);
  Name fresh(const std::string& prefix, const Type& t);

  void push_scope() { scopes_.emplace_back(); }
  void pop_scope() { scopes_.pop_back(); }
  void add_to_scope(const std::string& source, const Name& n) { scopes_.back()[source] = n; }

  const Name* lookup_var(const std::string& source) const;
  const Name* lookup_method(const std::string& source) const;
  const Name& lookup_ref(const std::string& source, SourceLoc loc) const;

 private:
  void check_type(const std::string& source, const Type& t, SourceLoc loc);
  std::string unused(const std::string& base);

  std::map<std::string, Name> refs_;
  std::map<std::string, Name> methods_;
  std::map<std::string, Type> var_types_;
  std::set<std::string> taken_;
  std::set<std::string> bound_once_;
  std::set<std::string> free_;
  unsigned fresh_counter_ = 0;
  std::vector<std::map<std::string, Name>> scopes_;
};

/// Elaborates a surface term into a core term: resolves identifiers, expands
/// `M;N`, `r++`, `assert(M)`, multi-parameter lambdas and n-ary or
/// non-name-headed applications, and gives each `fail` its type from the
/// expected type (Unit when nothing constrains it).
TermPtr desugar(const SurfacePtr& t, DesugarContext& ctx, const std::optional<Type>& expected = std::nullopt);

}  // namespace hobmc
