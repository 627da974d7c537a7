#pragma once

// Propositional formulas over typed logical variables whose values may also
// be fail or nil, and their SMT-LIB 2 rendering.
//
// Encoding: every source type T gets a datatype V_<T> with one payload
// constructor plus Fail_<T> and Nil_<T>:
//   V_unit        Unit_unit
//   V_int         (Int_int (val_int Int))
//   V_pair_a_b    (Pair_pair_a_b (fst_pair_a_b V_a) (snd_pair_a_b V_b))
//   V_fun_a_b     (Meth_fun_a_b (id_fun_a_b Int))   ; global method id

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hobmc/syntax.hpp"

namespace hobmc {

class SortMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UndeclaredVariable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LogVar {
  std::string name;
  Type sort;
  friend bool operator==(const LogVar& a, const LogVar& b) { return a.name == b.name; }
  friend auto operator<=>(const LogVar& a, const LogVar& b) { return a.name <=> b.name; }
};

struct Expr;
struct Formula;
using ExprPtr = std::shared_ptr<const Expr>;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class ExprKind { Var, Int, Unit, Fail, Nil, Meth, Pair, Proj, Arith, Ite };

struct Expr {
  ExprKind kind = ExprKind::Unit;
  Type sort;
  std::string var;        // Var
  std::int64_t value = 0;  // Int literal, Meth id
  int index = 0;           // Proj
  BinOpKind op = BinOpKind::Add;
  FormulaPtr cond;  // Ite
  ExprPtr a, b;
};

enum class FormulaKind { True, False, Eq, NotEq, And, Or, Implies, Not, IntCmp };

struct Formula {
  FormulaKind kind = FormulaKind::True;
  ExprPtr lhs, rhs;   // Eq, NotEq, IntCmp
  BinOpKind op = BinOpKind::Eq;  // IntCmp
  std::vector<FormulaPtr> parts;  // And, Or; Implies = {premise, conclusion}; Not = {f}
};

namespace fm {
ExprPtr var(const LogVar& v);
ExprPtr integer(std::int64_t i);
ExprPtr unit();
ExprPtr fail(const Type& sort);
ExprPtr nil(const Type& sort);
ExprPtr meth(std::int64_t id, const Type& sort);
ExprPtr pair(ExprPtr a, ExprPtr b);
ExprPtr proj(int index, ExprPtr e);
ExprPtr arith(BinOpKind op, ExprPtr a, ExprPtr b);
ExprPtr ite(FormulaPtr cond, ExprPtr a, ExprPtr b);

FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr eq(ExprPtr a, ExprPtr b);
FormulaPtr neq(ExprPtr a, ExprPtr b);
FormulaPtr conj(std::vector<FormulaPtr> parts);
FormulaPtr disj(std::vector<FormulaPtr> parts);
FormulaPtr implies(FormulaPtr premise, FormulaPtr conclusion);
FormulaPtr negate(FormulaPtr f);
/// Comparison of integer payloads, `op` a comparison operator.
FormulaPtr int_cmp(BinOpKind op, ExprPtr a, ExprPtr b);
}  // namespace fm

/// F a b phi: propagate fail and nil from a to b, otherwise require phi.
FormulaPtr guard_F(const LogVar& a, const LogVar& b, FormulaPtr phi);

/// Over-approximation of whether fail / nil can reach a result.
enum class Q : unsigned { Zero = 0, Nil = 1, Fail = 2, Both = 3 };
inline Q operator+(Q a, Q b) { return static_cast<Q>(static_cast<unsigned>(a) | static_cast<unsigned>(b)); }
inline Q& operator+=(Q& a, Q b) { return a = a + b; }
const char* to_string(Q q);

/// F with only the propagation conjuncts that q allows. prune_F(.., Both)
/// is exactly guard_F.
FormulaPtr prune_F(const LogVar& a, const LogVar& b, FormulaPtr phi, Q q);

struct SmtMethod {
  std::int64_t id;
  std::string name;
  Type sort;
};

/// Writes a complete SMT-LIB 2 script. Datatypes are declared for every sort
/// used by a declaration or method (and their components) in dependency
/// order; constants in the given order.
std::string emit_smtlib(const std::vector<LogVar>& decls, const std::vector<SmtMethod>& methods,
                        const std::vector<FormulaPtr>& phi, const FormulaPtr& query);

/// S-expression of a single formula / expression (for dumps and tests).
std::string to_smt(const FormulaPtr& f);
std::string to_smt(const ExprPtr& e);

/// `x` or `|x|` depending on whether x is a simple SMT-LIB symbol.
std::string smt_symbol(const std::string& name);
std::string sort_name(const Type& t);

/// Names the encoding itself uses; user-facing names must avoid them.
bool clashes_with_encoding(const std::string& name);

/// Variables occurring in a formula.
void collect_vars(const FormulaPtr& f, std::vector<std::string>& out);

}  // namespace hobmc
