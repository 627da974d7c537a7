#include "hobmc/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hobmc {

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

void require_int(const ExprPtr& e, const char* what) {
  if (!(e->sort == Type::integer())) throw SortMismatch(std::string(what) + " needs an Int operand, got " + e->sort.str());
}

}  // namespace

namespace fm {

ExprPtr var(const LogVar& v) {
  Expr e;
  e.kind = ExprKind::Var;
  e.sort = v.sort;
  e.var = v.name;
  return make(std::move(e));
}

ExprPtr integer(std::int64_t i) {
  Expr e;
  e.kind = ExprKind::Int;
  e.sort = Type::integer();
  e.value = i;
  return make(std::move(e));
}

ExprPtr unit() {
  Expr e;
  e.kind = ExprKind::Unit;
  e.sort = Type::unit();
  return make(std::move(e));
}

ExprPtr fail(const Type& sort) {
  Expr e;
  e.kind = ExprKind::Fail;
  e.sort = sort;
  return make(std::move(e));
}

ExprPtr nil(const Type& sort) {
  Expr e;
  e.kind = ExprKind::Nil;
  e.sort = sort;
  return make(std::move(e));
}

ExprPtr meth(std::int64_t id, const Type& sort) {
  if (!sort.is_arrow()) throw SortMismatch("method constant of non-arrow sort " + sort.str());
  Expr e;
  e.kind = ExprKind::Meth;
  e.sort = sort;
  e.value = id;
  return make(std::move(e));
}

ExprPtr pair(ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = ExprKind::Pair;
  e.sort = Type::prod(a->sort, b->sort);
  e.a = std::move(a);
  e.b = std::move(b);
  return make(std::move(e));
}

ExprPtr proj(int index, ExprPtr p) {
  if (!p->sort.is_prod()) throw SortMismatch("projection from non-product sort " + p->sort.str());
  Expr e;
  e.kind = ExprKind::Proj;
  e.sort = index == 1 ? p->sort.left() : p->sort.right();
  e.index = index;
  e.a = std::move(p);
  return make(std::move(e));
}

ExprPtr arith(BinOpKind op, ExprPtr a, ExprPtr b) {
  require_int(a, to_string(op));
  require_int(b, to_string(op));
  Expr e;
  e.kind = ExprKind::Arith;
  e.sort = Type::integer();
  e.op = op;
  e.a = std::move(a);
  e.b = std::move(b);
  return make(std::move(e));
}

ExprPtr ite(FormulaPtr cond, ExprPtr a, ExprPtr b) {
  if (!(a->sort == b->sort)) throw SortMismatch("ite branches of sorts " + a->sort.str() + " and " + b->sort.str());
  Expr e;
  e.kind = ExprKind::Ite;
  e.sort = a->sort;
  e.cond = std::move(cond);
  e.a = std::move(a);
  e.b = std::move(b);
  return make(std::move(e));
}

FormulaPtr truth() {
  static const FormulaPtr t = make(Formula{});
  return t;
}

FormulaPtr falsity() {
  Formula f;
  f.kind = FormulaKind::False;
  return make(std::move(f));
}

FormulaPtr eq(ExprPtr a, ExprPtr b) {
  if (!(a->sort == b->sort)) throw SortMismatch("equation between " + a->sort.str() + " and " + b->sort.str());
  Formula f;
  f.kind = FormulaKind::Eq;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return make(std::move(f));
}

FormulaPtr neq(ExprPtr a, ExprPtr b) {
  if (!(a->sort == b->sort)) throw SortMismatch("disequation between " + a->sort.str() + " and " + b->sort.str());
  Formula f;
  f.kind = FormulaKind::NotEq;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return make(std::move(f));
}

FormulaPtr conj(std::vector<FormulaPtr> parts) {
  parts.erase(std::remove_if(parts.begin(), parts.end(), [](const FormulaPtr& p) { return p->kind == FormulaKind::True; }),
              parts.end());
  if (parts.empty()) return truth();
  if (parts.size() == 1) return parts.front();
  Formula f;
  f.kind = FormulaKind::And;
  f.parts = std::move(parts);
  return make(std::move(f));
}

FormulaPtr disj(std::vector<FormulaPtr> parts) {
  if (parts.empty()) return falsity();
  if (parts.size() == 1) return parts.front();
  Formula f;
  f.kind = FormulaKind::Or;
  f.parts = std::move(parts);
  return make(std::move(f));
}

FormulaPtr implies(FormulaPtr premise, FormulaPtr conclusion) {
  Formula f;
  f.kind = FormulaKind::Implies;
  f.parts = {std::move(premise), std::move(conclusion)};
  return make(std::move(f));
}

FormulaPtr negate(FormulaPtr g) {
  Formula f;
  f.kind = FormulaKind::Not;
  f.parts = {std::move(g)};
  return make(std::move(f));
}

FormulaPtr int_cmp(BinOpKind op, ExprPtr a, ExprPtr b) {
  if (!is_comparison(op)) throw std::invalid_argument(std::string("not a comparison: ") + to_string(op));
  require_int(a, to_string(op));
  require_int(b, to_string(op));
  Formula f;
  f.kind = FormulaKind::IntCmp;
  f.op = op;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return make(std::move(f));
}

}  // namespace fm

FormulaPtr guard_F(const LogVar& a, const LogVar& b, FormulaPtr phi) { return prune_F(a, b, std::move(phi), Q::Both); }

const char* to_string(Q q) {
  switch (q) {
    case Q::Zero:
      return "0";
    case Q::Nil:
      return "Nil";
    case Q::Fail:
      return "Fail";
    case Q::Both:
      return "Both";
  }
  return "?";
}

FormulaPtr prune_F(const LogVar& a, const LogVar& b, FormulaPtr phi, Q q) {
  if (q == Q::Zero) return phi;
  ExprPtr ea = fm::var(a), eb = fm::var(b);
  bool with_fail = q == Q::Fail || q == Q::Both;
  bool with_nil = q == Q::Nil || q == Q::Both;
  std::vector<FormulaPtr> parts;
  std::vector<FormulaPtr> escape;
  if (with_fail) {
    parts.push_back(fm::implies(fm::eq(ea, fm::fail(a.sort)), fm::eq(eb, fm::fail(b.sort))));
    escape.push_back(fm::eq(ea, fm::fail(a.sort)));
  }
  if (with_nil) {
    parts.push_back(fm::implies(fm::eq(ea, fm::nil(a.sort)), fm::eq(eb, fm::nil(b.sort))));
    escape.push_back(fm::eq(ea, fm::nil(a.sort)));
  }
  escape.push_back(std::move(phi));
  parts.push_back(fm::disj(std::move(escape)));
  Formula f;
  f.kind = FormulaKind::And;
  f.parts = std::move(parts);
  return std::make_shared<const Formula>(std::move(f));
}

// ---------------------------------------------------------------------------
// SMT-LIB rendering
// ---------------------------------------------------------------------------

std::string smt_symbol(const std::string& name) {
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos) simple = false;
  }
  return simple ? name : "|" + name + "|";
}

std::string sort_name(const Type& t) { return "V_" + t.mangled(); }

bool clashes_with_encoding(const std::string& name) {
  static const std::set<std::string> words = {
      "and", "or",     "not",  "ite",    "distinct", "true", "false", "div", "mod",   "abs",
      "let", "forall", "exists", "Int",  "Bool",     "Real", "match", "par", "_",     "!",
      "as",  "to_real", "to_int", "is_int", "declare-fun"};
  if (words.count(name)) return true;
  static const char* const prefixes[] = {"V_",   "Unit_", "Int_", "Pair_", "Meth_", "Fail_",
                                         "Nil_", "fst_",  "snd_", "id_",   "val_"};
  for (const char* p : prefixes) {
    if (name.rfind(p, 0) == 0) return true;
  }
  return false;
}

namespace {

std::string int_literal(std::int64_t i) {
  if (i < 0) {
    // magnitude without overflow for INT64_MIN
    std::uint64_t mag = static_cast<std::uint64_t>(-(i + 1)) + 1;
    return "(- " + std::to_string(mag) + ")";
  }
  return std::to_string(i);
}

void write(std::ostream& os, const FormulaPtr& f);

void write(std::ostream& os, const ExprPtr& e) {
  const std::string m = e->sort.mangled();
  switch (e->kind) {
    case ExprKind::Var:
      os << smt_symbol(e->var);
      return;
    case ExprKind::Int:
      os << "(Int_int " << int_literal(e->value) << ")";
      return;
    case ExprKind::Unit:
      os << "Unit_unit";
      return;
    case ExprKind::Fail:
      os << "Fail_" << m;
      return;
    case ExprKind::Nil:
      os << "Nil_" << m;
      return;
    case ExprKind::Meth:
      os << "(Meth_" << m << " " << e->value << ")";
      return;
    case ExprKind::Pair:
      os << "(Pair_" << m << " ";
      write(os, e->a);
      os << " ";
      write(os, e->b);
      os << ")";
      return;
    case ExprKind::Proj: {
      const std::string pm = e->a->sort.mangled();
      os << "(" << (e->index == 1 ? "fst_" : "snd_") << pm << " ";
      write(os, e->a);
      os << ")";
      return;
    }
    case ExprKind::Arith: {
      auto payload = [&](const ExprPtr& x) {
        os << "(val_int ";
        write(os, x);
        os << ")";
      };
      auto both = [&] {
        payload(e->a);
        os << " ";
        payload(e->b);
      };
      os << "(Int_int ";
      switch (e->op) {
        case BinOpKind::Add:
        case BinOpKind::Sub:
        case BinOpKind::Mul:
          os << "(" << (e->op == BinOpKind::Add ? "+" : e->op == BinOpKind::Sub ? "-" : "*") << " ";
          both();
          os << ")";
          break;
        case BinOpKind::Div:
        case BinOpKind::Mod:
          os << "(" << (e->op == BinOpKind::Div ? "div" : "mod") << " ";
          both();
          os << ")";
          break;
        case BinOpKind::And:
        case BinOpKind::Or:
          os << "(ite (" << (e->op == BinOpKind::And ? "and" : "or") << " (distinct ";
          payload(e->a);
          os << " 0) (distinct ";
          payload(e->b);
          os << " 0)) 1 0)";
          break;
        default: {
          const char* rel = e->op == BinOpKind::Eq   ? "="
                            : e->op == BinOpKind::Ne ? "distinct"
                            : e->op == BinOpKind::Lt ? "<"
                            : e->op == BinOpKind::Le ? "<="
                            : e->op == BinOpKind::Gt ? ">"
                                                     : ">=";
          os << "(ite (" << rel << " ";
          both();
          os << ") 1 0)";
        }
      }
      os << ")";
      return;
    }
    case ExprKind::Ite:
      os << "(ite ";
      write(os, e->cond);
      os << " ";
      write(os, e->a);
      os << " ";
      write(os, e->b);
      os << ")";
      return;
  }
}

void write(std::ostream& os, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True:
      os << "true";
      return;
    case FormulaKind::False:
      os << "false";
      return;
    case FormulaKind::Eq:
    case FormulaKind::NotEq:
      os << (f->kind == FormulaKind::Eq ? "(= " : "(distinct ");
      write(os, f->lhs);
      os << " ";
      write(os, f->rhs);
      os << ")";
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      os << (f->kind == FormulaKind::And ? "(and" : f->kind == FormulaKind::Or ? "(or" : "(=>");
      for (const auto& p : f->parts) {
        os << " ";
        write(os, p);
      }
      os << ")";
      return;
    case FormulaKind::Not:
      os << "(not ";
      write(os, f->parts[0]);
      os << ")";
      return;
    case FormulaKind::IntCmp: {
      const char* rel = f->op == BinOpKind::Eq   ? "="
                        : f->op == BinOpKind::Ne ? "distinct"
                        : f->op == BinOpKind::Lt ? "<"
                        : f->op == BinOpKind::Le ? "<="
                        : f->op == BinOpKind::Gt ? ">"
                                                 : ">=";
      os << "(" << rel << " (val_int ";
      write(os, f->lhs);
      os << ") (val_int ";
      write(os, f->rhs);
      os << "))";
      return;
    }
  }
}

void expr_vars(const ExprPtr& e, std::vector<std::string>& out);

void formula_vars(const FormulaPtr& f, std::vector<std::string>& out) {
  if (f->lhs) expr_vars(f->lhs, out);
  if (f->rhs) expr_vars(f->rhs, out);
  for (const auto& p : f->parts) formula_vars(p, out);
}

void expr_vars(const ExprPtr& e, std::vector<std::string>& out) {
  if (e->kind == ExprKind::Var) out.push_back(e->var);
  if (e->a) expr_vars(e->a, out);
  if (e->b) expr_vars(e->b, out);
  if (e->cond) formula_vars(e->cond, out);
}

void sorts_of_expr(const ExprPtr& e, std::set<Type>& out);

void sorts_of_formula(const FormulaPtr& f, std::set<Type>& out) {
  if (f->lhs) sorts_of_expr(f->lhs, out);
  if (f->rhs) sorts_of_expr(f->rhs, out);
  for (const auto& p : f->parts) sorts_of_formula(p, out);
}

void sorts_of_expr(const ExprPtr& e, std::set<Type>& out) {
  out.insert(e->sort);
  if (e->a) sorts_of_expr(e->a, out);
  if (e->b) sorts_of_expr(e->b, out);
  if (e->cond) sorts_of_formula(e->cond, out);
}

void declare_sort(const Type& t, std::set<std::string>& done, std::ostream& os) {
  const std::string m = t.mangled();
  if (done.count(m)) return;
  switch (t.kind()) {
    case TypeKind::Prod:
      declare_sort(t.left(), done, os);
      declare_sort(t.right(), done, os);
      break;
    case TypeKind::Arrow:
      // arrow payloads are integer ids; components need no declaration
      break;
    default:
      break;
  }
  done.insert(m);
  os << "(declare-datatypes ((V_" << m << " 0)) ((";
  switch (t.kind()) {
    case TypeKind::Unit:
      os << "(Unit_unit)";
      break;
    case TypeKind::Int:
      os << "(Int_int (val_int Int))";
      break;
    case TypeKind::Prod:
      os << "(Pair_" << m << " (fst_" << m << " " << sort_name(t.left()) << ") (snd_" << m << " "
         << sort_name(t.right()) << "))";
      break;
    case TypeKind::Arrow:
      os << "(Meth_" << m << " (id_" << m << " Int))";
      break;
  }
  os << " (Fail_" << m << ") (Nil_" << m << "))))\n";
}

}  // namespace

std::string to_smt(const FormulaPtr& f) {
  std::ostringstream os;
  write(os, f);
  return os.str();
}

std::string to_smt(const ExprPtr& e) {
  std::ostringstream os;
  write(os, e);
  return os.str();
}

void collect_vars(const FormulaPtr& f, std::vector<std::string>& out) { formula_vars(f, out); }

std::string emit_smtlib(const std::vector<LogVar>& decls, const std::vector<SmtMethod>& methods,
                        const std::vector<FormulaPtr>& phi, const FormulaPtr& query) {
  std::set<std::string> declared;
  for (const auto& d : decls) declared.insert(d.name);
  std::vector<std::string> used;
  for (const auto& f : phi) formula_vars(f, used);
  formula_vars(query, used);
  for (const auto& u : used) {
    if (!declared.count(u)) throw UndeclaredVariable("undeclared logical variable " + u);
  }

  std::set<Type> sorts;
  for (const auto& d : decls) sorts.insert(d.sort);
  for (const auto& m : methods) sorts.insert(m.sort);
  for (const auto& f : phi) sorts_of_formula(f, sorts);
  sorts_of_formula(query, sorts);

  std::ostringstream os;
  os << "(set-logic ALL)\n";
  std::set<std::string> done;
  for (const auto& t : sorts) declare_sort(t, done, os);
  for (const auto& m : methods) os << "; method " << m.id << " = " << m.name << " : " << m.sort.str() << "\n";
  for (const auto& d : decls) os << "(declare-const " << smt_symbol(d.name) << " " << sort_name(d.sort) << ")\n";
  std::vector<FormulaPtr> all = phi;
  all.push_back(query);
  os << "(assert (and";
  for (const auto& f : all) {
    os << "\n  ";
    write(os, f);
  }
  os << "))\n(check-sat)\n(get-model)\n";
  return os.str();
}

}  // namespace hobmc
