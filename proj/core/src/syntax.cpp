#include "hobmc/syntax.hpp"

#include <atomic>
#include <sstream>

namespace hobmc {

// ---------------------------------------------------------------------------
// Type
// ---------------------------------------------------------------------------

struct Type::Node {
  TypeKind kind;
  Type left;
  Type right;
  bool ground;
  std::string spelling;
  std::string mangled;
};

namespace {

std::string spell_operand(const Type& t, bool in_arrow_left, bool in_prod) {
  bool paren = (t.kind() == TypeKind::Arrow && (in_arrow_left || in_prod)) ||
               (t.kind() == TypeKind::Prod && in_prod);
  return paren ? "(" + t.str() + ")" : t.str();
}

}  // namespace

Type Type::unit() {
  static const Type t{std::make_shared<const Node>(Node{TypeKind::Unit, {}, {}, true, "Unit", "unit"})};
  return t;
}

Type Type::integer() {
  static const Type t{std::make_shared<const Node>(Node{TypeKind::Int, {}, {}, true, "Int", "int"})};
  return t;
}

Type Type::prod(Type left, Type right) {
  if (!left.valid() || !right.valid()) throw std::invalid_argument("product of invalid types");
  std::string s = spell_operand(left, false, true) + " * " + spell_operand(right, false, true);
  std::string m = "pair_" + left.mangled() + "_" + right.mangled();
  bool g = left.is_ground() && right.is_ground();
  return Type{std::make_shared<const Node>(Node{TypeKind::Prod, left, right, g, std::move(s), std::move(m)})};
}

Type Type::arrow(Type domain, Type codomain) {
  if (!domain.valid() || !codomain.valid()) throw std::invalid_argument("arrow of invalid types");
  std::string s = spell_operand(domain, true, false) + " -> " + codomain.str();
  std::string m = "fun_" + domain.mangled() + "_" + codomain.mangled();
  return Type{std::make_shared<const Node>(
      Node{TypeKind::Arrow, domain, codomain, false, std::move(s), std::move(m)})};
}

TypeKind Type::kind() const { return node_->kind; }
const Type& Type::left() const { return node_->left; }
const Type& Type::right() const { return node_->right; }
bool Type::is_ground() const { return node_->ground; }

const std::string& Type::str() const {
  static const std::string invalid = "<invalid>";
  return node_ ? node_->spelling : invalid;
}

const std::string& Type::mangled() const {
  static const std::string invalid = "invalid";
  return node_ ? node_->mangled : invalid;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  return a.node_->mangled == b.node_->mangled;
}

std::strong_ordering operator<=>(const Type& a, const Type& b) { return a.mangled() <=> b.mangled(); }

std::string print_type(const Type& t) { return t.str(); }

std::string to_string(const Name& n) { return n.id; }

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

const char* to_string(BinOpKind op) {
  switch (op) {
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::Div: return "/";
    case BinOpKind::Mod: return "%";
    case BinOpKind::Eq: return "=";
    case BinOpKind::Ne: return "<>";
    case BinOpKind::Lt: return "<";
    case BinOpKind::Le: return "<=";
    case BinOpKind::Gt: return ">";
    case BinOpKind::Ge: return ">=";
    case BinOpKind::And: return "&&";
    case BinOpKind::Or: return "||";
  }
  return "?";
}

bool is_comparison(BinOpKind op) {
  switch (op) {
    case BinOpKind::Eq:
    case BinOpKind::Ne:
    case BinOpKind::Lt:
    case BinOpKind::Le:
    case BinOpKind::Gt:
    case BinOpKind::Ge:
      return true;
    default:
      return false;
  }
}

std::uint32_t next_site() {
  static std::atomic<std::uint32_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

namespace mk {
namespace {

TermPtr make(Term t) {
  t.site = next_site();
  return std::make_shared<const Term>(std::move(t));
}

void require_kind(const Name& n, NameKind k, const char* what) {
  if (n.kind != k || n.empty() || !n.type.valid()) throw std::invalid_argument(std::string("expected ") + what);
}

}  // namespace

TermPtr fail(Type t) {
  Term n;
  n.kind = TermKind::Fail;
  n.fail_type = std::move(t);
  return make(std::move(n));
}

TermPtr var(Name x) {
  require_kind(x, NameKind::Var, "variable");
  Term n;
  n.kind = TermKind::Var;
  n.name = std::move(x);
  return make(std::move(n));
}

TermPtr meth(Name m) {
  require_kind(m, NameKind::Meth, "method name");
  Term n;
  n.kind = TermKind::Meth;
  n.name = std::move(m);
  return make(std::move(n));
}

TermPtr integer(std::int64_t i) {
  Term n;
  n.kind = TermKind::Int;
  n.value = i;
  return make(std::move(n));
}

TermPtr unit() {
  Term n;
  n.kind = TermKind::Unit;
  return make(std::move(n));
}

TermPtr assign(Name r, TermPtr rhs) {
  require_kind(r, NameKind::Ref, "reference");
  Term n;
  n.kind = TermKind::Assign;
  n.name = std::move(r);
  n.kids[0] = std::move(rhs);
  return make(std::move(n));
}

TermPtr deref(Name r) {
  require_kind(r, NameKind::Ref, "reference");
  Term n;
  n.kind = TermKind::Deref;
  n.name = std::move(r);
  return make(std::move(n));
}

TermPtr binop(BinOpKind op, TermPtr a, TermPtr b) {
  Term n;
  n.kind = TermKind::BinOp;
  n.op = op;
  n.kids[0] = std::move(a);
  n.kids[1] = std::move(b);
  return make(std::move(n));
}

TermPtr pair(TermPtr a, TermPtr b) {
  Term n;
  n.kind = TermKind::Pair;
  n.kids[0] = std::move(a);
  n.kids[1] = std::move(b);
  return make(std::move(n));
}

TermPtr proj(int index, TermPtr t) {
  if (index != 1 && index != 2) throw std::invalid_argument("projection index must be 1 or 2");
  Term n;
  n.kind = TermKind::Proj;
  n.index = index;
  n.kids[0] = std::move(t);
  return make(std::move(n));
}

TermPtr app_var(Name x, TermPtr arg) {
  require_kind(x, NameKind::Var, "variable");
  Term n;
  n.kind = TermKind::AppVar;
  n.name = std::move(x);
  n.kids[0] = std::move(arg);
  return make(std::move(n));
}

TermPtr app_meth(Name m, TermPtr arg) {
  require_kind(m, NameKind::Meth, "method name");
  Term n;
  n.kind = TermKind::AppMeth;
  n.name = std::move(m);
  n.kids[0] = std::move(arg);
  return make(std::move(n));
}

TermPtr ite(TermPtr cond, TermPtr then_branch, TermPtr else_branch) {
  Term n;
  n.kind = TermKind::If;
  n.kids[0] = std::move(cond);
  n.kids[1] = std::move(then_branch);
  n.kids[2] = std::move(else_branch);
  return make(std::move(n));
}

TermPtr let(Name x, TermPtr bound, TermPtr body) {
  require_kind(x, NameKind::Var, "variable");
  Term n;
  n.kind = TermKind::Let;
  n.name = std::move(x);
  n.kids[0] = std::move(bound);
  n.kids[1] = std::move(body);
  return make(std::move(n));
}

TermPtr letrec(Name f, Name x, TermPtr fn_body, TermPtr body) {
  require_kind(f, NameKind::Var, "variable");
  require_kind(x, NameKind::Var, "variable");
  Term n;
  n.kind = TermKind::Letrec;
  n.name = std::move(f);
  n.param = std::move(x);
  n.kids[0] = std::move(fn_body);
  n.kids[1] = std::move(body);
  return make(std::move(n));
}

TermPtr lambda(Name x, TermPtr body) {
  require_kind(x, NameKind::Var, "variable");
  Term n;
  n.kind = TermKind::Lambda;
  n.name = std::move(x);
  n.kids[0] = std::move(body);
  return make(std::move(n));
}

TermPtr located(const TermPtr& t, SourceLoc loc, std::uint32_t site) {
  Term copy = *t;
  copy.loc = loc;
  copy.site = site;
  return std::make_shared<const Term>(std::move(copy));
}

}  // namespace mk

bool same_term(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Fail:
      if (!(a->fail_type == b->fail_type)) return false;
      break;
    case TermKind::Int:
      if (a->value != b->value) return false;
      break;
    case TermKind::BinOp:
      if (a->op != b->op) return false;
      break;
    case TermKind::Proj:
      if (a->index != b->index) return false;
      break;
    case TermKind::Letrec:
      if (!(a->param == b->param)) return false;
      break;
    default:
      break;
  }
  if (!(a->name == b->name)) return false;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!same_term(a->kids[i], b->kids[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

Value Value::var(Name x) {
  Value v;
  v.kind = ValueKind::Var;
  v.name = std::move(x);
  return v;
}

Value Value::meth(Name m) {
  Value v;
  v.kind = ValueKind::Meth;
  v.name = std::move(m);
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v;
  v.kind = ValueKind::Int;
  v.i = i;
  return v;
}

Value Value::unit() { return Value{}; }

Value Value::pair(Value a, Value b) {
  Value v;
  v.kind = ValueKind::Pair;
  v.components = std::make_shared<const std::array<Value, 2>>(std::array<Value, 2>{std::move(a), std::move(b)});
  return v;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ValueKind::Var:
    case ValueKind::Meth:
      return a.name == b.name;
    case ValueKind::Int:
      return a.i == b.i;
    case ValueKind::Unit:
      return true;
    case ValueKind::Pair:
      return a.first() == b.first() && a.second() == b.second();
  }
  return false;
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case ValueKind::Var:
    case ValueKind::Meth:
      return v.name.id;
    case ValueKind::Int:
      return std::to_string(v.i);
    case ValueKind::Unit:
      return "()";
    case ValueKind::Pair:
      return "(" + to_string(v.first()) + ", " + to_string(v.second()) + ")";
  }
  return "?";
}

TermPtr to_term(const Value& v) {
  switch (v.kind) {
    case ValueKind::Var:
      return mk::var(v.name);
    case ValueKind::Meth:
      return mk::meth(v.name);
    case ValueKind::Int:
      return mk::integer(v.i);
    case ValueKind::Unit:
      return mk::unit();
    case ValueKind::Pair:
      return mk::pair(to_term(v.first()), to_term(v.second()));
  }
  return nullptr;
}

std::optional<Value> as_value(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
      return Value::var(t->name);
    case TermKind::Meth:
      return Value::meth(t->name);
    case TermKind::Int:
      return Value::integer(t->value);
    case TermKind::Unit:
      return Value::unit();
    case TermKind::Pair: {
      auto a = as_value(t->kids[0]);
      if (!a) return std::nullopt;
      auto b = as_value(t->kids[1]);
      if (!b) return std::nullopt;
      return Value::pair(std::move(*a), std::move(*b));
    }
    default:
      return std::nullopt;
  }
}

Type type_of(const Value& v) {
  switch (v.kind) {
    case ValueKind::Var:
    case ValueKind::Meth:
      return v.name.type;
    case ValueKind::Int:
      return Type::integer();
    case ValueKind::Unit:
      return Type::unit();
    case ValueKind::Pair:
      return Type::prod(type_of(v.first()), type_of(v.second()));
  }
  return {};
}

// ---------------------------------------------------------------------------
// Repository / Bound
// ---------------------------------------------------------------------------

void Repository::insert(const Name& m, MethodDef def) {
  if (m.kind != NameKind::Meth) throw std::invalid_argument("repository key must be a method name");
  auto [it, fresh] = defs_.insert_or_assign(m, std::move(def));
  (void)it;
  if (fresh) order_.push_back(m);
}

const MethodDef& Repository::at(const Name& m) const {
  auto it = defs_.find(m);
  if (it == defs_.end()) throw std::out_of_range("method not in repository: " + m.id);
  return it->second;
}

const MethodDef* Repository::find(const Name& m) const {
  auto it = defs_.find(m);
  return it == defs_.end() ? nullptr : &it->second;
}

std::vector<Name> Repository::names_of_type(const Type& t) const {
  std::vector<Name> out;
  for (const auto& n : order_) {
    if (n.type == t) out.push_back(n);
  }
  return out;
}

bool operator==(const Repository& a, const Repository& b) {
  if (a.order_ != b.order_) return false;
  for (const auto& n : a.order_) {
    const auto& da = a.at(n);
    const auto& db = b.at(n);
    if (!(da.param == db.param) || !same_term(da.body, db.body)) return false;
  }
  return true;
}

Bound Bound::decremented() const {
  if (is_nil() || *k_ == 0) return nil();
  return Bound{*k_ - 1};
}

std::string to_string(const Bound& b) { return b.is_nil() ? "nil" : std::to_string(b.value()); }

// ---------------------------------------------------------------------------
// Typechecking
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void type_error(const TermPtr& t, const std::string& msg) {
  std::ostringstream os;
  if (t && t->loc.known()) os << t->loc.line << ":" << t->loc.column << ": ";
  os << msg;
  throw TypeError(os.str(), t);
}

void expect(const TermPtr& at, const Type& expected, const Type& actual, const char* what) {
  if (!(expected == actual)) {
    type_error(at, std::string(what) + ": expected " + expected.str() + ", got " + actual.str());
  }
}

}  // namespace

Type typecheck(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Fail:
      if (!t->fail_type.valid()) type_error(t, "fail without a type");
      return t->fail_type;
    case TermKind::Var:
    case TermKind::Meth:
      return t->name.type;
    case TermKind::Int:
      return Type::integer();
    case TermKind::Unit:
      return Type::unit();
    case TermKind::Assign:
      expect(t, t->name.type, typecheck(t->kids[0]), "assignment");
      return Type::unit();
    case TermKind::Deref:
      return t->name.type;
    case TermKind::BinOp:
      expect(t->kids[0], Type::integer(), typecheck(t->kids[0]), "left operand");
      expect(t->kids[1], Type::integer(), typecheck(t->kids[1]), "right operand");
      return Type::integer();
    case TermKind::Pair:
      return Type::prod(typecheck(t->kids[0]), typecheck(t->kids[1]));
    case TermKind::Proj: {
      Type a = typecheck(t->kids[0]);
      if (!a.is_prod()) type_error(t, "projection of non-product type " + a.str());
      return t->index == 1 ? a.left() : a.right();
    }
    case TermKind::AppVar:
    case TermKind::AppMeth: {
      const Type& f = t->name.type;
      if (!f.is_arrow()) type_error(t, "application of non-arrow name " + t->name.id + " : " + f.str());
      expect(t->kids[0], f.left(), typecheck(t->kids[0]), "argument");
      return f.right();
    }
    case TermKind::If: {
      expect(t->kids[0], Type::integer(), typecheck(t->kids[0]), "condition");
      Type a = typecheck(t->kids[1]);
      expect(t->kids[2], a, typecheck(t->kids[2]), "else branch");
      return a;
    }
    case TermKind::Let:
      expect(t->kids[0], t->name.type, typecheck(t->kids[0]), "let binding");
      return typecheck(t->kids[1]);
    case TermKind::Letrec: {
      const Type& f = t->name.type;
      if (!f.is_arrow()) type_error(t, "letrec name must have arrow type");
      expect(t, f.left(), t->param.type, "letrec parameter");
      expect(t->kids[0], f.right(), typecheck(t->kids[0]), "letrec body");
      return typecheck(t->kids[1]);
    }
    case TermKind::Lambda:
      return Type::arrow(t->name.type, typecheck(t->kids[0]));
  }
  type_error(t, "unknown term");
}

// ---------------------------------------------------------------------------
// Free variables, names, substitution
// ---------------------------------------------------------------------------

namespace {

void free_vars_into(const TermPtr& t, std::set<Name>& bound, std::set<Name>& out) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::AppVar:
      if (!bound.count(t->name)) out.insert(t->name);
      break;
    case TermKind::Let: {
      free_vars_into(t->kids[0], bound, out);
      bool added = bound.insert(t->name).second;
      free_vars_into(t->kids[1], bound, out);
      if (added) bound.erase(t->name);
      return;
    }
    case TermKind::Lambda: {
      bool added = bound.insert(t->name).second;
      free_vars_into(t->kids[0], bound, out);
      if (added) bound.erase(t->name);
      return;
    }
    case TermKind::Letrec: {
      bool f_added = bound.insert(t->name).second;
      bool x_added = bound.insert(t->param).second;
      free_vars_into(t->kids[0], bound, out);
      if (x_added) bound.erase(t->param);
      free_vars_into(t->kids[1], bound, out);
      if (f_added) bound.erase(t->name);
      return;
    }
    default:
      break;
  }
  for (const auto& k : t->kids) {
    if (k) free_vars_into(k, bound, out);
  }
}

}  // namespace

std::set<Name> free_vars(const TermPtr& t) {
  std::set<Name> bound, out;
  free_vars_into(t, bound, out);
  return out;
}

void collect_names(const TermPtr& t, std::set<Name>& meths, std::set<Name>& refs) {
  switch (t->kind) {
    case TermKind::Meth:
    case TermKind::AppMeth:
      meths.insert(t->name);
      break;
    case TermKind::Assign:
    case TermKind::Deref:
      refs.insert(t->name);
      break;
    default:
      break;
  }
  for (const auto& k : t->kids) {
    if (k) collect_names(k, meths, refs);
  }
}

void collect_names(const Value& v, std::set<Name>& meths) {
  if (v.kind == ValueKind::Meth) meths.insert(v.name);
  if (v.kind == ValueKind::Pair) {
    collect_names(v.first(), meths);
    collect_names(v.second(), meths);
  }
}

namespace {

TermPtr with_kids(const TermPtr& t, const std::array<TermPtr, 3>& kids) {
  if (kids == t->kids) return t;
  Term copy = *t;
  copy.kids = kids;
  return std::make_shared<const Term>(std::move(copy));
}

TermPtr subst_rec(const TermPtr& t, const std::map<Name, TermPtr>& sigma) {
  switch (t->kind) {
    case TermKind::Var: {
      auto it = sigma.find(t->name);
      if (it == sigma.end()) return t;
      return it->second;
    }
    case TermKind::AppVar: {
      TermPtr arg = subst_rec(t->kids[0], sigma);
      auto it = sigma.find(t->name);
      if (it == sigma.end()) return with_kids(t, {arg, nullptr, nullptr});
      const TermPtr& head = it->second;
      Term copy = *t;
      copy.kids = {arg, nullptr, nullptr};
      if (head->kind == TermKind::Var) {
        copy.name = head->name;
      } else if (head->kind == TermKind::Meth) {
        copy.kind = TermKind::AppMeth;
        copy.name = head->name;
        copy.via_var = true;
      } else {
        throw std::invalid_argument("substituting a non-name for an applied variable " + t->name.id);
      }
      return std::make_shared<const Term>(std::move(copy));
    }
    case TermKind::Let: {
      TermPtr bound = subst_rec(t->kids[0], sigma);
      if (sigma.count(t->name)) {
        auto inner = sigma;
        inner.erase(t->name);
        return with_kids(t, {bound, subst_rec(t->kids[1], inner), nullptr});
      }
      return with_kids(t, {bound, subst_rec(t->kids[1], sigma), nullptr});
    }
    case TermKind::Lambda: {
      if (sigma.count(t->name)) {
        auto inner = sigma;
        inner.erase(t->name);
        return with_kids(t, {subst_rec(t->kids[0], inner), nullptr, nullptr});
      }
      return with_kids(t, {subst_rec(t->kids[0], sigma), nullptr, nullptr});
    }
    case TermKind::Letrec: {
      if (sigma.count(t->name) || sigma.count(t->param)) {
        auto inner = sigma;
        inner.erase(t->name);
        auto fn_inner = inner;
        fn_inner.erase(t->param);
        return with_kids(t, {subst_rec(t->kids[0], fn_inner), subst_rec(t->kids[1], inner), nullptr});
      }
      return with_kids(t, {subst_rec(t->kids[0], sigma), subst_rec(t->kids[1], sigma), nullptr});
    }
    default: {
      std::array<TermPtr, 3> kids = t->kids;
      for (auto& k : kids) {
        if (k) k = subst_rec(k, sigma);
      }
      return with_kids(t, kids);
    }
  }
}

}  // namespace

TermPtr substitute(const TermPtr& t, const Name& x, const TermPtr& replacement) {
  return subst_rec(t, {{x, replacement}});
}

TermPtr substitute(const TermPtr& t, const std::map<Name, TermPtr>& sigma) {
  if (sigma.empty()) return t;
  return subst_rec(t, sigma);
}

Config close_config(const Config& c, const std::map<Name, Value>& sigma) {
  std::map<Name, TermPtr> terms;
  for (const auto& [x, v] : sigma) terms.emplace(x, to_term(v));
  Config out;
  out.term = substitute(c.term, terms);
  for (const auto& m : c.repo.names()) {
    const auto& def = c.repo.at(m);
    out.repo.insert(m, MethodDef{def.param, substitute(def.body, terms), def.origin});
  }
  out.store = c.store;
  out.bound = c.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Configuration validity
// ---------------------------------------------------------------------------

ConfigReport validate_config(const Config& c, bool allow_higher_order_free) {
  std::set<Name> meths, refs;
  collect_names(c.term, meths, refs);

  for (const auto& m : c.repo.names()) {
    const auto& def = c.repo.at(m);
    if (!m.type.is_arrow()) {
      throw ConfigError(ConfigError::Kind::IllTypedRepository, "method " + m.id + " has non-arrow type");
    }
    if (!(def.param.type == m.type.left())) {
      throw ConfigError(ConfigError::Kind::IllTypedRepository, "method " + m.id + " parameter type mismatch");
    }
    Type body_t;
    try {
      body_t = typecheck(def.body);
    } catch (const TypeError& e) {
      throw ConfigError(ConfigError::Kind::IllTypedRepository, "method " + m.id + ": " + e.what());
    }
    if (!(body_t == m.type.right())) {
      throw ConfigError(ConfigError::Kind::IllTypedRepository,
                        "method " + m.id + " body has type " + body_t.str() + ", expected " + m.type.right().str());
    }
    auto fv = free_vars(def.body);
    fv.erase(def.param);
    if (!fv.empty()) {
      throw ConfigError(ConfigError::Kind::OpenRepository,
                        "method " + m.id + " has free variable " + fv.begin()->id);
    }
    collect_names(def.body, meths, refs);
  }
  for (const auto& [r, v] : c.store) {
    if (!(type_of(v) == r.type)) {
      throw ConfigError(ConfigError::Kind::IllTypedStore, "store entry " + r.id + " holds a value of the wrong type");
    }
    collect_names(v, meths);
  }
  for (const auto& m : meths) {
    if (!c.repo.contains(m)) throw ConfigError(ConfigError::Kind::DanglingName, "DanglingName(" + m.id + ")");
  }
  for (const auto& r : refs) {
    if (!c.store.count(r)) throw ConfigError(ConfigError::Kind::DanglingName, "DanglingName(" + r.id + ")");
  }

  ConfigReport report;
  report.free_vars = free_vars(c.term);
  for (const auto& x : report.free_vars) {
    if (!x.type.is_ground()) {
      report.all_free_ground = false;
      if (!allow_higher_order_free) {
        throw ConfigError(ConfigError::Kind::NonGroundFreeVar,
                          "NonGroundFreeVar(" + x.id + " : " + x.type.str() + ")");
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

namespace {

void print_rec(const TermPtr& t, std::ostream& os) {
  switch (t->kind) {
    case TermKind::Fail:
      os << "fail";
      return;
    case TermKind::Var:
    case TermKind::Meth:
      os << t->name.id;
      return;
    case TermKind::Int:
      if (t->value < 0) {
        os << "(" << t->value << ")";
      } else {
        os << t->value;
      }
      return;
    case TermKind::Unit:
      os << "skip";
      return;
    case TermKind::Assign:
      os << "(" << t->name.id << " := ";
      print_rec(t->kids[0], os);
      os << ")";
      return;
    case TermKind::Deref:
      os << "!" << t->name.id;
      return;
    case TermKind::BinOp:
      os << "(";
      print_rec(t->kids[0], os);
      os << " " << to_string(t->op) << " ";
      print_rec(t->kids[1], os);
      os << ")";
      return;
    case TermKind::Pair:
      os << "(";
      print_rec(t->kids[0], os);
      os << ", ";
      print_rec(t->kids[1], os);
      os << ")";
      return;
    case TermKind::Proj:
      os << "(" << (t->index == 1 ? "fst" : "snd") << ":(" << typecheck(t->kids[0]).str() << ") ";
      print_rec(t->kids[0], os);
      os << ")";
      return;
    case TermKind::AppVar:
    case TermKind::AppMeth:
      os << "(" << t->name.id << " ";
      print_rec(t->kids[0], os);
      os << ")";
      return;
    case TermKind::If:
      os << "(if ";
      print_rec(t->kids[0], os);
      os << " then ";
      print_rec(t->kids[1], os);
      os << " else ";
      print_rec(t->kids[2], os);
      os << ")";
      return;
    case TermKind::Let:
      os << "(let " << t->name.id << " :(" << t->name.type.str() << ") = ";
      print_rec(t->kids[0], os);
      os << " in ";
      print_rec(t->kids[1], os);
      os << ")";
      return;
    case TermKind::Letrec:
      os << "(letrec " << t->name.id << " :(" << t->name.type.str() << ") = fun (" << t->param.id << ":"
         << t->param.type.str() << ") -> ";
      print_rec(t->kids[0], os);
      os << " in ";
      print_rec(t->kids[1], os);
      os << ")";
      return;
    case TermKind::Lambda:
      os << "(fun (" << t->name.id << ":" << t->name.type.str() << ") -> ";
      print_rec(t->kids[0], os);
      os << ")";
      return;
  }
}

}  // namespace

std::string print_term(const TermPtr& t) {
  std::ostringstream os;
  print_rec(t, os);
  return os.str();
}

}  // namespace hobmc
