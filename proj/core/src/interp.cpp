#include "hobmc/interp.hpp"

#include <limits>
#include <sstream>
#include <vector>

namespace hobmc {

std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case OutcomeKind::Val:
      return to_string(o.value);
    case OutcomeKind::Fail:
      return "fail";
    case OutcomeKind::Nil:
      return "nil";
  }
  return "?";
}

Name NameGen::fresh(const Type& t, const Repository& repo) {
  for (;;) {
    std::ostringstream os;
    os << "m" << std::hex << (rng_() & 0xffffffu);
    std::string id = os.str();
    Name n = Name::meth(id, t);
    if (issued_.count(id) || repo.contains(n)) continue;
    // a same-spelled name of another type would still confuse printing
    bool clash = false;
    for (const auto& m : repo.names()) clash = clash || m.id == id;
    if (clash) continue;
    issued_.insert(id);
    return n;
  }
}

std::int64_t apply_binop(BinOpKind op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  switch (op) {
    case BinOpKind::Add:
      if (__builtin_add_overflow(a, b, &r)) throw ArithmeticFault("integer overflow in +");
      return r;
    case BinOpKind::Sub:
      if (__builtin_sub_overflow(a, b, &r)) throw ArithmeticFault("integer overflow in -");
      return r;
    case BinOpKind::Mul:
      if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticFault("integer overflow in *");
      return r;
    case BinOpKind::Div:
    case BinOpKind::Mod: {
      if (b == 0) throw ArithmeticFault("division by zero");
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) throw ArithmeticFault("integer overflow in div");
      std::int64_t rem = a % b;
      if (rem < 0) rem += b < 0 ? -b : b;
      if (op == BinOpKind::Mod) return rem;
      return (a - rem) / b;
    }
    case BinOpKind::Eq:
      return a == b;
    case BinOpKind::Ne:
      return a != b;
    case BinOpKind::Lt:
      return a < b;
    case BinOpKind::Le:
      return a <= b;
    case BinOpKind::Gt:
      return a > b;
    case BinOpKind::Ge:
      return a >= b;
    case BinOpKind::And:
      return a != 0 && b != 0;
    case BinOpKind::Or:
      return a != 0 || b != 0;
  }
  return 0;
}

namespace {

struct Res {
  OutcomeKind kind;
  Value v;
  bool ok() const { return kind == OutcomeKind::Val; }
};

Res abort_with(const Res& r) { return {r.kind, {}}; }

class Evaluator {
 public:
  Evaluator(Repository repo, Store store, NameGen& g, const EvalOptions& opts)
      : repo_(std::move(repo)), store_(std::move(store)), gen_(g), opts_(opts) {}

  Res run(const TermPtr& t, Bound k) {
    Res r = go(t, k, 0);
    if (opts_.trace) {
      for (const auto& line : trace_) *opts_.trace << line << "\n";
    }
    return r;
  }

  Repository repo_;
  Store store_;
  EvalStats stats_;

 private:
  std::string brief(const TermPtr& t) const {
    std::string s = print_term(t);
    if (s.size() > 60) s = s.substr(0, 57) + "...";
    return s;
  }

  Res go(const TermPtr& t, Bound k, unsigned depth) {
    if (++stats_.steps > opts_.fuel) throw FuelExhausted("evaluation exceeded its step budget");
    std::size_t slot = 0;
    if (opts_.trace) {
      slot = trace_.size();
      trace_.emplace_back();
    }
    const char* rule = "";
    Res r = step(t, k, depth, rule);
    if (opts_.trace) {
      std::string res = r.kind == OutcomeKind::Val ? to_string(r.v) : r.kind == OutcomeKind::Fail ? "fail" : "nil";
      trace_[slot] = std::string(2 * indent_of(slot), ' ') + rule + "  " + brief(t) + "  k=" + to_string(k) +
                     "  => " + res;
    }
    return r;
  }

  // indentation is recorded on entry
  unsigned indent_of(std::size_t slot) const { return slot < indents_.size() ? indents_[slot] : 0; }

  Res sub(const TermPtr& t, Bound k, unsigned depth) {
    if (opts_.trace) {
      indents_.resize(trace_.size() + 1, 0);
      indents_[trace_.size()] = level_ + 1;
    }
    ++level_;
    Res r = go(t, k, depth);
    --level_;
    return r;
  }

  Res step(const TermPtr& t, Bound k, unsigned depth, const char*& rule) {
    if (k.is_nil()) {
      rule = "nil";
      return {OutcomeKind::Nil, {}};
    }
    switch (t->kind) {
      case TermKind::Fail:
        rule = "fail";
        return {OutcomeKind::Fail, {}};
      case TermKind::Int:
      case TermKind::Unit:
      case TermKind::Meth:
        rule = "val";
        return {OutcomeKind::Val, *as_value(t)};
      case TermKind::Var:
        throw StuckState("free variable " + t->name.id + " during evaluation");
      case TermKind::Deref: {
        rule = "deref";
        auto it = store_.find(t->name);
        if (it == store_.end()) throw StuckState("reference " + t->name.id + " not in store");
        return {OutcomeKind::Val, it->second};
      }
      case TermKind::Lambda: {
        rule = "lambda";
        Name m = gen_.fresh(typecheck(t), repo_);
        repo_.insert(m, MethodDef{t->name, t->kids[0], t->site});
        return {OutcomeKind::Val, Value::meth(m)};
      }
      case TermKind::Proj: {
        Res a = sub(t->kids[0], k, depth);
        if (!a.ok()) {
          rule = "proj/abort";
          return abort_with(a);
        }
        rule = "proj";
        if (a.v.kind != ValueKind::Pair) throw StuckState("projection of a non-pair");
        return {OutcomeKind::Val, t->index == 1 ? a.v.first() : a.v.second()};
      }
      case TermKind::Assign: {
        Res a = sub(t->kids[0], k, depth);
        if (!a.ok()) {
          rule = "assign/abort";
          return abort_with(a);
        }
        rule = "assign";
        store_[t->name] = a.v;
        return {OutcomeKind::Val, Value::unit()};
      }
      case TermKind::BinOp: {
        Res a = sub(t->kids[0], k, depth);
        if (!a.ok()) {
          rule = "binop/abort";
          return abort_with(a);
        }
        Res b = sub(t->kids[1], k, depth);
        if (!b.ok()) {
          rule = "binop/abort";
          return abort_with(b);
        }
        rule = "binop";
        if (a.v.kind != ValueKind::Int || b.v.kind != ValueKind::Int) throw StuckState("arithmetic on non-integers");
        return {OutcomeKind::Val, Value::integer(apply_binop(t->op, a.v.i, b.v.i))};
      }
      case TermKind::Pair: {
        Res a = sub(t->kids[0], k, depth);
        if (!a.ok()) {
          rule = "pair/abort";
          return abort_with(a);
        }
        Res b = sub(t->kids[1], k, depth);
        if (!b.ok()) {
          rule = "pair/abort";
          return abort_with(b);
        }
        rule = "pair";
        return {OutcomeKind::Val, Value::pair(a.v, b.v)};
      }
      case TermKind::Let: {
        Res a = sub(t->kids[0], k, depth);
        if (!a.ok()) {
          rule = "let/abort";
          return abort_with(a);
        }
        rule = "let";
        return sub(substitute(t->kids[1], t->name, to_term(a.v)), k, depth);
      }
      case TermKind::Letrec: {
        rule = "letrec";
        Name m = gen_.fresh(t->name.type, repo_);
        TermPtr mt = mk::meth(m);
        repo_.insert(m, MethodDef{t->param, substitute(t->kids[0], t->name, mt), t->site});
        return sub(substitute(t->kids[1], t->name, mt), k, depth);
      }
      case TermKind::AppMeth: {
        Res a = sub(t->kids[0], k, depth);
        if (!a.ok()) {
          rule = "app/abort";
          return abort_with(a);
        }
        rule = "app";
        const MethodDef* def = repo_.find(t->name);
        if (!def) throw StuckState("method " + t->name.id + " not in repository");
        if (t->via_var && opts_.on_apply) opts_.on_apply(ApplyEvent{t->site, t->name, def->origin});
        TermPtr body = substitute(def->body, def->param, to_term(a.v));
        unsigned d = depth + 1;
        Bound inner = k.decremented();
        // a body entered with nil aborts at once; it is not a call made
        if (!inner.is_nil() && d > stats_.max_call_depth) stats_.max_call_depth = d;
        return sub(body, inner, d);
      }
      case TermKind::AppVar:
        throw StuckState("application of free variable " + t->name.id);
      case TermKind::If: {
        Res c = sub(t->kids[0], k, depth);
        if (!c.ok()) {
          rule = "if/abort";
          return abort_with(c);
        }
        if (c.v.kind != ValueKind::Int) throw StuckState("non-integer condition");
        rule = c.v.i != 0 ? "if/then" : "if/else";
        return sub(c.v.i != 0 ? t->kids[1] : t->kids[2], k, depth);
      }
    }
    throw StuckState("unknown term kind");
  }

  NameGen& gen_;
  const EvalOptions& opts_;
  std::vector<std::string> trace_;
  std::vector<unsigned> indents_;
  unsigned level_ = 0;
};

}  // namespace

Outcome eval(const Config& c, NameGen& g, const EvalOptions& opts, EvalStats* stats) {
  Evaluator ev(c.repo, c.store, g, opts);
  Res r = ev.run(c.term, c.bound);
  if (stats) *stats = ev.stats_;
  Outcome o;
  o.kind = r.kind;
  o.value = r.v;
  o.repo = std::move(ev.repo_);
  o.store = std::move(ev.store_);
  return o;
}

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

Permutation::Permutation(std::map<Name, Name> mapping) : map_(std::move(mapping)) {
  std::set<Name> image;
  for (const auto& [a, b] : map_) {
    if (a.kind != NameKind::Meth || b.kind != NameKind::Meth) {
      throw TypeViolatingPermutation("permutations act on method names only");
    }
    if (!(a.type == b.type)) {
      throw TypeViolatingPermutation("permutation maps " + a.id + " : " + a.type.str() + " to " + b.id + " : " +
                                     b.type.str());
    }
    if (!image.insert(b).second) throw TypeViolatingPermutation("permutation is not injective at " + b.id);
  }
  std::set<Name> domain;
  for (const auto& [a, b] : map_) domain.insert(a);
  if (domain != image) throw TypeViolatingPermutation("permutation support is not closed");
}

Permutation Permutation::swap(const Name& a, const Name& b) {
  if (a == b) return Permutation{};
  return Permutation(std::map<Name, Name>{{a, b}, {b, a}});
}

const Name& Permutation::operator()(const Name& m) const {
  auto it = map_.find(m);
  return it == map_.end() ? m : it->second;
}

Value apply_permutation(const Value& v, const Permutation& pi) {
  switch (v.kind) {
    case ValueKind::Meth:
      return Value::meth(pi(v.name));
    case ValueKind::Pair:
      return Value::pair(apply_permutation(v.first(), pi), apply_permutation(v.second(), pi));
    default:
      return v;
  }
}

TermPtr apply_permutation(const TermPtr& t, const Permutation& pi) {
  if (!t) return t;
  Term copy = *t;
  bool changed = false;
  if ((t->kind == TermKind::Meth || t->kind == TermKind::AppMeth) && !(pi(t->name) == t->name)) {
    copy.name = pi(t->name);
    changed = true;
  }
  for (auto& k : copy.kids) {
    if (!k) continue;
    TermPtr nk = apply_permutation(k, pi);
    if (nk != k) {
      k = nk;
      changed = true;
    }
  }
  return changed ? std::make_shared<const Term>(std::move(copy)) : t;
}

Repository apply_permutation(const Repository& r, const Permutation& pi) {
  Repository out;
  for (const auto& m : r.names()) {
    const auto& def = r.at(m);
    out.insert(pi(m), MethodDef{def.param, apply_permutation(def.body, pi), def.origin});
  }
  return out;
}

Store apply_permutation(const Store& s, const Permutation& pi) {
  Store out;
  for (const auto& [r, v] : s) out.emplace(r, apply_permutation(v, pi));
  return out;
}

Outcome apply_permutation(const Outcome& o, const Permutation& pi) {
  Outcome out;
  out.kind = o.kind;
  out.value = o.kind == OutcomeKind::Val ? apply_permutation(o.value, pi) : o.value;
  out.repo = apply_permutation(o.repo, pi);
  out.store = apply_permutation(o.store, pi);
  return out;
}

// ---------------------------------------------------------------------------
// Nominal equivalence: grow a partial bijection while matching.
// ---------------------------------------------------------------------------

namespace {

class Matcher {
 public:
  explicit Matcher(const std::set<Name>& delta) : delta_(delta) {}

  bool name(const Name& a, const Name& b) {
    if (a.kind != NameKind::Meth || b.kind != NameKind::Meth) return a == b;
    if (!(a.type == b.type)) return false;
    if (delta_.count(a) || delta_.count(b)) return a == b;
    auto f = fwd_.find(a);
    auto r = bwd_.find(b);
    if (f != fwd_.end() || r != bwd_.end()) {
      return f != fwd_.end() && r != bwd_.end() && f->second == b && r->second == a;
    }
    fwd_.emplace(a, b);
    bwd_.emplace(b, a);
    return true;
  }

  bool value(const Value& a, const Value& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case ValueKind::Int:
        return a.i == b.i;
      case ValueKind::Unit:
        return true;
      case ValueKind::Var:
        return a.name == b.name;
      case ValueKind::Meth:
        return name(a.name, b.name);
      case ValueKind::Pair:
        return value(a.first(), b.first()) && value(a.second(), b.second());
    }
    return false;
  }

  bool term(const TermPtr& a, const TermPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    if (a->value != b->value || a->op != b->op || a->index != b->index) return false;
    if (a->kind == TermKind::Fail && !(a->fail_type == b->fail_type)) return false;
    if (a->kind == TermKind::Meth || a->kind == TermKind::AppMeth) {
      if (!name(a->name, b->name)) return false;
    } else if (!(a->name == b->name)) {
      return false;
    }
    if (!(a->param == b->param)) return false;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!term(a->kids[i], b->kids[i])) return false;
    }
    return true;
  }

 private:
  const std::set<Name>& delta_;
  std::map<Name, Name> fwd_, bwd_;
};

}  // namespace

bool nominally_equiv(const Value& a, const Value& b, const std::set<Name>& delta) {
  Matcher m(delta);
  return m.value(a, b);
}

bool nominally_equiv(const TermPtr& a, const TermPtr& b, const std::set<Name>& delta) {
  Matcher m(delta);
  return m.term(a, b);
}

bool nominally_equiv(const Outcome& a, const Outcome& b, const std::set<Name>& delta) {
  if (a.kind != b.kind) return false;
  if (a.repo.size() != b.repo.size() || a.store.size() != b.store.size()) return false;
  Matcher m(delta);
  const auto& na = a.repo.names();
  const auto& nb = b.repo.names();
  for (std::size_t i = 0; i < na.size(); ++i) {
    if (!m.name(na[i], nb[i])) return false;
  }
  for (std::size_t i = 0; i < na.size(); ++i) {
    const auto& da = a.repo.at(na[i]);
    const auto& db = b.repo.at(nb[i]);
    if (!(da.param == db.param) || !m.term(da.body, db.body)) return false;
  }
  if (a.kind == OutcomeKind::Val && !m.value(a.value, b.value)) return false;
  auto ia = a.store.begin();
  auto ib = b.store.begin();
  for (; ia != a.store.end(); ++ia, ++ib) {
    if (!(ia->first == ib->first) || !m.value(ia->second, ib->second)) return false;
  }
  return true;
}

}  // namespace hobmc
