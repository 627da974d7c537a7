#include <regex>
#include <sstream>

#include "hobmc/surface.hpp"

namespace hobmc {

namespace {

std::string located_message(SourceLoc loc, const std::string& msg) {
  if (!loc.known()) return msg;
  std::ostringstream os;
  os << loc.line << ":" << loc.column << ": " << msg;
  return os.str();
}

TermPtr at(TermPtr t, SourceLoc loc) {
  if (!loc.known()) return t;
  return mk::located(t, loc, t->site);
}

}  // namespace

ElaborationError::ElaborationError(SourceLoc loc, const std::string& msg)
    : std::runtime_error(located_message(loc, msg)), loc_(loc) {}

DesugarContext::DesugarContext(std::map<std::string, Name> refs, std::map<std::string, Name> methods,
                               std::set<std::string> reserved)
    : refs_(std::move(refs)), methods_(std::move(methods)), taken_(std::move(reserved)) {
  for (const auto& [s, n] : methods_) taken_.insert(s);
  scopes_.emplace_back();
}

void DesugarContext::check_type(const std::string& source, const Type& t, SourceLoc loc) {
  if (methods_.count(source)) {
    throw ElaborationError(loc, "variable " + source + " clashes with a method of the same name");
  }
  auto [it, inserted] = var_types_.emplace(source, t);
  if (!inserted && !(it->second == t)) {
    throw ElaborationError(loc, "variable " + source + " used with types " + it->second.str() + " and " + t.str() +
                                    " (one name, one type)");
  }
}

std::string DesugarContext::unused(const std::string& base) {
  static const std::regex generated("^(ret|fn)[0-9]+$");
  if (!taken_.count(base) && !std::regex_match(base, generated)) return base;
  for (unsigned i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken_.count(candidate)) return candidate;
  }
}

Name DesugarContext::bind(const std::string& source, const Type& t, SourceLoc loc) {
  check_type(source, t, loc);
  // The first binder of a spelling keeps it, unless it is already free.
  // Spellings of generated variables are renamed too, so substituting a
  // generated name never lands under a user binder of the same name.
  static const std::regex generated("^(ret|fn)[0-9]+$");
  bool rename = bound_once_.count(source) || free_.count(source) || std::regex_match(source, generated);
  std::string id = rename ? unused(source) : source;
  bound_once_.insert(source);
  taken_.insert(id);
  return Name::var(id, t);
}

Name DesugarContext::declare_free(const std::string& source, const Type& t, SourceLoc loc) {
  check_type(source, t, loc);
  free_.insert(source);
  taken_.insert(source);
  Name n = Name::var(source, t);

  return n;
}

Name DesugarContext::fresh(const std::string& prefix, const Type& t) {
  std::string id = unused(prefix + std::to_string(++fresh_counter_));
  taken_.insert(id);
  return Name::var(id, t);
}

const Name* DesugarContext::lookup_var(const std::string& source) const {
  for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
    auto f = it->find(source);
    if (f != it->end()) return &f->second;
  }
  return nullptr;
}

const Name* DesugarContext::lookup_method(const std::string& source) const {
  auto it = methods_.find(source);
  return it == methods_.end() ? nullptr : &it->second;
}

const Name& DesugarContext::lookup_ref(const std::string& source, SourceLoc loc) const {
  auto it = refs_.find(source);
  if (it == refs_.end()) throw ElaborationError(loc, "undeclared reference " + source);
  return it->second;
}

namespace {

class Desugarer {
 public:
  explicit Desugarer(DesugarContext& ctx) : ctx_(ctx) {}

  TermPtr run(const SurfacePtr& t, const std::optional<Type>& expected) {
    TermPtr out = go(t, expected);
    return out;
  }

 private:
  Type type_of(const TermPtr& t, SourceLoc loc) {
    try {
      return typecheck(t);
    } catch (const TypeError& e) {
      throw ElaborationError(loc, e.what());
    }
  }

  static bool is_fail(const SurfacePtr& t) { return t->kind == SurfaceKind::Fail; }

  /// Applies `head` (a variable or method of arrow type) to the arguments,
  /// binding each intermediate function result with a let.
  TermPtr apply_chain(const Name& head, const std::vector<SurfacePtr>& args, std::size_t i, SourceLoc loc) {
    const Type& ht = head.type;
    if (!ht.is_arrow()) throw ElaborationError(loc, "application of non-function " + head.id + " : " + ht.str());
    TermPtr arg = go(args[i], ht.left());
    TermPtr app = head.kind == NameKind::Meth ? mk::app_meth(head, arg) : mk::app_var(head, arg);
    app = at(app, loc);
    if (i + 1 == args.size()) return app;
    Name tmp = ctx_.fresh("_t", ht.right());
    TermPtr rest = apply_chain(tmp, args, i + 1, loc);
    return at(mk::let(tmp, app, rest), loc);
  }

  TermPtr lambda_chain(const std::vector<Param>& params, std::size_t i, const SurfacePtr& body,
                       std::optional<Type> expected, SourceLoc loc) {
    if (i == params.size()) return go(body, expected);
    const Param& p = params[i];
    std::optional<Type> inner;
    if (expected && expected->is_arrow()) inner = expected->right();
    ctx_.push_scope();
    Name x = ctx_.bind(p.name, p.type, loc);
    ctx_.add_to_scope(p.name, x);
    TermPtr b = lambda_chain(params, i + 1, body, inner, loc);
    ctx_.pop_scope();
    return at(mk::lambda(x, b), loc);
  }

  TermPtr go(const SurfacePtr& t, const std::optional<Type>& expected) {
    const SourceLoc loc = t->loc;
    switch (t->kind) {
      case SurfaceKind::Fail:
        return at(mk::fail(expected ? *expected : Type::unit()), loc);
      case SurfaceKind::Int:
        return at(mk::integer(t->value), loc);
      case SurfaceKind::Unit:
        return at(mk::unit(), loc);
      case SurfaceKind::Ident: {
        if (const Name* x = ctx_.lookup_var(t->ident)) return at(mk::var(*x), loc);
        if (const Name* m = ctx_.lookup_method(t->ident)) return at(mk::meth(*m), loc);
        throw ElaborationError(loc, "unbound identifier " + t->ident);
      }
      case SurfaceKind::Assign: {
        const Name& r = ctx_.lookup_ref(t->ident, loc);
        return at(mk::assign(r, go(t->kids[0], r.type)), loc);
      }
      case SurfaceKind::Deref:
        return at(mk::deref(ctx_.lookup_ref(t->ident, loc)), loc);
      case SurfaceKind::Incr: {
        const Name& r = ctx_.lookup_ref(t->ident, loc);
        if (!(r.type == Type::integer())) throw ElaborationError(loc, t->ident + "++ on a non-Int reference");
        return at(mk::assign(r, at(mk::binop(BinOpKind::Add, at(mk::deref(r), loc), at(mk::integer(1), loc)), loc)),
                  loc);
      }
      case SurfaceKind::BinOp:
        return at(mk::binop(t->op, go(t->kids[0], Type::integer()), go(t->kids[1], Type::integer())), loc);
      case SurfaceKind::Pair: {
        std::optional<Type> l, r;
        if (expected && expected->is_prod()) {
          l = expected->left();
          r = expected->right();
        }
        TermPtr a = go(t->kids[0], l);
        TermPtr b = go(t->kids[1], r);
        return at(mk::pair(a, b), loc);
      }
      case SurfaceKind::Proj: {
        if (!t->annot.is_prod()) throw ElaborationError(loc, "projection annotation must be a product type");
        return at(mk::proj(t->index, go(t->kids[0], t->annot)), loc);
      }
      case SurfaceKind::App: {
        const SurfacePtr& head = t->kids[0];
        std::vector<SurfacePtr> args(t->kids.begin() + 1, t->kids.end());
        if (head->kind == SurfaceKind::Ident) {
          if (const Name* x = ctx_.lookup_var(head->ident)) return apply_chain(*x, args, 0, loc);
          if (const Name* m = ctx_.lookup_method(head->ident)) return apply_chain(*m, args, 0, loc);
          throw ElaborationError(head->loc, "unbound identifier " + head->ident);
        }
        // General application M N: bind the head first.
        TermPtr h = go(head, std::nullopt);
        Type ht = type_of(h, head->loc);
        Name tmp = ctx_.fresh("_t", ht);
        return at(mk::let(tmp, h, apply_chain(tmp, args, 0, loc)), loc);
      }
      case SurfaceKind::If: {
        TermPtr c = go(t->kids[0], Type::integer());
        std::optional<Type> want = expected;
        TermPtr a, b;
        if (!want && is_fail(t->kids[1]) && !is_fail(t->kids[2])) {
          b = go(t->kids[2], std::nullopt);
          want = type_of(b, t->kids[2]->loc);
          a = go(t->kids[1], want);
        } else {
          a = go(t->kids[1], want);
          if (!want) want = type_of(a, t->kids[1]->loc);
          b = go(t->kids[2], want);
        }
        return at(mk::ite(c, a, b), loc);
      }
      case SurfaceKind::Let: {
        TermPtr bound = go(t->kids[0], t->annot);
        ctx_.push_scope();
        Name x = ctx_.bind(t->ident, t->annot, loc);
        ctx_.add_to_scope(t->ident, x);
        TermPtr body = go(t->kids[1], expected);
        ctx_.pop_scope();
        return at(mk::let(x, bound, body), loc);
      }
      case SurfaceKind::Letrec: {
        if (t->params.empty()) throw ElaborationError(loc, "letrec needs a function");
        const Type& ft = t->annot;
        if (!ft.is_arrow()) throw ElaborationError(loc, "letrec " + t->ident + " must have an arrow type");
        ctx_.push_scope();
        Name f = ctx_.bind(t->ident, ft, loc);
        ctx_.add_to_scope(t->ident, f);
        // Function part: first parameter belongs to the letrec itself.
        ctx_.push_scope();
        const Param& p0 = t->params.front();
        if (!(p0.type == ft.left())) {
          throw ElaborationError(loc, "letrec " + t->ident + " parameter type does not match its annotation");
        }
        Name x = ctx_.bind(p0.name, p0.type, loc);
        ctx_.add_to_scope(p0.name, x);
        std::vector<Param> rest(t->params.begin() + 1, t->params.end());
        TermPtr fn_body = lambda_chain(rest, 0, t->kids[0], ft.right(), loc);
        ctx_.pop_scope();
        TermPtr body = go(t->kids[1], expected);
        ctx_.pop_scope();
        return at(mk::letrec(f, x, fn_body, body), loc);
      }
      case SurfaceKind::Lambda:
        return lambda_chain(t->params, 0, t->kids[0], expected, loc);
      case SurfaceKind::Seq: {
        TermPtr first = go(t->kids[0], std::nullopt);
        Type ft = type_of(first, t->kids[0]->loc);
        Name tmp = ctx_.fresh("_", ft);
        TermPtr second = go(t->kids[1], expected);
        return at(mk::let(tmp, first, second), loc);
      }
      case SurfaceKind::Assert: {
        TermPtr c = go(t->kids[0], Type::integer());
        return at(mk::ite(c, at(mk::unit(), loc), at(mk::fail(Type::unit()), loc)), loc);
      }
    }
    throw ElaborationError(loc, "unknown surface construct");
  }

  DesugarContext& ctx_;
};

}  // namespace

TermPtr desugar(const SurfacePtr& t, DesugarContext& ctx, const std::optional<Type>& expected) {
  return Desugarer(ctx).run(t, expected);
}

}  // namespace hobmc
