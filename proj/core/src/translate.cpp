#include "hobmc/translate.hpp"

#include <algorithm>
#include <sstream>

namespace hobmc {

SSAMap::SSAMap(const std::vector<Name>& refs) {
  for (const auto& r : refs) versions_.emplace(r, 0);
}

unsigned SSAMap::version(const Name& r) const {
  auto it = versions_.find(r);
  if (it == versions_.end()) throw InvariantViolation("reference " + r.id + " outside the SSA domain");
  return it->second;
}

LogVar SSAMap::at(const Name& r) const { return ssa_var(r, version(r)); }

std::vector<Name> SSAMap::domain() const {
  std::vector<Name> out;
  for (const auto& [r, v] : versions_) out.push_back(r);
  return out;
}

LogVar ssa_var(const Name& r, unsigned version) { return {r.id + "_" + std::to_string(version), r.type}; }

std::map<Name, std::int64_t> method_ids(const Repository& repo) {
  std::map<Name, std::int64_t> ids;
  std::int64_t i = 0;
  for (const auto& m : repo.names()) ids.emplace(m, i++);
  return ids;
}

ExprPtr value_expr(const Value& v, const std::map<Name, std::int64_t>& ids) {
  switch (v.kind) {
    case ValueKind::Int:
      return fm::integer(v.i);
    case ValueKind::Unit:
      return fm::unit();
    case ValueKind::Meth: {
      auto it = ids.find(v.name);
      if (it == ids.end()) throw InvariantViolation("method " + v.name.id + " has no id");
      return fm::meth(it->second, v.name.type);
    }
    case ValueKind::Var:
      return fm::var(LogVar{v.name.id, v.name.type});
    case ValueKind::Pair:
      return fm::pair(value_expr(v.first(), ids), value_expr(v.second(), ids));
  }
  throw InvariantViolation("unknown value");
}

SymbolicConfig build_initial(const Config& c) {
  SymbolicConfig sc;
  std::vector<Name> refs;
  for (const auto& [r, v] : c.store) refs.push_back(r);
  sc.C = SSAMap(refs);
  sc.D = sc.C;
  auto ids = method_ids(c.repo);
  for (const auto& [r, v] : c.store) sc.phi.push_back(fm::eq(fm::var(ssa_var(r, 0)), value_expr(v, ids)));
  sc.term = c.term;
  sc.repo = c.repo;
  sc.bound = c.bound;
  return sc;
}

namespace {

/// Type of a well-typed term, following only the spine.
Type type_of_term(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Fail:
      return t->fail_type;
    case TermKind::Var:
    case TermKind::Meth:
    case TermKind::Deref:
      return t->name.type;
    case TermKind::Int:
    case TermKind::BinOp:
      return Type::integer();
    case TermKind::Unit:
    case TermKind::Assign:
      return Type::unit();
    case TermKind::Pair:
      return Type::prod(type_of_term(t->kids[0]), type_of_term(t->kids[1]));
    case TermKind::Proj: {
      Type p = type_of_term(t->kids[0]);
      return t->index == 1 ? p.left() : p.right();
    }
    case TermKind::AppVar:
    case TermKind::AppMeth:
      return t->name.type.right();
    case TermKind::If:
      return type_of_term(t->kids[2]);
    case TermKind::Let:
      return type_of_term(t->kids[1]);
    case TermKind::Letrec:
      return type_of_term(t->kids[1]);
    case TermKind::Lambda:
      return Type::arrow(t->name.type, type_of_term(t->kids[0]));
  }
  throw InvariantViolation("unknown term");
}

struct Out {
  LogVar ret;
  Q q = Q::Zero;
  PtsSet A;
};

class Engine {
 public:
  Engine(const SymbolicConfig& sc, const PtMap* pt, const TranslateOptions& opts)
      : repo_(sc.repo), C_(sc.C), D_(sc.D), use_pt_(pt != nullptr), opts_(opts) {
    if (pt) pt_ = *pt;
    ids_ = method_ids(repo_);
    for (const auto& m : repo_.names()) used_method_ids_.insert(m.id);
    for (const auto& x : free_vars(sc.term)) {
      if (!x.type.is_ground()) {
        throw ConfigError(ConfigError::Kind::NonGroundFreeVar,
                          "free variable " + x.id + " : " + x.type.str() + " is not of ground type");
      }
      LogVar lv{x.id, x.type};
      declare(lv);
      inputs_.push_back(lv);
    }
    for (const auto& r : C_.domain()) {
      for (unsigned v = 0; v <= C_.version(r); ++v) declare(ssa_var(r, v));
    }
  }

  Out run(const TermPtr& t, Bound k) { return go(t, k); }

  TranslationResult finish(const SymbolicConfig& sc, const Out& o) {
    TranslationResult r;
    r.ret = o.ret;
    r.q = o.q;
    r.phi = sc.phi;
    for (auto& c : clauses_) r.phi.push_back(c);
    r.repo = repo_;
    r.C = C_;
    r.D = D_;
    r.decls = decls_;
    for (const auto& m : repo_.names()) r.methods.push_back(SmtMethod{ids_.at(m), m.id, m.type});
    r.clause_info = info_;
    stats_.vars = decls_.size();
    stats_.clauses = r.phi.size();
    r.stats = stats_;
    r.inputs = inputs_;
    return r;
  }

  PtMap pt_;

 private:
  void declare(const LogVar& v) {
    if (declared_.insert(v.name).second) decls_.push_back(v);
  }

  LogVar fresh_ret(const Type& t) {
    std::string name;
    do {
      name = "ret" + std::to_string(++ret_counter_);
    } while (declared_.count(name));
    LogVar v{name, t};
    declare(v);
    return v;
  }

  LogVar fresh_fn(const Type& t) {
    std::string name;
    do {
      name = "fn" + std::to_string(++fn_counter_);
    } while (declared_.count(name));
    LogVar v{name, t};
    declare(v);
    return v;
  }

  Name fresh_method(const Type& t) {
    std::int64_t id = static_cast<std::int64_t>(repo_.size());
    std::string spelling = "m" + std::to_string(id);
    for (unsigned i = 1; used_method_ids_.count(spelling); ++i) spelling = "m" + std::to_string(id) + "_" + std::to_string(i);
    used_method_ids_.insert(spelling);
    return Name::meth(spelling, t);
  }

  void add_method(const Name& m, MethodDef def) {
    std::size_t before = repo_.size();
    ids_.emplace(m, static_cast<std::int64_t>(before));
    repo_.insert(m, std::move(def));
  }

  static Name as_name(const LogVar& v) { return Name::var(v.name, v.sort); }
  static TermPtr as_term(const LogVar& v) { return mk::var(as_name(v)); }
  static ExprPtr ev(const LogVar& v) { return fm::var(v); }

  void check_limit() const {
    if (opts_.max_clauses && clauses_.size() >= opts_.max_clauses) {
      throw TranslationLimit("translation exceeds " + std::to_string(opts_.max_clauses) + " clauses");
    }
  }

  std::size_t reserve(const TermPtr& t, const char* rule) {
    check_limit();
    clauses_.push_back(nullptr);
    info_.push_back(ClauseInfo{rule, t->loc, t->site});
    return clauses_.size() - 1;
  }

  void fill(std::size_t slot, FormulaPtr f) { clauses_[slot] = std::move(f); }

  void append(const TermPtr& t, const char* rule, FormulaPtr f) {
    check_limit();
    clauses_.push_back(std::move(f));
    info_.push_back(ClauseInfo{rule, t->loc, t->site});
  }

  FormulaPtr F(const LogVar& a, const LogVar& b, FormulaPtr phi, Q q) const {
    return opts_.prune ? prune_F(a, b, std::move(phi), q) : guard_F(a, b, std::move(phi));
  }

  ExprPtr atom(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Int:
        return fm::integer(t->value);
      case TermKind::Unit:
        return fm::unit();
      case TermKind::Meth: {
        auto it = ids_.find(t->name);
        if (it == ids_.end()) throw InvariantViolation("method " + t->name.id + " not in the repository");
        return fm::meth(it->second, t->name.type);
      }
      case TermKind::Var:
        if (!declared_.count(t->name.id)) throw InvariantViolation("variable " + t->name.id + " escaped its binder");
        return fm::var(LogVar{t->name.id, t->name.type});
      default:
        throw InvariantViolation("not an atom");
    }
  }

  const PtsSet& pt_of(const Name& n) const {
    auto it = pt_.find(n);
    if (it == pt_.end()) throw MissingPtEntry("no points-to entry for " + n.id);
    return it->second;
  }

  FormulaPtr joins(const SSAMap& Di) const {
    std::vector<FormulaPtr> parts;
    for (const auto& r : C_.domain()) parts.push_back(fm::eq(ev(C_.at(r)), ev(Di.at(r))));
    return fm::conj(std::move(parts));
  }

  void bump_all() {
    for (const auto& r : C_.domain()) {
      C_.bump(r);
      declare(C_.at(r));
    }
  }

  Out go(const TermPtr& t, Bound k) {
    const Type ty = type_of_term(t);
    if (k.is_nil()) {
      LogVar r = fresh_ret(ty);
      append(t, "nil", fm::eq(ev(r), fm::nil(ty)));
      return {r, Q::Nil, PtsSet::empty_for(ty)};
    }
    switch (t->kind) {
      case TermKind::Fail: {
        LogVar r = fresh_ret(ty);
        append(t, "fail", fm::eq(ev(r), fm::fail(ty)));
        return {r, Q::Fail, PtsSet::empty_for(ty)};
      }
      case TermKind::Int:
      case TermKind::Unit:
      case TermKind::Meth:
      case TermKind::Var: {
        LogVar r = fresh_ret(ty);
        append(t, "value", fm::eq(ev(r), atom(t)));
        PtsSet A = PtsSet::empty_for(ty);
        if (use_pt_) {
          if (t->kind == TermKind::Meth) A = PtsSet::names({t->name});
          if (t->kind == TermKind::Var) A = pt_of(t->name);
        }
        return {r, Q::Zero, A};
      }
      case TermKind::Deref: {
        LogVar r = fresh_ret(ty);
        append(t, "deref", fm::eq(ev(r), ev(D_.at(t->name))));
        return {r, Q::Zero, use_pt_ ? pt_of(t->name) : PtsSet::empty_for(ty)};
      }
      case TermKind::Lambda: {
        LogVar r = fresh_ret(ty);
        Name m = fresh_method(ty);
        add_method(m, MethodDef{t->name, t->kids[0], t->site});
        append(t, "lambda", fm::eq(ev(r), fm::meth(ids_.at(m), ty)));
        return {r, Q::Zero, PtsSet::names({m})};
      }
      case TermKind::Proj: {
        LogVar r = fresh_ret(ty);
        std::size_t slot = reserve(t, "proj");
        Out a = go(t->kids[0], k);
        fill(slot, F(a.ret, r, fm::eq(ev(r), fm::proj(t->index, ev(a.ret))), a.q));
        return {r, a.q, use_pt_ ? a.A.project(t->index) : PtsSet::empty_for(ty)};
      }
      case TermKind::Assign: {
        LogVar r = fresh_ret(ty);
        std::size_t slot = reserve(t, "assign");
        Out a = go(t->kids[0], k);
        C_.bump(t->name);
        declare(C_.at(t->name));
        D_.set(t->name, C_.version(t->name));
        fill(slot, F(a.ret, r, fm::conj({fm::eq(ev(r), fm::unit()), fm::eq(ev(D_.at(t->name)), ev(a.ret))}), a.q));
        if (use_pt_) pt_[t->name] = a.A;
        return {r, a.q, PtsSet{}};
      }
      case TermKind::BinOp: {
        LogVar r = fresh_ret(ty);
        std::size_t slot = reserve(t, "binop");
        Out a = go(t->kids[0], k);
        Out b = go(t->kids[1], k);
        if (t->op == BinOpKind::Div || t->op == BinOpKind::Mod) stats_.division = true;
        FormulaPtr body = fm::eq(ev(r), fm::arith(t->op, ev(a.ret), ev(b.ret)));
        fill(slot, F(a.ret, r, F(b.ret, r, body, b.q), a.q));
        return {r, a.q + b.q, PtsSet{}};
      }
      case TermKind::Pair: {
        LogVar r = fresh_ret(ty);
        std::size_t slot = reserve(t, "pair");
        Out a = go(t->kids[0], k);
        Out b = go(t->kids[1], k);
        FormulaPtr body = fm::eq(ev(r), fm::pair(ev(a.ret), ev(b.ret)));
        fill(slot, F(a.ret, r, F(b.ret, r, body, b.q), a.q));
        PtsSet A = ty.is_ground() || !use_pt_ ? PtsSet::empty_for(ty) : PtsSet::pair(a.A, b.A);
        return {r, a.q + b.q, A};
      }
      case TermKind::Let: {
        LogVar r = fresh_ret(ty);
        std::size_t slot = reserve(t, "let");
        Out a = go(t->kids[0], k);
        if (use_pt_) pt_[as_name(a.ret)] = a.A;
        Out b = go(substitute(t->kids[1], t->name, as_term(a.ret)), k);
        fill(slot, F(a.ret, r, F(b.ret, r, fm::eq(ev(r), ev(b.ret)), b.q), a.q));
        return {r, a.q + b.q, b.A};
      }
      case TermKind::Letrec: {
        Name m = fresh_method(t->name.type);
        LogVar f = fresh_fn(t->name.type);
        TermPtr fref = as_term(f);
        add_method(m, MethodDef{t->param, substitute(t->kids[0], t->name, fref), t->site});
        append(t, "letrec", fm::eq(ev(f), fm::meth(ids_.at(m), m.type)));
        if (use_pt_) pt_[as_name(f)] = PtsSet::names({m});
        return go(substitute(t->kids[1], t->name, fref), k);
      }
      case TermKind::AppMeth: {
        LogVar r = fresh_ret(ty);
        std::size_t slot = reserve(t, "app");
        Out a = go(t->kids[0], k);
        if (use_pt_) pt_[as_name(a.ret)] = a.A;
        const MethodDef* found = repo_.find(t->name);
        if (!found) throw InvariantViolation("method " + t->name.id + " not in the repository");
        MethodDef def = *found;
        ++depth_;
        Out b = go(substitute(def.body, def.param, as_term(a.ret)), k.decremented());
        --depth_;
        fill(slot, F(a.ret, r, F(b.ret, r, fm::eq(ev(r), ev(b.ret)), b.q), a.q));
        return {r, a.q + b.q, b.A};
      }
      case TermKind::If: {
        LogVar r = fresh_ret(ty);
        std::size_t slot = reserve(t, "if");
        Out b = go(t->kids[0], k);
        const SSAMap Db = D_;
        const PtMap ptb = use_pt_ ? pt_ : PtMap{};
        Out o0 = go(t->kids[2], k);
        const SSAMap D0 = D_;
        PtMap pt0 = use_pt_ ? pt_ : PtMap{};
        D_ = Db;
        if (use_pt_) pt_ = ptb;
        Out o1 = go(t->kids[1], k);
        const SSAMap D1 = D_;
        bump_all();
        FormulaPtr psi0 = fm::implies(fm::eq(ev(b.ret), fm::integer(0)),
                                      F(o0.ret, r, fm::conj({fm::eq(ev(r), ev(o0.ret)), joins(D0)}), o0.q));
        FormulaPtr psi1 = fm::implies(fm::neq(ev(b.ret), fm::integer(0)),
                                      F(o1.ret, r, fm::conj({fm::eq(ev(r), ev(o1.ret)), joins(D1)}), o1.q));
        fill(slot, F(b.ret, r, fm::conj({psi0, psi1}), b.q));
        D_ = C_;
        PtsSet A;
        if (use_pt_) {
          pt_ = pt_merge({pt0, pt_});
          A = pts_union(o0.A, o1.A);
        } else {
          A = PtsSet::empty_for(ty);
        }
        return {r, b.q + o0.q + o1.q, A};
      }
      case TermKind::AppVar: {
        LogVar r = fresh_ret(ty);
        std::size_t slot = reserve(t, "app-var");
        const std::size_t snapshot = repo_.size();
        Out a = go(t->kids[0], k);
        const Name& x = t->name;
        std::vector<Name> candidates;
        if (use_pt_) {
          const auto& names = pt_of(x).names();
          candidates.assign(names.begin(), names.end());
          std::sort(candidates.begin(), candidates.end(),
                    [&](const Name& p, const Name& q) { return ids_.at(p) < ids_.at(q); });
        } else {
          const auto& all = repo_.names();
          for (std::size_t i = 0; i < snapshot; ++i) {
            if (all[i].type == x.type) candidates.push_back(all[i]);
          }
        }
        BranchStat bs{depth_, candidates.size(), t->site, {}};
        for (const auto& m : candidates) bs.origins.push_back(repo_.at(m).origin);
        stats_.applications.push_back(std::move(bs));
        stats_.branches += candidates.size();
        if (candidates.empty()) {
          fill(slot, fm::eq(ev(r), fm::nil(ty)));
          return {r, Q::Nil, PtsSet::empty_for(ty)};
        }
        const SSAMap D0 = D_;
        PtMap pt0;
        if (use_pt_) {
          pt0 = pt_;
          pt0[as_name(a.ret)] = a.A;
        }
        std::vector<Out> outs;
        std::vector<SSAMap> Ds;
        std::vector<PtMap> pts;
        for (const auto& m : candidates) {
          D_ = D0;
          if (use_pt_) pt_ = pt0;
          MethodDef def = repo_.at(m);
          ++depth_;
          outs.push_back(go(substitute(def.body, def.param, as_term(a.ret)), k.decremented()));
          --depth_;
          Ds.push_back(D_);
          if (use_pt_) pts.push_back(pt_);
        }
        bump_all();
        std::vector<FormulaPtr> psi;
        Q q = a.q;
        PtsSet A;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          const Out& o = outs[i];
          FormulaPtr branch = fm::conj({F(o.ret, r, fm::eq(ev(r), ev(o.ret)), o.q), joins(Ds[i])});
          psi.push_back(fm::implies(fm::eq(fm::var(LogVar{x.id, x.type}), fm::meth(ids_.at(candidates[i]), x.type)),
                                    branch));
          q += o.q;
          if (use_pt_) A = pts_union(A, o.A);
        }
        fill(slot, F(a.ret, r, fm::conj(std::move(psi)), a.q));
        D_ = C_;
        if (use_pt_) {
          pt_ = pt_merge(pts);
        } else {
          A = PtsSet::empty_for(ty);
        }
        return {r, q, A};
      }
    }
    throw InvariantViolation("unknown term kind");
  }

  Repository repo_;
  SSAMap C_;
  SSAMap D_;
  bool use_pt_;
  TranslateOptions opts_;
  std::vector<FormulaPtr> clauses_;
  std::vector<ClauseInfo> info_;
  std::vector<LogVar> decls_;
  std::vector<LogVar> inputs_;
  std::set<std::string> declared_;
  std::map<Name, std::int64_t> ids_;
  std::set<std::string> used_method_ids_;
  unsigned ret_counter_ = 0;
  unsigned fn_counter_ = 0;
  unsigned depth_ = 0;
  TranslationStats stats_;
};

void check_repo_preserved(const Repository& before, const Repository& after) {
  if (after.size() < before.size()) throw InvariantViolation("translation shrank the repository");
  const auto& a = before.names();
  const auto& b = after.names();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] == b[i])) throw InvariantViolation("translation changed repository entry " + a[i].id);
  }
}

}  // namespace

TranslationResult translate(const SymbolicConfig& sc, const TranslateOptions& opts) {
  Engine e(sc, nullptr, opts);
  Out o = e.run(sc.term, sc.bound);
  TranslationResult r = e.finish(sc, o);
  check_repo_preserved(sc.repo, r.repo);
  return r;
}

OptTranslation translate_with_pt(const SymbolicConfig& sc, const PtMap& pt, const TranslateOptions& opts) {
  Engine e(sc, &pt, opts);
  Out o = e.run(sc.term, sc.bound);
  OptTranslation out{e.finish(sc, o), o.A, e.pt_};
  check_repo_preserved(sc.repo, out.result.repo);
  return out;
}

namespace {

void local_q(const TermPtr& t, Q& q, bool& applies) {
  if (!t) return;
  if (t->kind == TermKind::Fail) q += Q::Fail;
  if (t->kind == TermKind::AppVar || t->kind == TermKind::AppMeth) {
    q += Q::Nil;
    applies = true;
  }
  for (const auto& k : t->kids) local_q(k, q, applies);
}

}  // namespace

Q reachability_q(const TermPtr& term, const Repository& repo) {
  Q q = Q::Zero;
  bool applies = false;
  local_q(term, q, applies);
  if (applies) {
    for (const auto& m : repo.names()) {
      bool ignored = false;
      Q body = Q::Zero;
      local_q(repo.at(m).body, body, ignored);
      if (body == Q::Fail || body == Q::Both) q += Q::Fail;
    }
  }
  return q;
}

std::string dump_clauses(const TranslationResult& r) {
  std::ostringstream os;
  std::size_t offset = r.phi.size() - r.clause_info.size();
  for (std::size_t i = 0; i < offset; ++i) os << "[pre] " << to_smt(r.phi[i]) << "\n";
  for (std::size_t i = 0; i < r.clause_info.size(); ++i) {
    const auto& info = r.clause_info[i];
    os << "[" << info.rule;
    if (info.loc.known()) os << " @" << info.loc.line << ":" << info.loc.column;
    os << "] " << to_smt(r.phi[offset + i]) << "\n";
  }
  return os.str();
}

}  // namespace hobmc
