#include "hobmc/checker.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hobmc/pointsto.hpp"

namespace hobmc {

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Sat:
      return "sat";
    case SolverStatus::Unsat:
      return "unsat";
    case SolverStatus::Unknown:
      return "unknown";
  }
  return "?";
}

const char* to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Sat:
      return "sat";
    case VerdictKind::Unsat:
      return "unsat";
    case VerdictKind::Unknown:
      return "unknown";
    case VerdictKind::Verified:
      return "verified";
    case VerdictKind::BoundReached:
      return "bound-reached";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool executable_exists(const std::string& path) {
  if (path.find('/') != std::string::npos) return ::access(path.c_str(), X_OK) == 0;
  const char* env = std::getenv("PATH");
  if (!env) return false;
  std::stringstream ss(env);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) dir = ".";
    if (::access((dir + "/" + path).c_str(), X_OK) == 0) return true;
  }
  return false;
}

std::string write_temp(const std::string& text, const std::string& dir) {
  std::string tmpl = dir + "/hobmc-XXXXXX.smt2";
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  int fd = ::mkstemps(buf.data(), 5);
  if (fd < 0) throw SolverError(SolverError::Kind::Error, std::string("cannot create temp file: ") + std::strerror(errno));
  std::size_t off = 0;
  while (off < text.size()) {
    ssize_t n = ::write(fd, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw SolverError(SolverError::Kind::Error, std::string("cannot write temp file: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  ::close(fd);
  return std::string(buf.data());
}

struct RawRun {
  std::string out;
  double seconds = 0;
  std::string file;
};

RawRun spawn(const std::string& smtlib, const SolverConfig& cfg) {
  if (!executable_exists(cfg.path)) throw SolverError(SolverError::Kind::NotFound, "solver not found: " + cfg.path);
  RawRun run;
  run.file = write_temp(smtlib, cfg.temp_dir);
  auto cleanup = [&] {
    if (!cfg.keep_files) ::unlink(run.file.c_str());
  };

  int fds[2];
  if (::pipe(fds) != 0) {
    cleanup();
    throw SolverError(SolverError::Kind::Error, "pipe failed");
  }
  auto t0 = Clock::now();
  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    cleanup();
    throw SolverError(SolverError::Kind::Error, "fork failed");
  }
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    ::execlp(cfg.path.c_str(), cfg.path.c_str(), run.file.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);

  auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeout_seconds));
  bool timed_out = false;
  char buf[8192];
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(left, 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (rc == 0) continue;
    ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;
    run.out.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fds[0]);
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  run.seconds = since(t0);
  cleanup();
  if (timed_out) {
    throw SolverError(SolverError::Kind::Timeout, "solver timed out after " + std::to_string(cfg.timeout_seconds) + " s");
  }
  if (WIFSIGNALED(status)) {
    throw SolverError(SolverError::Kind::Crashed, "solver killed by signal " + std::to_string(WTERMSIG(status)));
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127 && run.out.empty()) {
    throw SolverError(SolverError::Kind::NotFound, "could not execute " + cfg.path);
  }
  if (!cfg.keep_files) run.file.clear();
  return run;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::optional<SolverStatus> status_word(const std::string& line) {
  if (line == "sat") return SolverStatus::Sat;
  if (line == "unsat") return SolverStatus::Unsat;
  if (line == "unknown") return SolverStatus::Unknown;
  return std::nullopt;
}

}  // namespace

SolverResult run_solver(const std::string& smtlib, const SolverConfig& cfg) {
  RawRun run = spawn(smtlib, cfg);
  SolverResult r;
  r.raw = run.out;
  r.seconds = run.seconds;
  r.file = run.file;
  std::istringstream in(run.out);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) break;
  }
  auto st = status_word(line);
  if (!st) throw SolverError(SolverError::Kind::Error, "solver error: " + trim(run.out));
  r.status = *st;
  std::stringstream rest;
  rest << in.rdbuf();
  r.model_text = rest.str();
  // get-model after unsat legitimately errors; after sat it must not
  if (r.status == SolverStatus::Sat && r.model_text.find("(error") != std::string::npos) {
    throw SolverError(SolverError::Kind::Error, "solver error: " + trim(r.model_text));
  }
  return r;
}

std::vector<SolverStatus> run_solver_batch(const std::string& smtlib, std::size_t expected, const SolverConfig& cfg) {
  RawRun run = spawn(smtlib, cfg);
  if (run.out.find("(error") != std::string::npos) {
    throw SolverError(SolverError::Kind::Error, "solver error: " + trim(run.out));
  }
  std::vector<SolverStatus> out;
  std::istringstream in(run.out);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto st = status_word(line);
    if (!st) throw SolverError(SolverError::Kind::Error, "unexpected solver output: " + line);
    out.push_back(*st);
  }
  if (out.size() != expected) {
    throw SolverError(SolverError::Kind::Error, "expected " + std::to_string(expected) + " answers, got " +
                                                    std::to_string(out.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// S-expressions and models
// ---------------------------------------------------------------------------

namespace {

struct SExp {
  bool atom = true;
  std::string text;
  std::vector<SExp> kids;
};

class SExpReader {
 public:
  explicit SExpReader(const std::string& s) : s_(s) {}

  std::vector<SExp> all() {
    std::vector<SExp> out;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) return out;
      out.push_back(read());
    }
  }

 private:
  void skip() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
        continue;
      }
      return;
    }
  }

  SExp read() {
    skip();
    if (pos_ >= s_.size()) throw ModelParseError("unexpected end of model", tail());
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      SExp e;
      e.atom = false;
      for (;;) {
        skip();
        if (pos_ >= s_.size()) throw ModelParseError("unbalanced parentheses", tail());
        if (s_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.kids.push_back(read());
      }
    }
    if (c == ')') throw ModelParseError("unexpected ')'", tail());
    SExp e;
    if (c == '|') {
      std::size_t end = s_.find('|', pos_ + 1);
      if (end == std::string::npos) throw ModelParseError("unterminated quoted symbol", tail());
      e.text = s_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return e;
    }
    if (c == '"') {
      std::size_t end = pos_ + 1;
      while (end < s_.size()) {
        if (s_[end] == '"') {
          if (end + 1 < s_.size() && s_[end + 1] == '"') {
            end += 2;
            continue;
          }
          break;
        }
        ++end;
      }
      e.text = s_.substr(pos_, end + 1 - pos_);
      pos_ = end + 1;
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')') {
      ++pos_;
    }
    e.text = s_.substr(start, pos_ - start);
    return e;
  }

  std::string tail() const { return s_.substr(pos_ > 20 ? pos_ - 20 : 0, 60); }

  const std::string& s_;
  std::size_t pos_ = 0;
};

std::string show(const SExp& e) {
  if (e.atom) return e.text;
  std::string s = "(";
  for (std::size_t i = 0; i < e.kids.size(); ++i) s += (i ? " " : "") + show(e.kids[i]);
  return s + ")";
}

std::int64_t decode_int(const SExp& e) {
  try {
    if (e.atom) return std::stoll(e.text);
    if (e.kids.size() == 2 && e.kids[0].atom && e.kids[0].text == "-") return -decode_int(e.kids[1]);
  } catch (const std::logic_error&) {
  }
  throw ModelParseError("integer expected", show(e));
}

bool starts_with(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }

ModelValue decode(const SExp& e, const std::map<std::int64_t, Name>& methods) {
  ModelValue v;
  if (e.atom) {
    if (e.text == "Unit_unit") {
      v.kind = ModelValue::Kind::Val;
      v.value = Value::unit();
      return v;
    }
    if (starts_with(e.text, "Fail_")) {
      v.kind = ModelValue::Kind::Fail;
      return v;
    }
    if (starts_with(e.text, "Nil_")) {
      v.kind = ModelValue::Kind::Nil;
      return v;
    }
    throw ModelParseError("unknown constructor", e.text);
  }
  if (e.kids.empty() || !e.kids[0].atom) throw ModelParseError("constructor application expected", show(e));
  const std::string& head = e.kids[0].text;
  if (head == "as" && e.kids.size() == 3) return decode(e.kids[1], methods);
  if (head == "Int_int" && e.kids.size() == 2) {
    v.kind = ModelValue::Kind::Val;
    v.value = Value::integer(decode_int(e.kids[1]));
    return v;
  }
  if (starts_with(head, "Meth_") && e.kids.size() == 2) {
    std::int64_t id = decode_int(e.kids[1]);
    auto it = methods.find(id);
    v.kind = ModelValue::Kind::Val;
    v.value = Value::meth(it != methods.end() ? it->second : Name::meth("#" + std::to_string(id), Type::arrow(Type::unit(), Type::unit())));
    return v;
  }
  if (starts_with(head, "Pair_") && e.kids.size() == 3) {
    ModelValue a = decode(e.kids[1], methods);
    ModelValue b = decode(e.kids[2], methods);
    if (a.kind != ModelValue::Kind::Val || b.kind != ModelValue::Kind::Val) return v;  // no meaningful value
    v.kind = ModelValue::Kind::Val;
    v.value = Value::pair(a.value, b.value);
    return v;
  }
  throw ModelParseError("unknown constructor", show(e));
}

}  // namespace

std::string to_string(const ModelValue& v) {
  switch (v.kind) {
    case ModelValue::Kind::Val:
      return to_string(v.value);
    case ModelValue::Kind::Fail:
      return "fail";
    case ModelValue::Kind::Nil:
      return "nil";
    case ModelValue::Kind::Unconstrained:
      return "unconstrained";
  }
  return "?";
}

Assignment parse_model(const std::string& model_text, const std::vector<LogVar>& wanted,
                       const std::vector<SmtMethod>& methods) {
  std::map<std::int64_t, Name> by_id;
  for (const auto& m : methods) by_id.emplace(m.id, Name::meth(m.name, m.sort));
  std::set<std::string> want;
  for (const auto& w : wanted) want.insert(w.name);

  Assignment out;
  std::vector<SExp> top = SExpReader(model_text).all();
  for (const auto& root : top) {
    if (root.atom) throw ModelParseError("model expected", root.text);
    std::size_t first = 0;
    if (!root.kids.empty() && root.kids[0].atom && root.kids[0].text == "model") first = 1;
    for (std::size_t i = first; i < root.kids.size(); ++i) {
      const SExp& def = root.kids[i];
      if (def.atom || def.kids.size() != 5 || !def.kids[0].atom || def.kids[0].text != "define-fun") {
        if (!def.atom && !def.kids.empty() && def.kids[0].atom && def.kids[0].text == "error") {
          throw ModelParseError("solver reported an error", show(def));
        }
        continue;  // auxiliary declarations
      }
      const std::string& name = def.kids[1].text;
      if (!want.count(name)) continue;
      if (!def.kids[2].atom || !def.kids[2].kids.empty()) {
        if (!def.kids[2].kids.empty()) continue;  // a function, not a constant
      }
      out[name] = decode(def.kids[4], by_id);
    }
  }
  for (const auto& w : wanted) {
    if (!out.count(w.name)) out[w.name] = ModelValue{};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

FormulaPtr IntPredicate::holds(const ExprPtr& e) const { return fm::int_cmp(op, e, fm::integer(value)); }

Prepared prepare(const Config& c, bool opt, bool prune, std::size_t max_clauses) {
  auto t0 = Clock::now();
  Prepared p;
  for (const auto& x : free_vars(c.term)) p.inputs.push_back(x);
  SymbolicConfig sc = build_initial(c);
  TranslateOptions to;
  to.prune = prune;
  to.max_clauses = max_clauses;
  if (opt) {
    p.tr = translate_opt(sc, initial_pt(c), to).result;
  } else {
    p.tr = translate(sc, to);
  }
  p.translate_seconds = since(t0);
  return p;
}

namespace {

FormulaPtr is_value(const LogVar& v) {
  return fm::conj({fm::neq(fm::var(v), fm::fail(v.sort)), fm::neq(fm::var(v), fm::nil(v.sort))});
}

// a ground input is a proper value all the way down; fail/nil inside an
// input would leave val_int unconstrained
void proper(const ExprPtr& e, std::vector<FormulaPtr>& out) {
  out.push_back(fm::neq(e, fm::fail(e->sort)));
  out.push_back(fm::neq(e, fm::nil(e->sort)));
  if (e->sort.is_prod()) {
    proper(fm::proj(1, e), out);
    proper(fm::proj(2, e), out);
  }
}

}  // namespace

FormulaPtr query_formula(const Prepared& p, const CheckMode& mode) {
  const LogVar& ret = p.tr.ret;
  switch (mode.kind) {
    case CheckMode::Kind::FailReach:
      return fm::eq(fm::var(ret), fm::fail(ret.sort));
    case CheckMode::Kind::NilReach:
      return fm::eq(fm::var(ret), fm::nil(ret.sort));
    case CheckMode::Kind::ReturnProp:
      if (!(ret.sort == Type::integer())) throw std::invalid_argument("return property on a non-Int result");
      return fm::conj({is_value(ret), fm::negate(mode.ret_property.holds(fm::var(ret)))});
    case CheckMode::Kind::StoreProp: {
      std::vector<FormulaPtr> violated;
      for (const auto& [r, pred] : mode.store_properties) {
        if (!(r.type == Type::integer())) throw std::invalid_argument("store property on non-Int reference " + r.id);
        violated.push_back(fm::negate(pred.holds(fm::var(p.tr.D.at(r)))));
      }
      return fm::conj({is_value(ret), fm::disj(std::move(violated))});
    }
  }
  throw std::invalid_argument("unknown mode");
}

std::string smt_script(const Prepared& p, const CheckMode& mode, const std::vector<FormulaPtr>& assumptions) {
  std::vector<FormulaPtr> phi = p.tr.phi;
  for (const auto& x : p.inputs) proper(fm::var(LogVar{x.id, x.type}), phi);
  phi.insert(phi.end(), assumptions.begin(), assumptions.end());
  return emit_smtlib(p.tr.decls, p.tr.methods, phi, query_formula(p, mode));
}

CheckResult check_prepared(const Prepared& p, const CheckMode& mode, const CheckOptions& opts) {
  CheckResult r;
  r.stats = p.tr.stats;
  r.translate_seconds = p.translate_seconds;
  r.smt = smt_script(p, mode, opts.assumptions);
  if (!opts.emit_smt.empty()) {
    std::ofstream out(opts.emit_smt);
    if (!out) throw std::runtime_error("cannot write " + opts.emit_smt);
    out << r.smt;
  }
  SolverResult s = run_solver(r.smt, opts.solver);
  r.solve_seconds = s.seconds;
  switch (s.status) {
    case SolverStatus::Sat: {
      r.verdict.kind = VerdictKind::Sat;
      std::vector<LogVar> wanted;
      for (const auto& x : p.inputs) wanted.push_back(LogVar{x.id, x.type});
      wanted.push_back(p.tr.ret);
      Assignment a = parse_model(s.model_text, wanted, p.tr.methods);
      for (const auto& x : p.inputs) r.verdict.model[x.id] = a[x.id];
      r.verdict.model["ret"] = a[p.tr.ret.name];
      break;
    }
    case SolverStatus::Unsat:
      r.verdict.kind = VerdictKind::Unsat;
      break;
    case SolverStatus::Unknown:
      r.verdict.kind = VerdictKind::Unknown;
      r.verdict.reason = "solver answered unknown";
      break;
  }
  return r;
}

CheckResult check(const Config& c, const CheckMode& mode, const CheckOptions& opts) {
  validate_config(c);
  Prepared p = prepare(c, opts.opt, opts.prune, opts.max_clauses);
  return check_prepared(p, mode, opts);
}

std::vector<FormulaPtr> of_sig(const std::map<Name, Value>& sigma, const Repository& repo) {
  auto ids = method_ids(repo);
  std::vector<FormulaPtr> out;
  for (const auto& [x, v] : sigma) out.push_back(fm::eq(fm::var(LogVar{x.id, x.type}), value_expr(v, ids)));
  return out;
}

std::optional<std::int64_t> minimize(const Prepared& p, const CheckMode& mode, const Name& x, std::int64_t lower,
                                     std::int64_t upper, const CheckOptions& opts) {
  if (!(x.type == Type::integer())) throw std::invalid_argument("minimize needs an Int input");
  ExprPtr xe = fm::var(LogVar{x.id, x.type});
  auto sat_below = [&](std::int64_t c) {
    CheckOptions o = opts;
    o.emit_smt.clear();
    o.assumptions.push_back(fm::int_cmp(BinOpKind::Ge, xe, fm::integer(lower)));
    o.assumptions.push_back(fm::int_cmp(BinOpKind::Le, xe, fm::integer(c)));
    CheckResult r = check_prepared(p, mode, o);
    if (r.verdict.kind == VerdictKind::Unknown) throw SolverError(SolverError::Kind::Error, "unknown during minimization");
    return r.verdict.kind == VerdictKind::Sat;
  };
  if (!sat_below(upper)) return std::nullopt;
  std::int64_t lo = lower, hi = upper;
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (sat_below(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

IterateResult bound_iterate(const Config& c, unsigned kmax, const CheckOptions& opts, bool stop_on_timeout) {
  validate_config(c);
  IterateResult out;
  out.verdict.kind = VerdictKind::BoundReached;
  for (unsigned k = 0; k <= kmax; ++k) {
    auto t0 = Clock::now();
    Config ck = c;
    ck.bound = Bound{k};
    BoundStep step;
    step.k = k;
    out.k = k;
    try {
      Prepared p = prepare(ck, opts.opt, opts.prune, opts.max_clauses);
      CheckResult f = check_prepared(p, CheckMode::fail(), opts);
      step.fail = f.verdict.kind;
      if (f.verdict.kind == VerdictKind::Sat) {
        step.seconds = since(t0);
        out.log.push_back(step);
        out.verdict = f.verdict;
        return out;
      }
      CheckResult n = check_prepared(p, CheckMode::nil(), opts);
      step.nil = n.verdict.kind;
      step.seconds = since(t0);
      out.log.push_back(step);
      if (f.verdict.kind == VerdictKind::Unsat && n.verdict.kind == VerdictKind::Unsat) {
        out.verdict.kind = VerdictKind::Verified;
        return out;
      }
    } catch (const TranslationLimit& e) {
      // larger bounds only grow
      step.note = e.what();
      step.seconds = since(t0);
      out.log.push_back(step);
      out.verdict.kind = VerdictKind::Unknown;
      out.verdict.reason = e.what();
      return out;
    } catch (const SolverError& e) {
      if (e.kind() != SolverError::Kind::Timeout) throw;
      step.note = e.what();
      step.seconds = since(t0);
      out.log.push_back(step);
      if (stop_on_timeout) {
        out.verdict.kind = VerdictKind::Unknown;
        out.verdict.reason = e.what();
        return out;
      }
    }
  }
  return out;
}

namespace {

Value default_value(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Int:
      return Value::integer(0);
    case TypeKind::Prod:
      return Value::pair(default_value(t.left()), default_value(t.right()));
    default:
      return Value::unit();
  }
}

}  // namespace

Outcome replay(const Config& c, const std::vector<Name>& inputs, const Assignment& model, std::uint64_t seed) {
  std::map<Name, Value> sigma;
  for (const auto& x : inputs) {
    auto it = model.find(x.id);
    bool usable = it != model.end() && it->second.kind == ModelValue::Kind::Val;
    sigma.emplace(x, usable ? it->second.value : default_value(x.type));
  }
  NameGen g(seed);
  return eval(close_config(c, sigma), g);
}

}  // namespace hobmc
