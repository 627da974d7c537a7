// hobmc: bounded model checking for .bmc programs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "hobmc/checker.hpp"
#include "hobmc/parser.hpp"
#include "hobmc/pointsto.hpp"

namespace fs = std::filesystem;
using namespace hobmc;

namespace {

enum Exit { kOk = 0, kCounterexample = 1, kInconclusive = 2, kError = 3 };

struct Common {
  std::string file;
  unsigned bound = 1;
  std::string opt = "on";
  std::string prune = "on";
  std::string solver = "z3";
  double timeout = 10.0;
  bool keep = false;
  std::size_t max_clauses = 2'000'000;
};

void add_solver_flags(CLI::App* c, Common& o) {
  c->add_option("--solver", o.solver, "solver executable")->capture_default_str();
  c->add_option("--timeout", o.timeout, "seconds per solver call")->capture_default_str();
  c->add_flag("--keep-files", o.keep, "keep the .smt2 files in /tmp");
  c->add_option("--max-clauses", o.max_clauses, "give up on translations larger than this (0: no limit)")
      ->capture_default_str();
}

void add_translation_flags(CLI::App* c, Common& o) {
  c->add_option("--opt", o.opt, "points-to guided translation")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  c->add_option("--prune", o.prune, "fail/nil reachability pruning of guards")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
}

CheckOptions check_options(const Common& o) {
  CheckOptions c;
  c.opt = o.opt == "on";
  c.prune = o.prune == "on";
  c.solver.path = o.solver;
  c.solver.timeout_seconds = o.timeout;
  c.solver.keep_files = o.keep;
  c.max_clauses = o.max_clauses;
  return c;
}

std::string describe(const Verdict& v, const std::vector<Name>& inputs) {
  std::string s;
  for (const auto& x : inputs) {
    if (!s.empty()) s += ", ";
    auto it = v.model.find(x.id);
    s += x.id + " = " + (it == v.model.end() ? "unconstrained" : to_string(it->second));
  }
  return s.empty() ? "(no inputs)" : s;
}

CheckMode parse_mode(const std::string& m) {
  if (m == "fail") return CheckMode::fail();
  return CheckMode::nil();
}

int cmd_check(const Common& o, const std::string& mode, const std::string& emit) {
  Program p = load_program(o.file, Bound{o.bound});
  CheckOptions opts = check_options(o);
  opts.emit_smt = emit;
  CheckResult r = check(p.config, parse_mode(mode), opts);
  std::cout << "program: " << p.name << "  k=" << o.bound << "  mode=" << mode << "  opt=" << o.opt << "\n";
  std::cout << "formula: " << r.stats.vars << " vars, " << r.stats.clauses << " clauses, " << r.stats.branches
            << " branches\n";
  if (r.stats.division) std::cout << "note: a divisor may be zero; its quotient is unconstrained\n";
  std::cout << std::fixed << std::setprecision(3) << "time: translate " << r.translate_seconds << " s, solve "
            << r.solve_seconds << " s\n";
  switch (r.verdict.kind) {
    case VerdictKind::Sat:
      if (mode == "fail") {
        std::cout << "counterexample: " << describe(r.verdict, p.inputs) << "\n";
        return kCounterexample;
      }
      std::cout << "bound reached: " << describe(r.verdict, p.inputs) << "\n";
      return kInconclusive;
    case VerdictKind::Unsat:
      std::cout << (mode == "fail" ? "no counterexample within the bound\n" : "bound not reached\n");
      return kOk;
    default:
      std::cout << "unknown: " << r.verdict.reason << "\n";
      return kInconclusive;
  }
}

int cmd_iterate(const Common& o, unsigned kmax, bool stop_on_timeout) {
  Program p = load_program(o.file, Bound{0});
  IterateResult r = bound_iterate(p.config, kmax, check_options(o), stop_on_timeout);
  for (const auto& s : r.log) {
    std::cout << "k=" << s.k << "  fail=" << to_string(s.fail) << "  nil=" << to_string(s.nil) << std::fixed
              << std::setprecision(3) << "  " << s.seconds << " s";
    if (!s.note.empty()) std::cout << "  (" << s.note << ")";
    std::cout << "\n";
  }
  switch (r.verdict.kind) {
    case VerdictKind::Sat:
      std::cout << "counterexample at k=" << r.k << ": " << describe(r.verdict, p.inputs) << "\n";
      return kCounterexample;
    case VerdictKind::Verified:
      std::cout << "verified at k=" << r.k << "\n";
      return kOk;
    case VerdictKind::BoundReached:
      std::cout << "bound reached at k=" << r.k << "\n";
      return kInconclusive;
    default:
      std::cout << "unknown at k=" << r.k << ": " << r.verdict.reason << "\n";
      return kInconclusive;
  }
}

int cmd_dump(const Common& o, const std::string& mode, bool clauses) {
  Program p = load_program(o.file, Bound{o.bound});
  Prepared pr = prepare(p.config, o.opt == "on", o.prune == "on", o.max_clauses);
  if (clauses) {
    std::cout << dump_clauses(pr.tr);
    return kOk;
  }
  std::cout << smt_script(pr, parse_mode(mode), {});
  return kOk;
}

int cmd_pt(const Common& o) {
  Program p = load_program(o.file, Bound{o.bound});
  validate_config(p.config);
  OptTranslation t = translate_opt(build_initial(p.config), initial_pt(p.config));
  std::cout << pt_to_json(t.pt, method_ids(t.result.repo)) << "\n";
  return kOk;
}

int cmd_eval(const Common& o, const std::vector<std::string>& sets, std::uint64_t seed, bool trace) {
  Program p = load_program(o.file, Bound{o.bound});
  std::map<std::string, std::int64_t> given;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected name=value, got " + s);
    given[s.substr(0, eq)] = std::stoll(s.substr(eq + 1));
  }
  std::map<Name, Value> sigma;
  for (const auto& x : p.inputs) {
    auto it = given.find(x.id);
    if (it == given.end()) throw CLI::ValidationError("--set", "no value for input " + x.id);
    if (!(x.type == Type::integer())) throw CLI::ValidationError("--set", "only Int inputs can be set: " + x.id);
    sigma.emplace(x, Value::integer(it->second));
  }
  NameGen g(seed);
  EvalOptions eo;
  if (trace) eo.trace = &std::cout;
  Outcome out = eval(close_config(p.config, sigma), g, eo);
  std::cout << to_string(out) << "\n";
  switch (out.kind) {
    case OutcomeKind::Fail:
      return kCounterexample;
    case OutcomeKind::Nil:
      return kInconclusive;
    default:
      return kOk;
  }
}

// --- bench -------------------------------------------------------------------

struct RunRecord {
  std::string program;
  unsigned k = 0;
  bool opt = true;
  unsigned run = 0;
  std::string verdict;
  double seconds = 0;
  std::size_t vars = 0, clauses = 0, branches = 0;
};

std::vector<RunRecord> bench_program(const fs::path& file, unsigned kmax, unsigned repeat, const Common& o) {
  std::vector<RunRecord> out;
  Program p = load_program(file.string(), Bound{0});
  for (bool opt : {false, true}) {
    bool gave_up = false;
    for (unsigned k = 0; k <= kmax && !gave_up; ++k) {
      for (unsigned run = 1; run <= repeat; ++run) {
        RunRecord rec;
        rec.program = p.name;
        rec.k = k;
        rec.opt = opt;
        rec.run = run;
        Config c = p.config;
        c.bound = Bound{k};
        CheckOptions opts = check_options(o);
        opts.opt = opt;
        auto t0 = std::chrono::steady_clock::now();
        try {
          CheckResult r = check(c, CheckMode::fail(), opts);
          rec.verdict = r.verdict.kind == VerdictKind::Sat     ? "counterexample"
                        : r.verdict.kind == VerdictKind::Unsat ? "unsat"
                                                                : "unknown";
          rec.vars = r.stats.vars;
          rec.clauses = r.stats.clauses;
          rec.branches = r.stats.branches;
        } catch (const SolverError& e) {
          rec.verdict = e.kind() == SolverError::Kind::Timeout ? "timeout" : "error";
          gave_up = true;
        } catch (const TranslationLimit&) {
          rec.verdict = "too-large";
          gave_up = true;
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(rec);
        if (gave_up) break;
      }
    }
  }
  return out;
}

int cmd_bench(const std::string& dir, unsigned kmax, unsigned repeat, const std::string& csv, unsigned jobs,
              const Common& o) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".bmc") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no .bmc files in " << dir << "\n";
    return kError;
  }

  std::vector<std::vector<RunRecord>> per(files.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  bool failed = false;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < files.size();) {
      try {
        per[i] = bench_program(files[i], kmax, repeat, o);
      } catch (const std::exception& e) {
        std::lock_guard lock(io);
        std::cerr << files[i].string() << ": " << e.what() << "\n";
        failed = true;
      }
      std::lock_guard lock(io);
      std::cerr << "done " << files[i].filename().string() << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < std::max(1u, jobs); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ofstream file;
  if (!csv.empty()) {
    file.open(csv);
    if (!file) {
      std::cerr << "cannot write " << csv << "\n";
      return kError;
    }
  }
  std::ostream& out = csv.empty() ? std::cout : file;
  out << "program,k,opt,run,verdict,seconds,vars,clauses,branches\n";
  std::map<std::pair<unsigned, bool>, std::pair<double, unsigned>> avg;
  std::map<std::tuple<std::string, unsigned, bool>, double> cell;
  for (const auto& recs : per) {
    for (const auto& r : recs) {
      out << r.program << "," << r.k << "," << (r.opt ? "on" : "off") << "," << r.run << "," << r.verdict << ","
          << std::fixed << std::setprecision(6) << r.seconds << "," << r.vars << "," << r.clauses << ","
          << r.branches << "\n";
      cell[{r.program, r.k, r.opt}] += r.seconds / repeat;
    }
  }

  // percentage change of the mean time per bound, over programs run at that
  // bound with both settings
  std::cout << "\n   k   base(s)    opt(s)     %change\n";
  for (unsigned k = 0; k <= kmax; ++k) {
    double base = 0, opt = 0;
    unsigned n = 0;
    for (const auto& [key, t] : cell) {
      const auto& [prog, kk, o2] = key;
      if (kk != k || o2) continue;
      auto other = cell.find({prog, k, true});
      if (other == cell.end()) continue;
      base += t;
      opt += other->second;
      ++n;
    }
    if (n == 0) continue;
    std::cout << std::setw(4) << k << std::fixed << std::setprecision(4) << std::setw(10) << base / n
              << std::setw(10) << opt / n << std::setprecision(2) << std::setw(12)
              << (base > 0 ? 100.0 * (opt - base) / base : 0.0) << "\n";
  }
  return failed ? kError : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hobmc: bounded model checker for higher-order programs with references"};
  app.require_subcommand(1);

  Common o;
  std::string mode = "fail", emit;
  unsigned kmax = 10, repeat = 3, jobs = std::max(1u, std::thread::hardware_concurrency());
  bool stop_on_timeout = false, trace = false, clauses = false;
  std::string dir, csv;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;

  auto* check = app.add_subcommand("check", "check one program at a fixed bound");
  check->add_option("file", o.file)->required()->check(CLI::ExistingFile);
  check->add_option("--bound,-k", o.bound, "call-depth bound")->capture_default_str();
  check->add_option("--mode", mode)->check(CLI::IsMember({"fail", "nil"}))->capture_default_str();
  check->add_option("--emit-smt", emit, "also write the SMT-LIB script here");
  add_translation_flags(check, o);
  add_solver_flags(check, o);

  auto* iterate = app.add_subcommand("iterate", "raise the bound until a verdict");
  iterate->add_option("file", o.file)->required()->check(CLI::ExistingFile);
  iterate->add_option("--kmax", kmax)->capture_default_str();
  iterate->add_flag("--stop-on-timeout", stop_on_timeout);
  add_translation_flags(iterate, o);
  add_solver_flags(iterate, o);

  auto* bench = app.add_subcommand("bench", "time every .bmc file in a directory with and without points-to");
  bench->add_option("dir", dir)->required()->check(CLI::ExistingDirectory);
  bench->add_option("--kmax", kmax)->capture_default_str();
  bench->add_option("--repeat", repeat)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--csv", csv, "CSV output (stdout if absent)");
  bench->add_option("--jobs,-j", jobs, "programs checked in parallel")->capture_default_str();
  add_solver_flags(bench, o);

  auto* dump = app.add_subcommand("dump-smt", "print the SMT-LIB script without solving");
  dump->add_option("file", o.file)->required()->check(CLI::ExistingFile);
  dump->add_option("--bound,-k", o.bound)->capture_default_str();
  dump->add_option("--mode", mode)->check(CLI::IsMember({"fail", "nil"}))->capture_default_str();
  dump->add_flag("--clauses", clauses, "list the clauses with their source positions instead");
  add_translation_flags(dump, o);

  auto* pt = app.add_subcommand("pt", "print the points-to map after the guided translation");
  pt->add_option("file", o.file)->required()->check(CLI::ExistingFile);
  pt->add_option("--bound,-k", o.bound)->capture_default_str();

  auto* run = app.add_subcommand("eval", "run the interpreter on concrete inputs");
  run->add_option("file", o.file)->required()->check(CLI::ExistingFile);
  run->add_option("--bound,-k", o.bound)->capture_default_str();
  run->add_option("--set", sets, "input value, name=int");
  run->add_option("--seed", seed, "name generator seed")->capture_default_str();
  run->add_flag("--trace", trace, "print each rule applied");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    if (*check) return cmd_check(o, mode, emit);
    if (*iterate) return cmd_iterate(o, kmax, stop_on_timeout);
    if (*bench) return cmd_bench(dir, kmax, repeat, csv, jobs, o);
    if (*dump) return cmd_dump(o, mode, clauses);
    if (*pt) return cmd_pt(o);
    if (*run) return cmd_eval(o, sets, seed, trace);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
