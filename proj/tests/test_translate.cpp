#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "hobmc/checker.hpp"
#include "hobmc/parser.hpp"
#include "hobmc/translate.hpp"
#include "support/gen.hpp"
#include "support/harness.hpp"

using namespace hobmc;

namespace {

const Type I = Type::integer();
const Type II = Type::arrow(I, I);

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_rule(const TranslationResult& r, const std::string& rule) {
  std::size_t n = 0;
  for (const auto& c : r.clause_info) n += c.rule == rule;
  return n;
}

}  // namespace

TEST(BuildInitial, Store) {
  Config c;
  c.term = mk::unit();
  Name r = Name::ref("r", I);
  c.store[r] = Value::integer(0);
  c.bound = Bound{3};
  SymbolicConfig sc = build_initial(c);
  ASSERT_EQ(sc.phi.size(), 1u);
  EXPECT_EQ(to_smt(sc.phi[0]), "(= r_0 (Int_int 0))");
  EXPECT_EQ(sc.C.version(r), 0u);
  EXPECT_EQ(sc.D.version(r), 0u);
  EXPECT_EQ(sc.bound, Bound{3});

  Config empty;
  empty.term = mk::unit();
  EXPECT_TRUE(build_initial(empty).phi.empty());
}

TEST(BuildInitial, HigherOrderReference) {
  Program p = load_program(hobmc::testing::corpus_file("intro"));
  SymbolicConfig sc = build_initial(p.config);
  ASSERT_EQ(sc.phi.size(), 1u);
  EXPECT_EQ(to_smt(sc.phi[0]), "(= r_0 (Meth_fun_int_int 0))");
}

TEST(Translate, Literal) {
  Config c;
  c.term = mk::integer(5);
  c.bound = Bound{3};
  TranslationResult r = translate(build_initial(c));
  ASSERT_EQ(r.phi.size(), 1u);
  EXPECT_EQ(to_smt(r.phi[0]), "(= " + r.ret.name + " (Int_int 5))");
  EXPECT_TRUE(r.repo.empty());
  EXPECT_EQ(r.q, Q::Zero);
}

TEST(Translate, NilBound) {
  Config c;
  c.term = mk::integer(5);
  c.bound = Bound::nil();
  TranslationResult r = translate(build_initial(c));
  ASSERT_EQ(r.phi.size(), 1u);
  EXPECT_EQ(to_smt(r.phi[0]), "(= " + r.ret.name + " Nil_int)");
}

TEST(Translate, EmptyCandidateSet) {
  // x : Int -> Int bound by a let to a method of another type is impossible;
  // instead apply a variable of a type no method has
  Name f = Name::var("f", Type::arrow(I, Type::unit()));
  Name m = Name::meth("m", II);
  Name x = Name::var("x", I);
  Config c;
  c.term = mk::let(f, mk::fail(f.type), mk::app_var(f, mk::integer(1)));
  c.repo.insert(m, MethodDef{x, mk::var(x), 0});
  c.bound = Bound{2};
  TranslationResult r = translate(build_initial(c));
  ASSERT_EQ(r.stats.applications.size(), 1u);
  EXPECT_EQ(r.stats.applications[0].candidates, 0u);
  EXPECT_EQ(r.stats.branches, 0u);
}

TEST(Translate, CounterClosuresStructure) {
  Program p = load_program(hobmc::testing::corpus_file("example2"), Bound{2});
  TranslateOptions o;
  o.prune = false;
  TranslationResult r = translate(build_initial(p.config), o);
  // two closures, r := r0 plus two increments, the cut-off third call, and
  // one assertion per closure
  EXPECT_EQ(count_rule(r, "lambda"), 2u);
  EXPECT_EQ(count_rule(r, "assign"), 3u);
  EXPECT_EQ(count_rule(r, "nil"), 1u);
  EXPECT_EQ(count_rule(r, "fail"), 2u);
  EXPECT_EQ(r.repo.size(), 3u);  // f and both closures
  // the final g n ranges over the two closures
  ASSERT_FALSE(r.stats.applications.empty());
  EXPECT_EQ(r.stats.applications.back().candidates, 2u);
  EXPECT_EQ(r.stats.applications.back().depth, 0u);
}

TEST(Translate, Golden) {
  const std::vector<std::pair<std::string, unsigned>> cases = {{"mc91-e", 1}, {"example2", 2}, {"intro", 1}};
  for (const auto& [name, k] : cases) {
    Program p = load_program(hobmc::testing::corpus_file(name), Bound{k});
    Prepared pr = prepare(p.config, true, true);
    std::string got = smt_script(pr, CheckMode::fail(), {});
    std::string want = slurp(std::string(HOBMC_GOLDEN_DIR) + "/" + name + ".k" + std::to_string(k) + ".smt2");
    EXPECT_EQ(got, want) << name;
  }
}

TEST(Translate, RepositoryPreservedAndPreconditionsPropagated) {
  for (std::uint64_t s = 1; s <= 40; ++s) {
    auto g = hobmc::testing::generate(s);
    for (unsigned k : {0u, 2u}) {
      Config c = g.config;
      c.bound = Bound{k};
      EXPECT_EQ(hobmc::testing::check_lemmas(c, false), "") << "seed " << s << " k " << k;
      EXPECT_EQ(hobmc::testing::check_lemmas(c, true), "") << "seed " << s << " k " << k;
    }
  }
}

TEST(Translate, ClauseBudget) {
  Program p = load_program(hobmc::testing::corpus_file("example3-tri"), Bound{4});
  TranslateOptions o;
  o.max_clauses = 100;
  EXPECT_THROW(translate(build_initial(p.config), o), TranslationLimit);
}

TEST(Reachability, Examples) {
  Name m = Name::meth("m", II);
  Name x = Name::var("x", I);
  Repository repo;
  repo.insert(m, MethodDef{x, mk::var(x), 0});
  EXPECT_EQ(reachability_q(mk::binop(BinOpKind::Add, mk::integer(1), mk::integer(2)), repo), Q::Zero);
  EXPECT_EQ(reachability_q(mk::fail(I), repo), Q::Fail);
  EXPECT_EQ(reachability_q(mk::app_meth(m, mk::integer(1)), repo), Q::Nil);
  auto both = mk::ite(mk::integer(1), mk::fail(I), mk::app_meth(m, mk::integer(1)));
  EXPECT_EQ(reachability_q(both, repo), Q::Both);

  // an application can reach a fail inside the callee
  Repository failing;
  failing.insert(m, MethodDef{x, mk::fail(I), 0});
  EXPECT_EQ(reachability_q(mk::app_meth(m, mk::integer(1)), failing), Q::Both);
}

TEST(Translate, MethodIdsFollowRepositoryOrder) {
  Program p = load_program(hobmc::testing::corpus_file("hrec"));
  auto ids = method_ids(p.config.repo);
  for (std::size_t i = 0; i < p.config.repo.size(); ++i) {
    EXPECT_EQ(ids.at(p.config.repo.names()[i]), static_cast<std::int64_t>(i));
  }
}

TEST(Translate, SSAVersions) {
  Program p = load_program(hobmc::testing::corpus_file("example2"), Bound{1});
  TranslationResult r = translate(build_initial(p.config));
  Name ref = Name::ref("r", I);
  // every version up to C(r) is declared, none beyond
  unsigned last = r.C.version(ref);
  std::set<std::string> declared;
  for (const auto& d : r.decls) declared.insert(d.name);
  for (unsigned v = 0; v <= last; ++v) EXPECT_TRUE(declared.count(ssa_var(ref, v).name)) << v;
  EXPECT_FALSE(declared.count(ssa_var(ref, last + 1).name));
  EXPECT_EQ(r.C, r.D);
}
