#include <gtest/gtest.h>

#include <cstdlib>

#include "hobmc/checker.hpp"
#include "hobmc/parser.hpp"
#include "support/harness.hpp"

using namespace hobmc;

namespace {

const Type I = Type::integer();

class Checker : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!hobmc::testing::solver_available()) GTEST_SKIP() << "no z3";
  }
};

}  // namespace

TEST_F(Checker, RunSolverTrivial) {
  EXPECT_EQ(run_solver("(assert true)(check-sat)", SolverConfig{}).status, SolverStatus::Sat);
  EXPECT_EQ(run_solver("(assert false)(check-sat)", SolverConfig{}).status, SolverStatus::Unsat);
}

TEST_F(Checker, RunSolverTimeout) {
  // a nonlinear problem z3 cannot settle in a fraction of a second
  std::string hard =
      "(declare-const x Int)(declare-const y Int)(declare-const z Int)"
      "(assert (> x 2))(assert (> y 2))(assert (> z 2))"
      "(assert (= (+ (* x x x x x) (* y y y y y)) (* z z z z z)))(check-sat)";
  SolverConfig cfg;
  cfg.timeout_seconds = 0.3;
  try {
    run_solver(hard, cfg);
    FAIL() << "expected a timeout";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::Timeout);
  }
}

TEST(CheckerNoSolver, NotFound) {
  SolverConfig cfg;
  cfg.path = "no-such-solver-hobmc";
  try {
    run_solver("(check-sat)", cfg);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::NotFound);
  }
}

TEST_F(Checker, BatchCountsAnswers) {
  auto got = run_solver_batch("(check-sat)(push 1)(assert false)(check-sat)(pop 1)(check-sat)", 3, SolverConfig{});
  EXPECT_EQ(got, (std::vector<SolverStatus>{SolverStatus::Sat, SolverStatus::Unsat, SolverStatus::Sat}));
  EXPECT_THROW(run_solver_batch("(check-sat)", 2, SolverConfig{}), SolverError);
}

TEST(Model, Decoding) {
  Type ii = Type::arrow(I, I);
  Type p = Type::prod(I, Type::unit());
  std::vector<LogVar> wanted = {{"n", I}, {"ret", I}, {"m", ii}, {"p", p}, {"neg", I}, {"gone", I}};
  std::vector<SmtMethod> methods = {{0, "succ", ii}};
  std::string text =
      "(\n"
      "  (define-fun n () V_int (Int_int 102))\n"
      "  ; a comment\n"
      "  (define-fun ret () V_int Fail_int)\n"
      "  (define-fun m () V_fun_int_int (Meth_fun_int_int 0))\n"
      "  (define-fun p () V_pair_int_unit (Pair_pair_int_unit (Int_int 3) Unit_unit))\n"
      "  (define-fun neg () V_int (Int_int (- 4)))\n"
      ")\n";
  Assignment a = parse_model(text, wanted, methods);
  EXPECT_EQ(a.at("n").kind, ModelValue::Kind::Val);
  EXPECT_EQ(a.at("n").value, Value::integer(102));
  EXPECT_EQ(a.at("ret").kind, ModelValue::Kind::Fail);
  ASSERT_EQ(a.at("m").kind, ModelValue::Kind::Val);
  EXPECT_EQ(a.at("m").value.name.id, "succ");
  EXPECT_EQ(a.at("p").value, Value::pair(Value::integer(3), Value::unit()));
  EXPECT_EQ(a.at("neg").value, Value::integer(-4));
  EXPECT_EQ(a.at("gone").kind, ModelValue::Kind::Unconstrained);
  EXPECT_THROW(parse_model("((define-fun n () V_int (Int_int 1)", wanted, methods), ModelParseError);
}

TEST_F(Checker, Mc91Counterexample) {
  Program p = load_program(hobmc::testing::corpus_file("mc91-e"), Bound{1});
  CheckResult r = check(p.config, CheckMode::fail());
  ASSERT_EQ(r.verdict.kind, VerdictKind::Sat);
  EXPECT_EQ(r.verdict.model.at("n").value, Value::integer(102));
  EXPECT_EQ(r.verdict.model.at("ret").kind, ModelValue::Kind::Fail);
  EXPECT_EQ(replay(p.config, p.inputs, r.verdict.model).kind, OutcomeKind::Fail);
}

TEST_F(Checker, VerifiedPrograms) {
  for (const auto& name : {"trivial-skip", "assert-one"}) {
    Program p = load_program(hobmc::testing::corpus_file(name));
    IterateResult r = bound_iterate(p.config, 3);
    EXPECT_EQ(r.verdict.kind, VerdictKind::Verified) << name;
    EXPECT_EQ(r.k, 0u) << name;
  }
}

TEST_F(Checker, BoundReached) {
  Program p = load_program(hobmc::testing::corpus_file("example3-tri"));
  IterateResult r = bound_iterate(p.config, 2);
  EXPECT_EQ(r.verdict.kind, VerdictKind::BoundReached);
  EXPECT_EQ(r.log.size(), 3u);
}

TEST_F(Checker, ReturnAndStoreProperties) {
  Program p = parse_program("Refs: r :(Int) = 0;\nMain (n:Int) :(Int): r := n * 2; n + 1", Bound{0});
  // ret >= n + 1 cannot be stated; ret > -100 fails for small n
  auto ret = check(p.config, CheckMode::returns(IntPredicate{BinOpKind::Gt, -100}));
  ASSERT_EQ(ret.verdict.kind, VerdictKind::Sat);
  EXPECT_LE(ret.verdict.model.at("n").value.i, -101);
  Name r = Name::ref("r", I);
  // r is always even, so r != 7 holds and r == 7 is violated... never
  auto odd = check(p.config, CheckMode::stores({{r, IntPredicate{BinOpKind::Ne, 7}}}));
  EXPECT_EQ(odd.verdict.kind, VerdictKind::Unsat);
}

TEST_F(Checker, ModeExclusivity) {
  for (const auto& name : hobmc::testing::corpus_names()) {
    Program p = load_program(hobmc::testing::corpus_file(name), Bound{1});
    Prepared pr = prepare(p.config, true, true);
    const LogVar& ret = pr.tr.ret;
    auto both = fm::conj({fm::eq(fm::var(ret), fm::fail(ret.sort)), fm::eq(fm::var(ret), fm::nil(ret.sort))});
    EXPECT_EQ(hobmc::testing::solve_batch(pr, {both})[0], SolverStatus::Unsat) << name;
  }
}

TEST_F(Checker, VerifiedMeansNoFailOnGrid) {
  // whatever bound_iterate verifies must be fail- and nil-free on a grid
  for (const auto& name : hobmc::testing::corpus_names()) {
    Program p = load_program(hobmc::testing::corpus_file(name));
    IterateResult r = bound_iterate(p.config, 2);
    if (r.verdict.kind != VerdictKind::Verified) continue;
    for (const auto& sigma : hobmc::testing::int_grid(p.inputs, 8)) {
      for (unsigned k = 0; k <= r.k; ++k) {
        Config c = close_config(p.config, sigma);
        c.bound = Bound{k};
        NameGen g;
        EXPECT_EQ(eval(c, g).kind, OutcomeKind::Val) << name;
      }
    }
  }
}

TEST_F(Checker, Minimize) {
  Program p = parse_program("Main (n:Int) :(Unit): assert (n < 17)", Bound{0});
  Prepared pr = prepare(p.config, true, true);
  auto least = minimize(pr, CheckMode::fail(), p.inputs[0], -50, 100);
  ASSERT_TRUE(least.has_value());
  EXPECT_EQ(*least, 17);
  EXPECT_FALSE(minimize(pr, CheckMode::fail(), p.inputs[0], -50, 10).has_value());
}

TEST_F(Checker, InputsAreProperValues) {
  // without the input domain, n could be the Fail constructor
  Program p = parse_program("Main (n:Int) :(Unit): assert (n < 17)", Bound{0});
  CheckResult r = check(p.config, CheckMode::fail());
  ASSERT_EQ(r.verdict.kind, VerdictKind::Sat);
  EXPECT_EQ(r.verdict.model.at("n").kind, ModelValue::Kind::Val);
}

TEST(CheckerErrors, ReturnPropertyNeedsInt) {
  Program p = parse_program("Main :(Unit): skip");
  Prepared pr = prepare(p.config, true, true);
  EXPECT_THROW(query_formula(pr, CheckMode::returns({})), std::invalid_argument);
}
