#include <gtest/gtest.h>

#include <sstream>

#include "hobmc/checker.hpp"
#include "hobmc/formula.hpp"
#include "support/harness.hpp"

using namespace hobmc;

namespace {

const Type I = Type::integer();

// one solver process, one status per query, each query on its own
std::vector<SolverStatus> solve_each(const std::vector<LogVar>& decls, const std::vector<FormulaPtr>& queries) {
  std::string script = emit_smtlib(decls, {}, {}, fm::truth());
  const std::string tail = "(check-sat)\n(get-model)\n";
  script.resize(script.size() - tail.size());
  std::ostringstream os;
  os << script;
  for (const auto& q : queries) os << "(push 1)\n(assert " << to_smt(q) << ")\n(check-sat)\n(pop 1)\n";
  return run_solver_batch(os.str(), queries.size(), SolverConfig{});
}

enum class V { Fail, Nil, Five, Six };

ExprPtr enc(V v) {
  switch (v) {
    case V::Fail:
      return fm::fail(I);
    case V::Nil:
      return fm::nil(I);
    case V::Five:
      return fm::integer(5);
    case V::Six:
      return fm::integer(6);
  }
  return nullptr;
}

// the propagation conjuncts written out by hand, phi being b = 6
bool expected(V a, V b, Q q) {
  bool fail = q == Q::Fail || q == Q::Both;
  bool nil = q == Q::Nil || q == Q::Both;
  bool phi = b == V::Six;
  bool ok = true;
  if (fail && a == V::Fail) ok = ok && b == V::Fail;
  if (nil && a == V::Nil) ok = ok && b == V::Nil;
  bool escape = (fail && a == V::Fail) || (nil && a == V::Nil) || phi;
  return ok && escape;
}

class Formulas : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!hobmc::testing::solver_available()) GTEST_SKIP() << "no z3";
  }
};

}  // namespace

TEST_F(Formulas, GuardTruthTable) {
  LogVar a{"a", I}, b{"b", I};
  std::vector<FormulaPtr> queries;
  std::vector<bool> want;
  std::vector<std::string> what;
  for (Q q : {Q::Zero, Q::Nil, Q::Fail, Q::Both}) {
    FormulaPtr g = prune_F(a, b, fm::eq(fm::var(b), fm::integer(6)), q);
    for (V va : {V::Fail, V::Nil, V::Five}) {
      for (V vb : {V::Fail, V::Nil, V::Five, V::Six}) {
        queries.push_back(fm::conj({fm::eq(fm::var(a), enc(va)), fm::eq(fm::var(b), enc(vb)), g}));
        want.push_back(expected(va, vb, q));
        what.push_back(std::string(to_string(q)) + " a=" + std::to_string(int(va)) + " b=" + std::to_string(int(vb)));
      }
    }
  }
  auto got = solve_each({a, b}, queries);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i], want[i] ? SolverStatus::Sat : SolverStatus::Unsat) << what[i];
  }
}

TEST(FormulaShape, PruneBothIsGuard) {
  LogVar a{"a", I}, b{"b", I};
  auto phi = fm::int_cmp(BinOpKind::Lt, fm::var(a), fm::var(b));
  EXPECT_EQ(to_smt(prune_F(a, b, phi, Q::Both)), to_smt(guard_F(a, b, phi)));
  EXPECT_EQ(to_smt(prune_F(a, b, phi, Q::Zero)), to_smt(phi));
  std::string nil = to_smt(prune_F(a, b, phi, Q::Nil));
  EXPECT_NE(nil.find("Nil_int"), std::string::npos);
  EXPECT_EQ(nil.find("Fail_int"), std::string::npos);
}

TEST(FormulaShape, QAlgebra) {
  EXPECT_EQ(Q::Zero + Q::Fail, Q::Fail);
  EXPECT_EQ(Q::Nil + Q::Nil, Q::Nil);
  EXPECT_EQ(Q::Nil + Q::Fail, Q::Both);
  EXPECT_EQ(Q::Fail + Q::Nil, Q::Both);
  EXPECT_EQ(Q::Both + Q::Zero, Q::Both);
}

TEST(Emit, FailEquality) {
  LogVar ret{"ret", I};
  std::string s = emit_smtlib({ret}, {}, {fm::eq(fm::var(ret), fm::fail(I))}, fm::truth());
  EXPECT_NE(s.find("(set-logic ALL)"), std::string::npos);
  EXPECT_NE(s.find("(declare-const ret V_int)"), std::string::npos);
  EXPECT_NE(s.find("(= ret Fail_int)"), std::string::npos);
  EXPECT_NE(s.find("(check-sat)\n(get-model)"), std::string::npos);
}

TEST(Emit, Deterministic) {
  Program p = load_program(hobmc::testing::corpus_file("intro"), Bound{2});
  Prepared a = prepare(p.config, true, true), b = prepare(p.config, true, true);
  CheckMode mode = CheckMode::fail();
  EXPECT_EQ(smt_script(a, mode, {}), smt_script(b, mode, {}));
}

TEST(Emit, UndeclaredVariable) {
  LogVar x{"x", I};
  EXPECT_THROW(emit_smtlib({}, {}, {fm::eq(fm::var(x), fm::integer(1))}, fm::truth()), UndeclaredVariable);
}

TEST(Emit, QuotedSymbols) {
  EXPECT_EQ(smt_symbol("ret1"), "ret1");
  EXPECT_EQ(smt_symbol("f'"), "|f'|");
  EXPECT_EQ(smt_symbol("1x"), "|1x|");
  EXPECT_TRUE(clashes_with_encoding("Int_x"));
  EXPECT_TRUE(clashes_with_encoding("and"));
  EXPECT_FALSE(clashes_with_encoding("n"));
}

TEST(Emit, SortsInDependencyOrder) {
  Type pi = Type::prod(I, Type::arrow(I, I));
  LogVar p{"p", pi};
  std::string s = emit_smtlib({p}, {}, {}, fm::truth());
  auto inner = s.find("(V_fun_int_int 0)");
  auto outer = s.find("(" + sort_name(pi) + " 0)");
  ASSERT_NE(inner, std::string::npos) << s;
  ASSERT_NE(outer, std::string::npos) << s;
  EXPECT_LT(inner, outer);
}

TEST_F(Formulas, EmptyIsSat) {
  auto r = run_solver(emit_smtlib({}, {}, {}, fm::truth()), SolverConfig{});
  EXPECT_EQ(r.status, SolverStatus::Sat);
}

TEST_F(Formulas, PairAndMethodEncoding) {
  Type fi = Type::arrow(I, I);
  LogVar p{"p", Type::prod(I, fi)};
  std::vector<FormulaPtr> qs = {
      fm::eq(fm::proj(1, fm::var(p)), fm::integer(3)),
      fm::conj({fm::eq(fm::var(p), fm::pair(fm::integer(3), fm::meth(1, fi))),
                fm::eq(fm::proj(2, fm::var(p)), fm::meth(2, fi))}),
      fm::conj({fm::eq(fm::var(p), fm::fail(p.sort)), fm::eq(fm::var(p), fm::nil(p.sort))}),
      fm::int_cmp(BinOpKind::Gt, fm::arith(BinOpKind::Mod, fm::integer(-7), fm::integer(2)), fm::integer(0)),
  };
  auto got = solve_each({p}, qs);
  EXPECT_EQ(got[0], SolverStatus::Sat);
  EXPECT_EQ(got[1], SolverStatus::Unsat);
  EXPECT_EQ(got[2], SolverStatus::Unsat);
  EXPECT_EQ(got[3], SolverStatus::Sat);
}

TEST_F(Formulas, CorpusScriptsAreSortSound) {
  for (const auto& name : hobmc::testing::corpus_names()) {
    Program p = load_program(hobmc::testing::corpus_file(name), Bound{2});
    for (bool opt : {true, false}) {
      Prepared pr = prepare(p.config, opt, true, 500'000);
      std::string s = smt_script(pr, CheckMode::fail(), {});
      s.resize(s.size() - std::string("(get-model)\n").size());  // errors after unsat
      SolverResult r;
      ASSERT_NO_THROW(r = run_solver(s, SolverConfig{})) << name;
      EXPECT_EQ(r.raw.find("(error"), std::string::npos) << name << ": " << r.raw;
    }
  }
}
