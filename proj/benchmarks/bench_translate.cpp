#include <benchmark/benchmark.h>

#include <string>

#include "hobmc/interp.hpp"
#include "hobmc/parser.hpp"
#include "hobmc/pointsto.hpp"
#include "hobmc/translate.hpp"

using namespace hobmc;

namespace {

Program corpus(const std::string& name, unsigned k) {
  return load_program(std::string(HOBMC_CORPUS_DIR) + "/" + name + ".bmc", Bound{k});
}

void BM_TranslateBase(benchmark::State& st) {
  Program p = corpus("example3-tri", static_cast<unsigned>(st.range(0)));
  SymbolicConfig sc = build_initial(p.config);
  std::size_t clauses = 0;
  for (auto _ : st) {
    TranslationResult r = translate(sc);
    clauses = r.phi.size();
    benchmark::DoNotOptimize(r);
  }
  st.counters["clauses"] = static_cast<double>(clauses);
}
BENCHMARK(BM_TranslateBase)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_TranslateOpt(benchmark::State& st) {
  Program p = corpus("example3-tri", static_cast<unsigned>(st.range(0)));
  SymbolicConfig sc = build_initial(p.config);
  PtMap pt = initial_pt(p.config);
  std::size_t clauses = 0;
  for (auto _ : st) {
    OptTranslation r = translate_opt(sc, pt);
    clauses = r.result.phi.size();
    benchmark::DoNotOptimize(r);
  }
  st.counters["clauses"] = static_cast<double>(clauses);
}
BENCHMARK(BM_TranslateOpt)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

void BM_Parse(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(corpus("hrec", 2));
}
BENCHMARK(BM_Parse);

void BM_EvalMc91(benchmark::State& st) {
  Program p = corpus("mc91-e", 200);
  std::map<Name, Value> sigma{{p.inputs[0], Value::integer(static_cast<int>(st.range(0)))}};
  Config c = close_config(p.config, sigma);
  for (auto _ : st) {
    NameGen g;
    benchmark::DoNotOptimize(eval(c, g));
  }
}
BENCHMARK(BM_EvalMc91)->Arg(0)->Arg(50)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
