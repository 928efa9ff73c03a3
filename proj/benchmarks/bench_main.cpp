#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "cep/catalog.hpp"
#include "cep/classify.hpp"
#include "cep/lang.hpp"
#include "cep/powerset.hpp"
#include "cep/rank.hpp"

namespace {

using namespace cep;

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(CEP_FIXTURE_DIR) + "/" + name);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Circuit random_circuit(std::shared_ptr<const FiniteSemiring> sr, std::size_t gates, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Circuit c(sr);
  for (std::size_t i = 0; i < gates; ++i) {
    const auto id = "g" + std::to_string(i);
    if (i < 2 || rng() % 3 == 0) {
      c.add_gate(id, Rhs::constant(static_cast<Elem>(rng() % sr->size())));
    } else {
      const auto a = static_cast<GateId>(rng() % i), b = static_cast<GateId>(rng() % i);
      c.add_gate(id, rng() % 2 ? Rhs::add(a, b) : Rhs::mul(a, b));
    }
  }
  c.set_output(static_cast<GateId>(gates - 1));
  return c;
}

void BM_ClassifyPowerZ5(benchmark::State& state) {
  const auto sr = build_power(cyclic_group(5));
  for (auto _ : state) benchmark::DoNotOptimize(classify(sr));
}
BENCHMARK(BM_ClassifyPowerZ5)->Unit(benchmark::kMillisecond);

void BM_BuildPower(benchmark::State& state) {
  const auto sg = cyclic_group(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_power(sg));
}
BENCHMARK(BM_BuildPower)->DenseRange(3, 7, 2)->Unit(benchmark::kMicrosecond);

void BM_EvalNaive(benchmark::State& state) {
  const auto sr = std::make_shared<const FiniteSemiring>(build_power(cyclic_group(5)));
  const auto c = random_circuit(sr, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eval_naive(c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvalNaive)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_EvalPhased(benchmark::State& state) {
  const auto sr = std::make_shared<const FiniteSemiring>(build_power(cyclic_group(5)));
  const auto c = normalize(random_circuit(sr, static_cast<std::size_t>(state.range(0)), 2));
  const auto types = *identity_types(c);
  const auto rank = cardinality_rank(*sr);
  for (auto _ : state) benchmark::DoNotOptimize(eval_phased(c, types, rank));
}
BENCHMARK(BM_EvalPhased)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMicrosecond);

void BM_EvalFull(benchmark::State& state) {
  const auto sr = std::make_shared<const FiniteSemiring>(truncated_max_plus(4));
  const auto c = random_circuit(sr, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(eval_full(c));
}
BENCHMARK(BM_EvalFull)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMicrosecond);

void BM_Intersect(benchmark::State& state) {
  const auto g = parse_grammar(slurp("nested.grammar"));
  const auto d = parse_dfa(slurp("sigma_a_sigma_b_sigma.dfa"));
  for (auto _ : state) benchmark::DoNotOptimize(intersect(g, d, true));
}
BENCHMARK(BM_Intersect)->Unit(benchmark::kMicrosecond);

void BM_SyntacticMonoid(benchmark::State& state) {
  const auto d = parse_dfa(slurp("ab_star.dfa"));
  for (auto _ : state) benchmark::DoNotOptimize(syntactic_monoid(d));
}
BENCHMARK(BM_SyntacticMonoid)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
