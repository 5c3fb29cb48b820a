#include <benchmark/benchmark.h>

#include "pir/harness.hpp"

namespace {

using namespace pir;

struct Fixture {
  SchemeParams prm;
  SchemeCodes codes;
  QueryPlan plan;
  Secrets secrets;
  Records records;
  std::vector<QueryMsg> queries;
  std::vector<std::vector<uint32_t>> answers;
};

Fixture make_fixture(uint32_t N, uint32_t T, uint32_t M, uint32_t q) {
  Fixture fx;
  fx.prm = derive_parameters(N, T, M, q);
  fx.codes = build_scheme_codes(fx.prm);
  fx.plan = build_query_plan(fx.prm, 1);
  Rng rng(mix_seed(17, 1));
  fx.secrets = sample_secrets(fx.prm, rng);
  Rng rec(mix_seed(17, 0, 0xdb));
  fx.records = random_records(fx.prm.q, fx.prm.L, fx.prm.M, rec);
  fx.queries = generate_queries(fx.prm, fx.codes, fx.plan, fx.secrets);
  fx.answers.resize(N);
  for (uint32_t i0 = 0; i0 < N; ++i0)
    fx.answers[i0] = answer_query(fx.prm, fx.records, fx.queries[i0]);
  return fx;
}

void BM_CodeConstruction(benchmark::State& state) {
  const uint32_t N = uint32_t(state.range(0)), T = uint32_t(state.range(1));
  const uint32_t ell = uint32_t(state.range(2)), q = uint32_t(state.range(3));
  const auto choice = choose_code(N, T, ell, q);
  if (!choice) {
    state.SkipWithError("no admissible code");
    return;
  }
  std::vector<uint32_t> quota(N, 0);
  uint64_t left = uint64_t(T) * ell;
  for (uint32_t i = 0; i < N && left > 0; ++i) {
    quota[i] = uint32_t(std::min<uint64_t>(ell, left));
    left -= quota[i];
  }
  for (auto _ : state) {
    const auto f = Field::make(q);
    const Tower tw = Tower::make(f, choice->sub_ell);
    const Mat sym = grs_generator(tw.top(), N, T, choice->mode);
    BlockGenerator gen = expand_to_array_code(tw, sym);
    if (choice->copies > 1) gen = interleave(gen, choice->copies);
    benchmark::DoNotOptimize(normalize_with_quota(gen, quota));
  }
}

void BM_GenerateQueries(benchmark::State& state) {
  const Fixture fx = make_fixture(uint32_t(state.range(0)),
                                  uint32_t(state.range(1)),
                                  uint32_t(state.range(2)),
                                  uint32_t(state.range(3)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        generate_queries(fx.prm, fx.codes, fx.plan, fx.secrets));
}

void BM_AnswerQuery(benchmark::State& state) {
  const Fixture fx = make_fixture(uint32_t(state.range(0)),
                                  uint32_t(state.range(1)),
                                  uint32_t(state.range(2)),
                                  uint32_t(state.range(3)));
  for (auto _ : state)
    for (uint32_t i0 = 0; i0 < fx.prm.N; ++i0)
      benchmark::DoNotOptimize(
          answer_query(fx.prm, fx.records, fx.queries[i0]));
}

void BM_Reconstruct(benchmark::State& state) {
  const Fixture fx = make_fixture(uint32_t(state.range(0)),
                                  uint32_t(state.range(1)),
                                  uint32_t(state.range(2)),
                                  uint32_t(state.range(3)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        reconstruct(fx.prm, fx.codes, fx.plan, fx.secrets, fx.answers));
}

void BM_WireRoundTrip(benchmark::State& state) {
  const Fixture fx = make_fixture(uint32_t(state.range(0)),
                                  uint32_t(state.range(1)),
                                  uint32_t(state.range(2)),
                                  uint32_t(state.range(3)));
  for (auto _ : state)
    for (uint32_t i0 = 0; i0 < fx.prm.N; ++i0) {
      const std::string payload = encode_query(fx.prm, fx.queries[i0]);
      benchmark::DoNotOptimize(decode_query(payload, fx.prm));
    }
}

// (N, T, ell, q) — span of one mixing level
BENCHMARK(BM_CodeConstruction)
    ->Args({5, 3, 3, 2})
    ->Args({5, 3, 2, 2})
    ->Args({8, 3, 25, 2})
    ->Unit(benchmark::kMicrosecond);

// (N, T, M, q) — whole-scheme phases
BENCHMARK(BM_GenerateQueries)
    ->Args({3, 2, 2, 2})
    ->Args({5, 3, 3, 2})
    ->Args({8, 3, 4, 2})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AnswerQuery)
    ->Args({3, 2, 2, 2})
    ->Args({5, 3, 3, 2})
    ->Args({8, 3, 4, 2})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Reconstruct)
    ->Args({3, 2, 2, 2})
    ->Args({5, 3, 3, 2})
    ->Args({8, 3, 4, 2})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_WireRoundTrip)
    ->Args({5, 3, 3, 2})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
