// Microbenchmarks for the hot paths: scoring sweeps, negative sampling,
// index build/query and the ranking protocol. Sizes are chosen so a full
// run stays under a minute while still exercising the GEMM-backed paths.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "kbc/adam.hpp"
#include "kbc/embedding.hpp"
#include "kbc/eval.hpp"
#include "kbc/lsh.hpp"
#include "kbc/model.hpp"
#include "kbc/sampler.hpp"
#include "kbc/triple_store.hpp"

namespace {

using namespace kbc;

TripleStore random_store(std::size_t entities, std::size_t relations, std::size_t count,
                         std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<EntityId> ent(0, static_cast<EntityId>(entities - 1));
  std::uniform_int_distribution<RelationId> rel(0, static_cast<RelationId>(relations - 1));
  std::vector<Triple> triples;
  triples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    triples.push_back(Triple{ent(rng), rel(rng), ent(rng)});
  }
  return TripleStore(Split::Train, std::move(triples));
}

void BM_CandidateScores(benchmark::State& state, ModelKind kind) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::size_t entities = 10000;
  EmbeddingStore emb = init_embeddings(kind, entities, 4, dim, 1);
  const Triple t{3, 1, 7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(candidate_scores(emb, t, Side::Tail));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(entities));
}
BENCHMARK_CAPTURE(BM_CandidateScores, transe, ModelKind::TransE)->Arg(50)->Arg(200);
BENCHMARK_CAPTURE(BM_CandidateScores, rescal, ModelKind::Rescal)->Arg(50)->Arg(200);

void BM_SampleRns(benchmark::State& state) {
  const std::size_t entities = 5000;
  TripleStore store = random_store(entities, 8, 20000, 2);
  BernoulliStats stats = compute_bernoulli_stats(store);
  std::vector<Triple> batch(store.triples().begin(), store.triples().begin() + 256);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_rns(batch, 5, stats, entities, seed++));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 256 * 5);
}
BENCHMARK(BM_SampleRns);

void BM_SampleDnsExact(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::size_t entities = 5000;
  EmbeddingStore emb = init_embeddings(ModelKind::Rescal, entities, 8, dim, 3);
  TripleStore store = random_store(entities, 8, 20000, 4);
  BernoulliStats stats = compute_bernoulli_stats(store);
  std::vector<Triple> batch(store.triples().begin(), store.triples().begin() + 256);
  SamplerConfig cfg;
  cfg.kind = SamplerConfig::Kind::Dns;
  cfg.dns_candidates = SamplerConfig::Candidates::Exact;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_dns(batch, store, emb, stats, cfg, seed++));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 256);
}
BENCHMARK(BM_SampleDnsExact)->Arg(50)->Arg(200);

void BM_SampleDnsApproximate(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::size_t entities = 5000;
  EmbeddingStore emb = init_embeddings(ModelKind::Rescal, entities, 8, dim, 5);
  TripleStore store = random_store(entities, 8, 20000, 6);
  BernoulliStats stats = compute_bernoulli_stats(store);
  std::vector<Triple> batch(store.triples().begin(), store.triples().begin() + 256);
  SamplerConfig cfg;
  cfg.kind = SamplerConfig::Kind::Dns;
  cfg.dns_candidates = SamplerConfig::Candidates::Approximate;
  cfg.dns_top_k = 200;
  SimilarityIndex index = SimilarityIndex::build(emb, cfg.lsh, 7);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_dns(batch, store, emb, stats, cfg, seed++, &index));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 256);
}
BENCHMARK(BM_SampleDnsApproximate)->Arg(50)->Arg(200);

void BM_LshBuild(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  EmbeddingStore emb = init_embeddings(ModelKind::TransE, 10000, 4, dim, 8);
  LshConfig cfg;
  cfg.recall_probes = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(SimilarityIndex::build(emb, cfg, 9));
  }
}
BENCHMARK(BM_LshBuild)->Arg(50)->Arg(200);

void BM_LshQuery(benchmark::State& state) {
  const std::size_t entities = 10000;
  EmbeddingStore emb = init_embeddings(ModelKind::TransE, entities, 4, 100, 10);
  LshConfig cfg;
  cfg.recall_probes = 0;
  SimilarityIndex index = SimilarityIndex::build(emb, cfg, 11);
  EntityId e = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.query(emb, e, 200));
    e = (e + 17) % entities;
  }
}
BENCHMARK(BM_LshQuery);

void BM_FilteredRank(benchmark::State& state) {
  const std::size_t entities = 10000;
  EmbeddingStore emb = init_embeddings(ModelKind::TransE, entities, 4, 100, 12);
  TripleStore store = random_store(entities, 4, 5000, 13);
  FilterSet filter = make_filter({&store});
  const Triple t = store.triples().front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(filtered_rank(emb, t, Side::Tail, filter));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(entities));
}
BENCHMARK(BM_FilteredRank);

void BM_AdamStep(benchmark::State& state) {
  const std::size_t n = 1 << 20;
  std::vector<double> params(n, 0.5), grad(n, 0.1), m(n, 0.0), v(n, 0.0);
  AdamConfig cfg;
  std::uint64_t t = 0;
  for (auto _ : state) {
    adam_update(params, grad, m, v, ++t, cfg);
    benchmark::DoNotOptimize(params.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_AdamStep);

}  // namespace

BENCHMARK_MAIN();
