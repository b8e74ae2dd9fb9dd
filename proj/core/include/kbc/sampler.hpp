#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kbc/embedding.hpp"
#include "kbc/lsh.hpp"
#include "kbc/rng.hpp"
#include "kbc/triple_store.hpp"
#include "kbc/types.hpp"

namespace kbc {

struct SamplerConfig {
  enum class Kind : std::uint8_t { Rns, Dns };
  enum class Candidates : std::uint8_t { Exact, Approximate };

  Kind kind = Kind::Rns;
  std::size_t rns_negatives = 5;  // C
  Candidates dns_candidates = Candidates::Exact;
  std::size_t dns_top_k = 200;  // K, approximate mode only
  std::size_t dns_cap = 0;      // reservoir cap on |N| per positive; 0 = unlimited
  double exploration = 0.05;    // approximate mode: chance of one extra uniform candidate
  LshConfig lsh;

  void validate() const;
};

// Per-batch sampler output: for each positive (batch-local index j) the set N
// of corrupted triples paired with it.
struct NegativeBatch {
  struct Entry {
    std::size_t positive_index = 0;
    std::vector<Triple> negatives;
  };
  std::vector<Entry> entries;
  std::size_t rns_fallbacks = 0;  // DNS positives with a zero query row

  std::size_t total_negatives() const {
    std::size_t n = 0;
    for (const Entry& e : entries) {
      n += e.negatives.size();
    }
    return n;
  }
};

// Head with probability tph/(tph+hpt) for the triple's relation.
Side choose_side(const Triple& t, const BernoulliStats& stats, Rng& rng);

// Plain random negative sampling: exactly C corruptions per positive, the
// replacement drawn uniform over all entities, the side drawn per corruption.
// Deliberately not filtered against the store.
NegativeBatch sample_rns(std::span<const Triple> batch, std::size_t negatives_per_positive,
                         const BernoulliStats& stats, std::size_t num_entities,
                         std::uint64_t seed_base);

// Distributional negative sampling. For every positive, each candidate entity
// is accepted independently with probability max(0, cos) against the entity
// being replaced; candidates that reconstruct a triple in `store` are skipped.
// Exact mode scans all entities; approximate mode restricts candidates to the
// LSH top-K (plus an occasional uniform exploration candidate) and requires
// `index` built from `emb`. Per-triple decisions are driven by independent
// rng streams derived from `seed_base`, so results are deterministic and
// independent of execution order.
NegativeBatch sample_dns(std::span<const Triple> batch, const TripleStore& store,
                         const EmbeddingStore& emb, const BernoulliStats& stats,
                         const SamplerConfig& cfg, std::uint64_t seed_base,
                         const SimilarityIndex* index = nullptr);

// Exact mean of |N| for one positive and side: the sum of max(0, cos) over
// candidates that survive the known-true filter.
double expected_negatives(const EmbeddingStore& emb, const TripleStore& store,
                          const Triple& t, Side side);

}  // namespace kbc
