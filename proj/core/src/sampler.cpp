#include "kbc/sampler.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "kbc/errors.hpp"
#include "kbc/model.hpp"

namespace kbc {
namespace {

// Streams per positive: side selection and acceptance draws are decoupled so
// both phases can run in separate passes over the batch.
Rng side_rng(std::uint64_t seed_base, std::size_t j) {
  return make_rng(seed_base, seed_stream::kTriple, 2 * j);
}

Rng accept_rng(std::uint64_t seed_base, std::size_t j) {
  return make_rng(seed_base, seed_stream::kTriple, 2 * j + 1);
}

// Reservoir insert keeping at most `cap` accepted negatives per positive,
// each surviving with equal probability. cap == 0 disables the cap.
void reservoir_push(std::vector<Triple>& negatives, const Triple& t, std::size_t cap,
                    std::size_t accepted_so_far, Rng& rng) {
  if (cap == 0 || negatives.size() < cap) {
    negatives.push_back(t);
    return;
  }
  std::uniform_int_distribution<std::size_t> slot(0, accepted_so_far);
  if (std::size_t s = slot(rng); s < cap) {
    negatives[s] = t;
  }
}

// Fallback for a positive whose query row is all zeros: one uniform
// corruption, rejected while it reconstructs a known-true triple so the
// output still never contains store members. Gives up empty if the candidate
// space is saturated.
void rns_fallback(NegativeBatch::Entry& entry, const Triple& t, Side side,
                  const TripleStore& store, std::size_t num_entities, Rng& rng) {
  constexpr int kMaxRetries = 256;
  std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(num_entities - 1));
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    Triple candidate = corrupt(t, side, pick(rng));
    if (!store.contains(candidate)) {
      entry.negatives.push_back(candidate);
      return;
    }
  }
}

// Acceptance sweep over one candidate row. `cosines(i)` is the similarity of
// entity i to the replaced entity; candidates with non-positive similarity
// are free to skip before the store lookup.
template <typename CosineRow>
void accept_candidates(NegativeBatch::Entry& entry, const Triple& t, Side side,
                       const TripleStore& store, const CosineRow& cosines,
                       std::span<const EntityId> candidate_ids, std::size_t cap, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t accepted = 0;
  for (std::size_t c = 0; c < candidate_ids.size(); ++c) {
    const double p = cosines(c);
    if (p <= 0.0) {
      continue;
    }
    Triple candidate = corrupt(t, side, candidate_ids[c]);
    if (store.contains(candidate)) {
      continue;
    }
    if (unit(rng) < p) {
      reservoir_push(entry.negatives, candidate, cap, accepted, rng);
      ++accepted;
    }
  }
}

}  // namespace

void SamplerConfig::validate() const {
  if (kind == Kind::Rns && rns_negatives == 0) {
    throw DataError("sampler: rns negatives per positive must be >= 1");
  }
  if (kind == Kind::Dns && dns_candidates == Candidates::Approximate && dns_top_k == 0) {
    throw DataError("sampler: dns top-k must be >= 1 in approximate mode");
  }
  if (exploration < 0.0 || exploration > 1.0) {
    throw DataError("sampler: exploration must lie in [0, 1]");
  }
}

Side choose_side(const Triple& t, const BernoulliStats& stats, Rng& rng) {
  std::bernoulli_distribution head(stats.p_head(t.rel));
  return head(rng) ? Side::Head : Side::Tail;
}

NegativeBatch sample_rns(std::span<const Triple> batch, std::size_t negatives_per_positive,
                         const BernoulliStats& stats, std::size_t num_entities,
                         std::uint64_t seed_base) {
  if (num_entities == 0) {
    throw DataError("sampler: cannot corrupt with an empty entity set");
  }
  NegativeBatch out;
  out.entries.resize(batch.size());
  std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(num_entities - 1));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    Rng rng = make_rng(seed_base, seed_stream::kTriple, j);
    NegativeBatch::Entry& entry = out.entries[j];
    entry.positive_index = j;
    entry.negatives.reserve(negatives_per_positive);
    for (std::size_t c = 0; c < negatives_per_positive; ++c) {
      Side side = choose_side(batch[j], stats, rng);
      entry.negatives.push_back(corrupt(batch[j], side, pick(rng)));
    }
  }
  return out;
}

NegativeBatch sample_dns(std::span<const Triple> batch, const TripleStore& store,
                         const EmbeddingStore& emb, const BernoulliStats& stats,
                         const SamplerConfig& cfg, std::uint64_t seed_base,
                         const SimilarityIndex* index) {
  const std::size_t num_entities = emb.num_entities();
  const bool approximate = cfg.dns_candidates == SamplerConfig::Candidates::Approximate;
  if (approximate && index == nullptr) {
    throw DataError("sampler: approximate dns requires a similarity index");
  }

  NegativeBatch out;
  out.entries.resize(batch.size());

  // Side selection first so the replaced-entity rows are known up front.
  std::vector<Side> sides(batch.size());
  std::vector<EntityId> queries(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    Rng rng = side_rng(seed_base, j);
    sides[j] = choose_side(batch[j], stats, rng);
    queries[j] = replaced_entity(batch[j], sides[j]);
  }

  if (!approximate) {
    // One GEMM gives every candidate similarity for the whole batch.
    RowMatrixXd query_rows(static_cast<Eigen::Index>(batch.size()), emb.dim());
    for (std::size_t j = 0; j < batch.size(); ++j) {
      query_rows.row(static_cast<Eigen::Index>(j)) = emb.entity(queries[j]);
    }
    std::vector<char> zero_query;
    RowMatrixXd sims = cosine_rows(emb, query_rows, &zero_query);

    std::vector<EntityId> all_ids(num_entities);
    for (std::size_t i = 0; i < num_entities; ++i) {
      all_ids[i] = static_cast<EntityId>(i);
    }

    for (std::size_t j = 0; j < batch.size(); ++j) {
      NegativeBatch::Entry& entry = out.entries[j];
      entry.positive_index = j;
      Rng rng = accept_rng(seed_base, j);
      if (zero_query[j] != 0) {
        rns_fallback(entry, batch[j], sides[j], store, num_entities, rng);
        ++out.rns_fallbacks;
        continue;
      }
      const auto row = sims.row(static_cast<Eigen::Index>(j));
      accept_candidates(
          entry, batch[j], sides[j], store, [&](std::size_t c) { return row(c); },
          std::span<const EntityId>(all_ids), cfg.dns_cap, rng);
    }
    return out;
  }

  for (std::size_t j = 0; j < batch.size(); ++j) {
    NegativeBatch::Entry& entry = out.entries[j];
    entry.positive_index = j;
    Rng rng = accept_rng(seed_base, j);

    const auto query_row = emb.entity(queries[j]);
    const double query_norm = query_row.norm();
    if (query_norm == 0.0) {
      rns_fallback(entry, batch[j], sides[j], store, num_entities, rng);
      ++out.rns_fallbacks;
      continue;
    }

    std::vector<EntityId> candidates = index->query(emb, queries[j], cfg.dns_top_k);
    // Exploration floor: occasionally admit one uniform candidate so no
    // entity is permanently shut out by the index.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (cfg.exploration > 0.0 && unit(rng) < cfg.exploration) {
      std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(num_entities - 1));
      EntityId extra = pick(rng);
      if (std::find(candidates.begin(), candidates.end(), extra) == candidates.end()) {
        candidates.push_back(extra);
      }
    }

    std::vector<double> sims(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto cand_row = emb.entity(candidates[c]);
      const double denom = query_norm * cand_row.norm();
      sims[c] = denom > 0.0 ? query_row.dot(cand_row) / denom : 0.0;
    }
    accept_candidates(
        entry, batch[j], sides[j], store, [&](std::size_t c) { return sims[c]; },
        std::span<const EntityId>(candidates), cfg.dns_cap, rng);
  }
  return out;
}

double expected_negatives(const EmbeddingStore& emb, const TripleStore& store, const Triple& t,
                          Side side) {
  const EntityId query = replaced_entity(t, side);
  Eigen::RowVectorXd sims = cosine_matrix_row(emb, query);
  double total = 0.0;
  for (Eigen::Index i = 0; i < sims.size(); ++i) {
    const double p = sims(i);
    if (p <= 0.0) {
      continue;
    }
    if (store.contains(corrupt(t, side, static_cast<EntityId>(i)))) {
      continue;
    }
    total += p;
  }
  return total;
}

}  // namespace kbc
