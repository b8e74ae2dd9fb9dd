#include "kbc/lsh.hpp"

#include <algorithm>
#include <random>

#include "kbc/errors.hpp"
#include "kbc/rng.hpp"

namespace kbc {

namespace {

// Exact cosine top-k of `e` against all entities, self excluded.
std::vector<EntityId> exact_top_k(const EmbeddingStore& emb, EntityId e, std::size_t k) {
  const auto entities = emb.entity_matrix();
  const Eigen::VectorXd sims = entities * emb.entity(e).transpose();
  const Eigen::VectorXd norms = entities.rowwise().norm();
  const double qnorm = norms[e];

  std::vector<std::pair<double, EntityId>> scored;
  scored.reserve(emb.num_entities());
  for (EntityId i = 0; i < emb.num_entities(); ++i) {
    if (i == e || norms[i] == 0.0 || qnorm == 0.0) {
      continue;
    }
    scored.emplace_back(sims[i] / (norms[i] * qnorm), i);
  }
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                    scored.end(), [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<EntityId> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = scored[i].second;
  }
  return ids;
}

}  // namespace

std::uint64_t SimilarityIndex::signature(
    std::size_t table, const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  std::uint64_t sig = 0;
  const std::size_t base = table * cfg_.hyperplanes;
  for (std::size_t h = 0; h < cfg_.hyperplanes; ++h) {
    const double proj = planes_.row(static_cast<Eigen::Index>(base + h)).dot(row);
    sig = (sig << 1) | (proj >= 0.0 ? 1u : 0u);
  }
  return sig;
}

SimilarityIndex SimilarityIndex::build(const EmbeddingStore& emb, const LshConfig& cfg,
                                       std::uint64_t seed) {
  if (cfg.tables == 0) {
    throw DataError("LSH index needs at least one table");
  }
  if (cfg.hyperplanes > 63) {
    throw DataError("LSH signature is limited to 63 hyperplanes");
  }

  SimilarityIndex index;
  index.cfg_ = cfg;

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t rows = cfg.tables * cfg.hyperplanes;
  index.planes_.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(emb.dim()));
  for (Eigen::Index i = 0; i < index.planes_.rows(); ++i) {
    for (Eigen::Index j = 0; j < index.planes_.cols(); ++j) {
      index.planes_(i, j) = normal(rng);
    }
  }

  index.buckets_.resize(cfg.tables);
  for (std::size_t t = 0; t < cfg.tables; ++t) {
    auto& table = index.buckets_[t];
    for (EntityId e = 0; e < emb.num_entities(); ++e) {
      table[index.signature(t, emb.entity(e))].push_back(e);
    }
  }

  // Build-time recall report against the exact scan.
  const std::size_t probes = std::min<std::size_t>(cfg.recall_probes, emb.num_entities());
  if (probes > 0 && cfg.recall_k > 0) {
    std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(emb.num_entities() - 1));
    double recall_sum = 0.0;
    std::size_t measured = 0;
    for (std::size_t p = 0; p < probes; ++p) {
      const EntityId e = pick(rng);
      const auto exact = exact_top_k(emb, e, cfg.recall_k);
      if (exact.empty()) {
        continue;
      }
      auto approx = index.query(emb, e, cfg.recall_k + 1);  // +1 absorbs self
      std::erase(approx, e);
      if (approx.size() > exact.size()) {
        approx.resize(exact.size());
      }
      std::vector<char> hit(emb.num_entities(), 0);
      for (EntityId id : approx) {
        hit[id] = 1;
      }
      std::size_t found = 0;
      for (EntityId id : exact) {
        found += hit[id];
      }
      recall_sum += static_cast<double>(found) / static_cast<double>(exact.size());
      ++measured;
    }
    index.probe_recall_ = measured > 0 ? recall_sum / static_cast<double>(measured) : 0.0;
  }
  return index;
}

std::vector<EntityId> SimilarityIndex::query(const EmbeddingStore& emb, EntityId e,
                                             std::size_t k) const {
  if (k == 0) {
    return {};
  }

  std::vector<EntityId> candidates;
  std::vector<char> seen(emb.num_entities(), 0);
  for (std::size_t t = 0; t < buckets_.size(); ++t) {
    const auto it = buckets_[t].find(signature(t, emb.entity(e)));
    if (it == buckets_[t].end()) {
      continue;
    }
    for (EntityId id : it->second) {
      if (!seen[id]) {
        seen[id] = 1;
        candidates.push_back(id);
      }
    }
  }

  const auto query_row = emb.entity(e);
  const double qnorm = query_row.norm();
  std::vector<std::pair<double, EntityId>> scored;
  scored.reserve(candidates.size());
  for (EntityId id : candidates) {
    const double cnorm = emb.entity(id).norm();
    const double cos =
        (qnorm == 0.0 || cnorm == 0.0) ? 0.0 : query_row.dot(emb.entity(id)) / (qnorm * cnorm);
    scored.emplace_back(cos, id);
  }
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                    scored.end(), [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<EntityId> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = scored[i].second;
  }
  return ids;
}

SimilarityIndex build_index(const EmbeddingStore& emb, std::size_t tables,
                            std::size_t hyperplanes, std::uint64_t seed) {
  LshConfig cfg;
  cfg.tables = tables;
  cfg.hyperplanes = hyperplanes;
  return SimilarityIndex::build(emb, cfg, seed);
}

}  // namespace kbc
