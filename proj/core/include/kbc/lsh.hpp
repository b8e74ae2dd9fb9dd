#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "kbc/embedding.hpp"
#include "kbc/types.hpp"

namespace kbc {

struct LshConfig {
  std::size_t tables = 40;       // T
  std::size_t hyperplanes = 6;   // H bits per signature; 0 degenerates to one bucket
  std::size_t recall_probes = 128;  // probe set size for the build-time recall report
  std::size_t recall_k = 50;
};

// Random-hyperplane LSH over the entity rows of one embedding snapshot.
// Each table hashes an entity to the H-bit sign pattern of its projections;
// a query unions the buckets it lands in across tables and reranks the
// candidates by exact cosine. Rebuild whenever the embeddings move (the
// trainer does so once per epoch).
class SimilarityIndex {
 public:
  static SimilarityIndex build(const EmbeddingStore& emb, const LshConfig& cfg,
                               std::uint64_t seed);

  // Up to k distinct entity ids ranked by exact cosine to entity `e`
  // (self included). Ties break on the lower id.
  std::vector<EntityId> query(const EmbeddingStore& emb, EntityId e, std::size_t k) const;

  // Mean recall@recall_k against an exact full scan, measured on a seeded
  // probe sample at build time.
  double probe_recall() const { return probe_recall_; }

  std::size_t tables() const { return cfg_.tables; }
  std::size_t hyperplanes() const { return cfg_.hyperplanes; }

 private:
  SimilarityIndex() = default;

  std::uint64_t signature(std::size_t table, const Eigen::Ref<const Eigen::RowVectorXd>& row) const;

  LshConfig cfg_;
  // tables x hyperplanes rows of dimension d, stacked per table.
  RowMatrixXd planes_;
  std::vector<std::unordered_map<std::uint64_t, std::vector<EntityId>>> buckets_;
  double probe_recall_ = 0.0;
};

SimilarityIndex build_index(const EmbeddingStore& emb, std::size_t tables,
                            std::size_t hyperplanes, std::uint64_t seed);

}  // namespace kbc
