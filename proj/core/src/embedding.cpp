#include "kbc/embedding.hpp"

#include <cmath>
#include <random>

#include "kbc/rng.hpp"

namespace kbc {

EmbeddingStore::EmbeddingStore(ModelKind kind, std::size_t num_entities,
                               std::size_t num_relations, std::size_t dim,
                               TranseNorm norm)
    : kind_(kind),
      norm_(norm),
      num_entities_(num_entities),
      num_relations_(num_relations),
      dim_(dim),
      entity_data_(num_entities * dim, 0.0),
      relation_data_(num_relations * relation_param_count(), 0.0) {}

EmbeddingStore init_embeddings(ModelKind kind, std::size_t num_entities,
                               std::size_t num_relations, std::size_t dim,
                               std::uint64_t seed, TranseNorm norm) {
  EmbeddingStore emb(kind, num_entities, num_relations, dim, norm);
  const double range = 6.0 / std::sqrt(static_cast<double>(dim));
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(-range, range);
  for (double& v : emb.entity_data()) {
    v = uniform(rng);
  }
  for (double& v : emb.relation_data()) {
    v = uniform(rng);
  }
  normalize_entities(emb);
  return emb;
}

std::size_t normalize_entities(EmbeddingStore& emb) {
  std::size_t zero_rows = 0;
  for (EntityId e = 0; e < emb.num_entities(); ++e) {
    auto row = emb.entity(e);
    const double norm = row.norm();
    if (norm == 0.0) {
      ++zero_rows;
      continue;
    }
    row /= norm;
  }
  return zero_rows;
}

}  // namespace kbc
