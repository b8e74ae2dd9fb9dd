#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "kbc/types.hpp"

namespace kbc {

enum class ModelKind : std::uint8_t { TransE = 0, Rescal = 1 };

// TransE dissimilarity norm for the translation residual.
enum class TranseNorm : std::uint8_t { L1 = 1, L2 = 2 };

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Trainable parameters: one d-vector per entity, and per relation either a
// d-vector (TransE) or a d x d matrix (RESCAL). Storage is flat row-major
// doubles; Eigen maps give structured views without copies.
//
// Readers and the single writer must not overlap; the trainer alternates
// read phases (sampling, scoring) with the update phase.
class EmbeddingStore {
 public:
  EmbeddingStore(ModelKind kind, std::size_t num_entities, std::size_t num_relations,
                 std::size_t dim, TranseNorm norm = TranseNorm::L1);

  ModelKind kind() const { return kind_; }
  TranseNorm transe_norm() const { return norm_; }
  std::size_t num_entities() const { return num_entities_; }
  std::size_t num_relations() const { return num_relations_; }
  std::size_t dim() const { return dim_; }

  // Parameters per relation: d for TransE, d*d for RESCAL.
  std::size_t relation_param_count() const {
    return kind_ == ModelKind::TransE ? dim_ : dim_ * dim_;
  }

  Eigen::Map<Eigen::RowVectorXd> entity(EntityId e) {
    return {entity_data_.data() + std::size_t(e) * dim_, static_cast<Eigen::Index>(dim_)};
  }
  Eigen::Map<const Eigen::RowVectorXd> entity(EntityId e) const {
    return {entity_data_.data() + std::size_t(e) * dim_, static_cast<Eigen::Index>(dim_)};
  }

  Eigen::Map<RowMatrixXd> entity_matrix() {
    return {entity_data_.data(), static_cast<Eigen::Index>(num_entities_),
            static_cast<Eigen::Index>(dim_)};
  }
  Eigen::Map<const RowMatrixXd> entity_matrix() const {
    return {entity_data_.data(), static_cast<Eigen::Index>(num_entities_),
            static_cast<Eigen::Index>(dim_)};
  }

  // TransE relation vector.
  Eigen::Map<Eigen::RowVectorXd> relation_vector(RelationId r) {
    return {relation_data_.data() + std::size_t(r) * dim_, static_cast<Eigen::Index>(dim_)};
  }
  Eigen::Map<const Eigen::RowVectorXd> relation_vector(RelationId r) const {
    return {relation_data_.data() + std::size_t(r) * dim_, static_cast<Eigen::Index>(dim_)};
  }

  // RESCAL relation matrix.
  Eigen::Map<RowMatrixXd> relation_matrix(RelationId r) {
    return {relation_data_.data() + std::size_t(r) * dim_ * dim_,
            static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_)};
  }
  Eigen::Map<const RowMatrixXd> relation_matrix(RelationId r) const {
    return {relation_data_.data() + std::size_t(r) * dim_ * dim_,
            static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_)};
  }

  std::span<double> entity_data() { return entity_data_; }
  std::span<const double> entity_data() const { return entity_data_; }
  std::span<double> relation_data() { return relation_data_; }
  std::span<const double> relation_data() const { return relation_data_; }

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

 private:
  ModelKind kind_;
  TranseNorm norm_;
  std::size_t num_entities_;
  std::size_t num_relations_;
  std::size_t dim_;
  std::vector<double> entity_data_;
  std::vector<double> relation_data_;
};

// All values drawn uniform in [-6/sqrt(d), +6/sqrt(d)], then entity rows are
// L2-normalized. Deterministic given the seed.
EmbeddingStore init_embeddings(ModelKind kind, std::size_t num_entities,
                               std::size_t num_relations, std::size_t dim,
                               std::uint64_t seed, TranseNorm norm = TranseNorm::L1);

// Rescale every entity row to unit L2 norm. Zero rows are left alone;
// returns how many were encountered.
std::size_t normalize_entities(EmbeddingStore& emb);

}  // namespace kbc
