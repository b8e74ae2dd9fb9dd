#pragma once

#include <Eigen/Core>
#include <unordered_map>

#include "kbc/embedding.hpp"
#include "kbc/types.hpp"

namespace kbc {

// Triple score; higher means more plausible.
//   TransE:  -|| e_h + w_r - e_t ||   (L1 or L2 per store config)
//   RESCAL:   e_h^T W_r e_t
double score(const EmbeddingStore& emb, const Triple& t);

// Scores of all |E| candidate triples obtained by substituting each entity
// into `side` of `t`. Component e is score(corrupt(t, side, e)).
Eigen::VectorXd candidate_scores(const EmbeddingStore& emb, const Triple& t, Side side);

// Cosine similarity of entity `e` against every entity row. Component at
// index e is 1. Zero candidate rows get similarity 0; a zero query row is a
// NumericError.
Eigen::VectorXd cosine_matrix_row(const EmbeddingStore& emb, EntityId e);

// Batched form: cosine of each query row (q x d) against all entity rows,
// result is q x |E|. Rows of `queries` with zero norm are flagged in
// `zero_query` (if given) and produce all-zero output rows.
RowMatrixXd cosine_rows(const EmbeddingStore& emb, const Eigen::Ref<const RowMatrixXd>& queries,
                        std::vector<char>* zero_query = nullptr);

// Sparse per-row gradient accumulator for one batch. Rows never touched are
// simply absent (exactly zero).
class GradientBuffer {
 public:
  Eigen::RowVectorXd& entity(EntityId e, std::size_t dim);
  Eigen::RowVectorXd& relation_vector(RelationId r, std::size_t dim);
  RowMatrixXd& relation_matrix(RelationId r, std::size_t dim);

  bool empty() const {
    return entity_.empty() && relation_vec_.empty() && relation_mat_.empty();
  }

  const std::unordered_map<EntityId, Eigen::RowVectorXd>& entities() const {
    return entity_;
  }
  const std::unordered_map<RelationId, Eigen::RowVectorXd>& relation_vectors() const {
    return relation_vec_;
  }
  const std::unordered_map<RelationId, RowMatrixXd>& relation_matrices() const {
    return relation_mat_;
  }

  // Scatter-add into flat dense gradient tensors laid out like EmbeddingStore.
  void scatter(const EmbeddingStore& layout, std::span<double> entity_grad,
               std::span<double> relation_grad) const;

 private:
  std::unordered_map<EntityId, Eigen::RowVectorXd> entity_;
  std::unordered_map<RelationId, Eigen::RowVectorXd> relation_vec_;
  std::unordered_map<RelationId, RowMatrixXd> relation_mat_;
};

// Gradient of the pairwise hinge max(0, margin + f(neg) - f(pos)) with
// respect to every involved row. Inactive pairs leave `buf` untouched.
// The TransE L1 subgradient uses sign(.) with sign(0) = 0.
void accumulate_pair_gradient(const EmbeddingStore& emb, const Triple& pos,
                              const Triple& neg, double margin, GradientBuffer& buf);

// Convenience wrapper returning a fresh buffer (empty when the hinge is
// inactive).
GradientBuffer grad_pair(const EmbeddingStore& emb, const Triple& pos, const Triple& neg,
                         double margin);

}  // namespace kbc
