#include "kbc/model.hpp"

#include <cmath>

#include "kbc/errors.hpp"

namespace kbc {

namespace {

// Smaller residual norms than this are treated as the L2 kink.
constexpr double kL2Tiny = 1e-12;

Eigen::RowVectorXd transe_residual(const EmbeddingStore& emb, const Triple& t) {
  return emb.entity(t.head) + emb.relation_vector(t.rel) - emb.entity(t.tail);
}

}  // namespace

double score(const EmbeddingStore& emb, const Triple& t) {
  if (emb.kind() == ModelKind::TransE) {
    const Eigen::RowVectorXd d = transe_residual(emb, t);
    return emb.transe_norm() == TranseNorm::L1 ? -d.lpNorm<1>() : -d.norm();
  }
  return (emb.entity(t.head) * emb.relation_matrix(t.rel)).dot(emb.entity(t.tail));
}

Eigen::VectorXd candidate_scores(const EmbeddingStore& emb, const Triple& t, Side side) {
  const auto entities = emb.entity_matrix();
  if (emb.kind() == ModelKind::TransE) {
    // Both sides reduce to -||x_e - q||: q = e_h + w_r when replacing the
    // tail, q = e_t - w_r when replacing the head.
    const Eigen::RowVectorXd q =
        side == Side::Tail
            ? Eigen::RowVectorXd(emb.entity(t.head) + emb.relation_vector(t.rel))
            : Eigen::RowVectorXd(emb.entity(t.tail) - emb.relation_vector(t.rel));
    if (emb.transe_norm() == TranseNorm::L1) {
      return -(entities.rowwise() - q).cwiseAbs().rowwise().sum();
    }
    return -(entities.rowwise() - q).rowwise().norm();
  }

  const auto w = emb.relation_matrix(t.rel);
  if (side == Side::Tail) {
    const Eigen::RowVectorXd u = emb.entity(t.head) * w;
    return entities * u.transpose();
  }
  const Eigen::VectorXd v = w * emb.entity(t.tail).transpose();
  return entities * v;
}

RowMatrixXd cosine_rows(const EmbeddingStore& emb,
                        const Eigen::Ref<const RowMatrixXd>& queries,
                        std::vector<char>* zero_query) {
  const auto entities = emb.entity_matrix();
  const Eigen::VectorXd entity_norms = entities.rowwise().norm();
  Eigen::VectorXd safe_norms = entity_norms;
  for (Eigen::Index j = 0; j < safe_norms.size(); ++j) {
    if (safe_norms[j] == 0.0) {
      safe_norms[j] = 1.0;
    }
  }

  if (zero_query != nullptr) {
    zero_query->assign(static_cast<std::size_t>(queries.rows()), 0);
  }

  RowMatrixXd sims = queries * entities.transpose();
  for (Eigen::Index i = 0; i < sims.rows(); ++i) {
    const double qnorm = queries.row(i).norm();
    if (qnorm == 0.0) {
      sims.row(i).setZero();
      if (zero_query != nullptr) {
        (*zero_query)[static_cast<std::size_t>(i)] = 1;
      }
      continue;
    }
    sims.row(i) = sims.row(i).cwiseQuotient(safe_norms.transpose() * qnorm);
  }
  // Zero-norm candidates carry no direction; their similarity is 0.
  for (Eigen::Index j = 0; j < entity_norms.size(); ++j) {
    if (entity_norms[j] == 0.0) {
      sims.col(j).setZero();
    }
  }
  return sims;
}

Eigen::VectorXd cosine_matrix_row(const EmbeddingStore& emb, EntityId e) {
  RowMatrixXd query(1, emb.dim());
  query.row(0) = emb.entity(e);
  std::vector<char> zero;
  RowMatrixXd sims = cosine_rows(emb, query, &zero);
  if (zero[0] != 0) {
    throw NumericError("cosine of zero embedding row (entity id " + std::to_string(e) +
                       ")");
  }
  return sims.row(0).transpose();
}

Eigen::RowVectorXd& GradientBuffer::entity(EntityId e, std::size_t dim) {
  auto [it, inserted] = entity_.try_emplace(e);
  if (inserted) {
    it->second = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(dim));
  }
  return it->second;
}

Eigen::RowVectorXd& GradientBuffer::relation_vector(RelationId r, std::size_t dim) {
  auto [it, inserted] = relation_vec_.try_emplace(r);
  if (inserted) {
    it->second = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(dim));
  }
  return it->second;
}

RowMatrixXd& GradientBuffer::relation_matrix(RelationId r, std::size_t dim) {
  auto [it, inserted] = relation_mat_.try_emplace(r);
  if (inserted) {
    it->second = RowMatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                   static_cast<Eigen::Index>(dim));
  }
  return it->second;
}

void GradientBuffer::scatter(const EmbeddingStore& layout, std::span<double> entity_grad,
                             std::span<double> relation_grad) const {
  const std::size_t d = layout.dim();
  for (const auto& [e, g] : entity_) {
    Eigen::Map<Eigen::RowVectorXd>(entity_grad.data() + std::size_t(e) * d,
                                   static_cast<Eigen::Index>(d)) += g;
  }
  for (const auto& [r, g] : relation_vec_) {
    Eigen::Map<Eigen::RowVectorXd>(relation_grad.data() + std::size_t(r) * d,
                                   static_cast<Eigen::Index>(d)) += g;
  }
  for (const auto& [r, g] : relation_mat_) {
    Eigen::Map<RowMatrixXd>(relation_grad.data() + std::size_t(r) * d * d,
                            static_cast<Eigen::Index>(d),
                            static_cast<Eigen::Index>(d)) += g;
  }
}

namespace {

// Adds weight * d(score)/d(params) of triple `t` into the buffer.
void add_score_gradient(const EmbeddingStore& emb, const Triple& t, double weight,
                        GradientBuffer& buf) {
  const std::size_t d = emb.dim();
  if (emb.kind() == ModelKind::TransE) {
    Eigen::RowVectorXd g = transe_residual(emb, t);
    if (emb.transe_norm() == TranseNorm::L1) {
      g = g.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
    } else {
      const double norm = g.norm();
      if (norm < kL2Tiny) {
        return;  // subgradient at the kink
      }
      g /= norm;
    }
    // f = -||e_h + w_r - e_t||, so df/de_h = df/dw_r = -g and df/de_t = +g.
    buf.entity(t.head, d) -= weight * g;
    buf.relation_vector(t.rel, d) -= weight * g;
    buf.entity(t.tail, d) += weight * g;
    return;
  }

  const auto w = emb.relation_matrix(t.rel);
  const auto eh = emb.entity(t.head);
  const auto et = emb.entity(t.tail);
  buf.entity(t.head, d) += weight * (et * w.transpose());
  buf.entity(t.tail, d) += weight * (eh * w);
  buf.relation_matrix(t.rel, d) += weight * (eh.transpose() * et);
}

}  // namespace

void accumulate_pair_gradient(const EmbeddingStore& emb, const Triple& pos,
                              const Triple& neg, double margin, GradientBuffer& buf) {
  const double violation = margin + score(emb, neg) - score(emb, pos);
  if (violation <= 0.0) {
    return;
  }
  add_score_gradient(emb, neg, +1.0, buf);
  add_score_gradient(emb, pos, -1.0, buf);
}

GradientBuffer grad_pair(const EmbeddingStore& emb, const Triple& pos, const Triple& neg,
                         double margin) {
  GradientBuffer buf;
  accumulate_pair_gradient(emb, pos, neg, margin, buf);
  return buf;
}

}  // namespace kbc
