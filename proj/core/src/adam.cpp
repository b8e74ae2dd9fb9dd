#include "kbc/adam.hpp"

#include <cmath>
#include <string>

#include "kbc/errors.hpp"

namespace kbc {

void adam_update(std::span<double> params, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::uint64_t timestep, const AdamConfig& cfg) {
  if (params.size() != grad.size() || params.size() != m.size() || params.size() != v.size()) {
    throw DataError("adam: tensor shapes disagree");
  }
  if (timestep == 0) {
    throw DataError("adam: timestep starts at 1");
  }
  const double m_corr = 1.0 - std::pow(cfg.beta1, static_cast<double>(timestep));
  const double v_corr = 1.0 - std::pow(cfg.beta2, static_cast<double>(timestep));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    if (!std::isfinite(g)) {
      throw NumericError("adam: non-finite gradient at flat index " + std::to_string(i));
    }
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m[i] / m_corr;
    const double v_hat = v[i] / v_corr;
    params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

AdamOptimizer::AdamOptimizer(const EmbeddingStore& layout, AdamConfig cfg)
    : cfg_(cfg),
      entity_m_(layout.entity_data().size(), 0.0),
      entity_v_(layout.entity_data().size(), 0.0),
      relation_m_(layout.relation_data().size(), 0.0),
      relation_v_(layout.relation_data().size(), 0.0) {}

void AdamOptimizer::step(EmbeddingStore& emb, std::span<const double> entity_grad,
                         std::span<const double> relation_grad) {
  ++timestep_;
  adam_update(emb.entity_data(), entity_grad, entity_m_, entity_v_, timestep_, cfg_);
  adam_update(emb.relation_data(), relation_grad, relation_m_, relation_v_, timestep_, cfg_);
}

}  // namespace kbc
