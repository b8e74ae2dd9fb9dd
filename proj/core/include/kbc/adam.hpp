#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kbc/embedding.hpp"

namespace kbc {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam step on a flat parameter tensor:
//   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2,
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
// with m_hat = m/(1-b1^t), v_hat = v/(1-b2^t). `timestep` counts this update
// (first call passes 1). Throws NumericError on a non-finite gradient entry.
void adam_update(std::span<double> params, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::uint64_t timestep, const AdamConfig& cfg);

// Moment state for the two parameter tensors of an EmbeddingStore, advancing
// a shared timestep once per step() call.
class AdamOptimizer {
 public:
  AdamOptimizer(const EmbeddingStore& layout, AdamConfig cfg = {});

  // Applies one update to each tensor using dense accumulated gradients laid
  // out exactly like the store's flat data.
  void step(EmbeddingStore& emb, std::span<const double> entity_grad,
            std::span<const double> relation_grad);

  std::uint64_t timestep() const { return timestep_; }
  const AdamConfig& config() const { return cfg_; }

  std::span<const double> entity_v() const { return entity_v_; }
  std::span<const double> relation_v() const { return relation_v_; }

 private:
  AdamConfig cfg_;
  std::uint64_t timestep_ = 0;
  std::vector<double> entity_m_;
  std::vector<double> entity_v_;
  std::vector<double> relation_m_;
  std::vector<double> relation_v_;
};

}  // namespace kbc
