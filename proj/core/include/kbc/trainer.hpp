#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kbc/adam.hpp"
#include "kbc/embedding.hpp"
#include "kbc/model.hpp"
#include "kbc/sampler.hpp"
#include "kbc/triple_store.hpp"

namespace kbc {

struct TrainConfig {
  ModelKind model = ModelKind::TransE;
  TranseNorm transe_norm = TranseNorm::L1;
  std::size_t dim = 100;
  double margin = 10.0;
  std::size_t batch_size = 512;
  std::size_t max_epochs = 1000;
  std::size_t patience = 20;   // evaluations without improvement before stopping
  std::size_t eval_every = 1;  // epochs between validation evaluations
  AdamConfig adam;
  SamplerConfig sampler;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochReport {
  std::size_t epoch = 0;        // 1-based
  double mean_loss = 0.0;       // mean hinge per (positive, negative) pair
  double active_fraction = 0.0; // fraction of pairs with positive hinge
  double mean_negatives = 0.0;  // mean |N| per positive
  std::size_t rns_fallbacks = 0;
  double wall_seconds = 0.0;
  std::optional<double> validation_mrr;
  std::optional<double> validation_hits10;

  // Single-line JSON object; key order is fixed.
  std::string to_json() const;
};

double hinge(double pos_score, double neg_score, double margin);

struct BatchStats {
  double loss_sum = 0.0;  // summed hinge over all pairs
  std::size_t pair_count = 0;
  std::size_t active_pairs = 0;
  std::size_t negative_count = 0;

  void merge(const BatchStats& other) {
    loss_sum += other.loss_sum;
    pair_count += other.pair_count;
    active_pairs += other.active_pairs;
    negative_count += other.negative_count;
  }
};

// Accumulates the loss gradient of every (positive, own-negative) pair into
// `buf` without touching parameters. The RESCAL path groups per-positive
// relation-matrix contributions into two rank-1 updates; the result is
// identical to pair-by-pair accumulation.
BatchStats accumulate_batch(const EmbeddingStore& emb, std::span<const Triple> batch,
                            const NegativeBatch& negatives, double margin, GradientBuffer& buf);

// One optimizer step over a batch: accumulate, apply one Adam update per
// parameter tensor, then (TransE) renormalize the touched entity rows.
// Batches with no active pair leave parameters and the Adam timestep alone.
BatchStats train_batch(EmbeddingStore& emb, AdamOptimizer& adam, std::span<const Triple> batch,
                       const NegativeBatch& negatives, double margin);

struct ValidationScore {
  double mrr = 0.0;
  double hits10 = 0.0;
};

// Computes validation metrics for early stopping; injectable for tests. The
// default runs the filtered ranking protocol over the validation split.
// Improvement is judged on mrr alone.
using ValidationFn = std::function<ValidationScore(const EmbeddingStore&)>;

// Observes each finished epoch; `improved` marks a new best validation MRR,
// at which point `emb` is the best parameter state seen so far.
using EpochCallback =
    std::function<void(const EpochReport& report, const EmbeddingStore& emb, bool improved)>;

struct FitResult {
  EmbeddingStore embeddings;  // best validation MRR, or final state if never evaluated
  std::vector<EpochReport> reports;
  std::optional<double> best_mrr;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

// Full training loop: seeded per-epoch shuffle, negative sampling per batch,
// validation every eval_every epochs, early stop after `patience` evaluations
// without improvement, best checkpoint retained.
FitResult fit(const TripleStore& train, const TripleStore& valid, std::size_t num_entities,
              std::size_t num_relations, const TrainConfig& cfg, ValidationFn validation = {},
              EpochCallback on_epoch = {});

}  // namespace kbc
