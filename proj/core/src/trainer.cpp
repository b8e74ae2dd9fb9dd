#include "kbc/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>
#include <utility>

#include "kbc/errors.hpp"
#include "kbc/eval.hpp"
#include "kbc/rng.hpp"

namespace kbc {
namespace {

// TransE pairs are cheap enough to take one at a time.
BatchStats accumulate_transe(const EmbeddingStore& emb, std::span<const Triple> batch,
                             const NegativeBatch& negatives, double margin, GradientBuffer& buf) {
  BatchStats stats;
  for (const NegativeBatch::Entry& entry : negatives.entries) {
    const Triple& pos = batch[entry.positive_index];
    const double f_pos = score(emb, pos);
    stats.negative_count += entry.negatives.size();
    for (const Triple& neg : entry.negatives) {
      const double loss = hinge(f_pos, score(emb, neg), margin);
      ++stats.pair_count;
      if (loss <= 0.0) {
        continue;
      }
      stats.loss_sum += loss;
      ++stats.active_pairs;
      accumulate_pair_gradient(emb, pos, neg, margin, buf);
    }
  }
  return stats;
}

// The relation-matrix gradient of one positive and its active corruptions
// collapses into two rank-1 terms: with T the active tail replacements and H
// the active head replacements,
//   dW += e_h^T (sum_T e_t' - k e_t) + (sum_H e_h')^T e_t,  k = |T| + |H|.
// Entity-row terms group the same way; only the replacement rows need a
// per-corruption update.
BatchStats accumulate_rescal(const EmbeddingStore& emb, std::span<const Triple> batch,
                             const NegativeBatch& negatives, double margin, GradientBuffer& buf) {
  const std::size_t d = emb.dim();
  BatchStats stats;
  Eigen::RowVectorXd sum_tail(d);
  Eigen::RowVectorXd sum_head(d);
  for (const NegativeBatch::Entry& entry : negatives.entries) {
    const Triple& pos = batch[entry.positive_index];
    stats.negative_count += entry.negatives.size();
    if (entry.negatives.empty()) {
      continue;
    }
    const auto w = emb.relation_matrix(pos.rel);
    const auto e_h = emb.entity(pos.head);
    const auto e_t = emb.entity(pos.tail);
    const Eigen::RowVectorXd u = e_h * w;              // df/de_t' and tail-side scorer
    const Eigen::RowVectorXd v = e_t * w.transpose();  // df/de_h' and head-side scorer
    const double f_pos = u.dot(e_t);

    sum_tail.setZero();
    sum_head.setZero();
    std::size_t k_tail = 0;
    std::size_t k_head = 0;
    for (const Triple& neg : entry.negatives) {
      const bool tail_corrupted = neg.head == pos.head;
      const EntityId replacement = tail_corrupted ? neg.tail : neg.head;
      const auto e_rep = emb.entity(replacement);
      const double f_neg = tail_corrupted ? u.dot(e_rep) : v.dot(e_rep);
      const double loss = hinge(f_pos, f_neg, margin);
      ++stats.pair_count;
      if (loss <= 0.0) {
        continue;
      }
      stats.loss_sum += loss;
      ++stats.active_pairs;
      if (tail_corrupted) {
        buf.entity(replacement, d) += u;
        sum_tail += e_rep;
        ++k_tail;
      } else {
        buf.entity(replacement, d) += v;
        sum_head += e_rep;
        ++k_head;
      }
    }
    const double k = static_cast<double>(k_tail + k_head);
    if (k == 0.0) {
      continue;
    }
    buf.entity(pos.head, d) += sum_tail * w.transpose() - k * v;
    buf.entity(pos.tail, d) += sum_head * w - k * u;
    RowMatrixXd& dw = buf.relation_matrix(pos.rel, d);
    dw.noalias() += e_h.transpose() * (sum_tail - k * e_t);
    if (k_head > 0) {
      dw.noalias() += sum_head.transpose() * e_t;
    }
  }
  return stats;
}

}  // namespace

void TrainConfig::validate() const {
  if (margin <= 0.0) {
    throw DataError("train: margin must be > 0");
  }
  if (dim == 0) {
    throw DataError("train: dim must be >= 1");
  }
  if (batch_size == 0) {
    throw DataError("train: batch size must be >= 1");
  }
  if (max_epochs == 0) {
    throw DataError("train: max epochs must be >= 1");
  }
  if (patience == 0) {
    throw DataError("train: patience must be >= 1");
  }
  if (eval_every == 0) {
    throw DataError("train: eval interval must be >= 1");
  }
  if (adam.lr <= 0.0) {
    throw DataError("train: learning rate must be > 0");
  }
  sampler.validate();
}

std::string EpochReport::to_json() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["mean_loss"] = mean_loss;
  j["active_fraction"] = active_fraction;
  j["mean_negatives"] = mean_negatives;
  j["rns_fallbacks"] = rns_fallbacks;
  j["wall_seconds"] = wall_seconds;
  if (validation_mrr) {
    j["validation_mrr"] = *validation_mrr;
  }
  if (validation_hits10) {
    j["validation_hits10"] = *validation_hits10;
  }
  return j.dump();
}

double hinge(double pos_score, double neg_score, double margin) {
  return std::max(0.0, margin + neg_score - pos_score);
}

BatchStats accumulate_batch(const EmbeddingStore& emb, std::span<const Triple> batch,
                            const NegativeBatch& negatives, double margin, GradientBuffer& buf) {
  return emb.kind() == ModelKind::TransE
             ? accumulate_transe(emb, batch, negatives, margin, buf)
             : accumulate_rescal(emb, batch, negatives, margin, buf);
}

BatchStats train_batch(EmbeddingStore& emb, AdamOptimizer& adam, std::span<const Triple> batch,
                       const NegativeBatch& negatives, double margin) {
  GradientBuffer buf;
  BatchStats stats = accumulate_batch(emb, batch, negatives, margin, buf);
  if (buf.empty()) {
    return stats;
  }
  std::vector<double> entity_grad(emb.entity_data().size(), 0.0);
  std::vector<double> relation_grad(emb.relation_data().size(), 0.0);
  buf.scatter(emb, entity_grad, relation_grad);
  adam.step(emb, entity_grad, relation_grad);
  if (emb.kind() == ModelKind::TransE) {
    for (const auto& [e, unused] : buf.entities()) {
      auto row = emb.entity(e);
      const double norm = row.norm();
      if (norm > 0.0) {
        row /= norm;
      }
    }
  }
  return stats;
}

FitResult fit(const TripleStore& train, const TripleStore& valid, std::size_t num_entities,
              std::size_t num_relations, const TrainConfig& cfg, ValidationFn validation,
              EpochCallback on_epoch) {
  cfg.validate();
  if (train.size() == 0) {
    throw DataError("train: empty training split");
  }
  for (const Triple& t : valid.triples()) {
    if (train.contains(t)) {
      throw DataError("train: validation split overlaps the training split");
    }
  }

  const BernoulliStats stats = compute_bernoulli_stats(train);
  EmbeddingStore emb = init_embeddings(cfg.model, num_entities, num_relations, cfg.dim,
                                       derive_seed(cfg.seed, seed_stream::kInit, 0),
                                       cfg.transe_norm);
  AdamOptimizer adam(emb, cfg.adam);

  FilterSet validation_filter;
  if (!validation) {
    validation_filter = make_filter({&train, &valid});
    validation = [&valid, &validation_filter](const EmbeddingStore& current) {
      const RankingReport report = evaluate(current, valid, validation_filter);
      return ValidationScore{report.mrr, report.hits10};
    };
  }

  FitResult result{emb, {}, std::nullopt, 0, false};
  std::size_t stale_evaluations = 0;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Triple> batch;
  batch.reserve(cfg.batch_size);

  const bool dns = cfg.sampler.kind == SamplerConfig::Kind::Dns;
  const bool approximate =
      dns && cfg.sampler.dns_candidates == SamplerConfig::Candidates::Approximate;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    Rng shuffle_rng = make_rng(cfg.seed, seed_stream::kShuffle, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    // The similarity index tracks the embeddings of the previous epochs; one
    // rebuild per pass keeps index drift bounded.
    std::optional<SimilarityIndex> index;
    if (approximate) {
      index = SimilarityIndex::build(emb, cfg.sampler.lsh,
                                     derive_seed(cfg.seed, seed_stream::kLsh, epoch));
    }

    BatchStats epoch_stats;
    std::size_t fallbacks = 0;
    std::size_t positives = 0;
    const std::uint64_t epoch_seed = derive_seed(cfg.seed, seed_stream::kSampler, epoch);
    for (std::size_t begin = 0, batch_index = 0; begin < order.size();
         begin += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(begin + cfg.batch_size, order.size());
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) {
        batch.push_back(train.triples()[order[i]]);
      }
      positives += batch.size();
      const std::uint64_t seed_base =
          derive_seed(epoch_seed, seed_stream::kSampler, batch_index);
      NegativeBatch negs =
          dns ? sample_dns(batch, train, emb, stats, cfg.sampler, seed_base,
                           approximate ? &*index : nullptr)
              : sample_rns(batch, cfg.sampler.rns_negatives, stats, num_entities, seed_base);
      fallbacks += negs.rns_fallbacks;
      epoch_stats.merge(train_batch(emb, adam, batch, negs, cfg.margin));
    }

    EpochReport report;
    report.epoch = epoch;
    report.mean_loss =
        epoch_stats.pair_count == 0
            ? 0.0
            : epoch_stats.loss_sum / static_cast<double>(epoch_stats.pair_count);
    report.active_fraction =
        epoch_stats.pair_count == 0
            ? 0.0
            : static_cast<double>(epoch_stats.active_pairs) /
                  static_cast<double>(epoch_stats.pair_count);
    report.mean_negatives = positives == 0 ? 0.0
                                           : static_cast<double>(epoch_stats.negative_count) /
                                                 static_cast<double>(positives);
    report.rns_fallbacks = fallbacks;

    bool improved = false;
    bool stop = false;
    if (epoch % cfg.eval_every == 0) {
      const ValidationScore scored = validation(emb);
      const double mrr = scored.mrr;
      report.validation_mrr = mrr;
      report.validation_hits10 = scored.hits10;
      if (!result.best_mrr || mrr > *result.best_mrr) {
        result.best_mrr = mrr;
        result.best_epoch = epoch;
        result.embeddings = emb;
        stale_evaluations = 0;
        improved = true;
      } else if (++stale_evaluations >= cfg.patience) {
        result.early_stopped = true;
        stop = true;
      }
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    result.reports.push_back(report);
    if (on_epoch) {
      on_epoch(report, improved ? result.embeddings : emb, improved);
    }
    if (stop) {
      break;
    }
  }

  if (!result.best_mrr) {
    result.embeddings = emb;
  }
  return result;
}

}  // namespace kbc
