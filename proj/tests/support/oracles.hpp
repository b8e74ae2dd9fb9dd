#pragma once

// Shared test machinery. Everything here recomputes expected values through a
// second, deliberately naive code path (central differences, sort-based
// ranking, scalar recurrences) so the library is never checked against
// itself.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "kbc/embedding.hpp"
#include "kbc/eval.hpp"
#include "kbc/model.hpp"
#include "kbc/rng.hpp"
#include "kbc/trainer.hpp"
#include "kbc/triple_store.hpp"
#include "kbc/types.hpp"

namespace kbc::testutil {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Scratch directories

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "kbc-test-%u-%08x", counter++, rd());
    path_ = fs::temp_directory_path() / buf;
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Statistics

inline double binomial_sigma(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// 3-sigma band around p, padded by one count so p = 0 and p = 1 keep a
// nonzero acceptance region.
inline bool within_3_sigma(double observed_freq, double p, std::size_t n) {
  return std::abs(observed_freq - p) <=
         3.0 * binomial_sigma(p, n) + 1.0 / static_cast<double>(n);
}

inline double harmonic(std::size_t m) {
  double h = 0.0;
  for (std::size_t i = 1; i <= m; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

// ---------------------------------------------------------------------------
// Random embedding fillers

// Continuous uniform entries in [-1, 1].
inline void fill_uniform(EmbeddingStore& emb, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& x : emb.entity_data()) x = u(rng);
  for (double& x : emb.relation_data()) x = u(rng);
}

// Entries on the grid {-1, -0.75, ..., 0.75, 1}. Products and sums of such
// values at small d are exactly representable, so every scoring path
// (per-triple loops, batched matrix products) lands on the identical double
// and ties are genuine ties. Also produces duplicate rows with fair
// probability, which is exactly what rank tie-breaking tests want.
inline void fill_grid(EmbeddingStore& emb, Rng& rng) {
  std::uniform_int_distribution<int> g(-4, 4);
  for (double& x : emb.entity_data()) x = g(rng) * 0.25;
  for (double& x : emb.relation_data()) x = g(rng) * 0.25;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient oracle

struct FdOptions {
  double step = 1e-6;
  double rel_tol = 1e-4;
  // L1 residual coordinates this close to zero sit on a subgradient kink and
  // are excluded from the comparison.
  double kink_guard = 1e-4;
  // Pairs this close to the hinge boundary are skipped entirely so the
  // perturbation cannot flip the pair active/inactive.
  double activity_guard = 0.05;
  // 0 checks every coordinate of every touched row; otherwise `k` coordinates
  // per row are sampled without replacement.
  std::size_t max_coords_per_row = 0;
};

struct FdCheck {
  std::size_t checked = 0;
  std::size_t passed = 0;
  std::size_t pairs = 0;
  double worst_rel = 0.0;

  double pass_rate() const {
    return checked == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(checked);
  }
};

namespace detail {

inline double pair_loss(const EmbeddingStore& emb, const Triple& pos, const Triple& neg,
                        double margin) {
  return hinge(score(emb, pos), score(emb, neg), margin);
}

inline double analytic_entity(const GradientBuffer& buf, EntityId e, std::size_t k) {
  auto it = buf.entities().find(e);
  return it == buf.entities().end() ? 0.0 : it->second(static_cast<Eigen::Index>(k));
}

inline double analytic_relation(const GradientBuffer& buf, const EmbeddingStore& emb,
                                RelationId r, std::size_t k) {
  if (emb.kind() == ModelKind::TransE) {
    auto it = buf.relation_vectors().find(r);
    return it == buf.relation_vectors().end() ? 0.0
                                              : it->second(static_cast<Eigen::Index>(k));
  }
  auto it = buf.relation_matrices().find(r);
  if (it == buf.relation_matrices().end()) return 0.0;
  return it->second(static_cast<Eigen::Index>(k / emb.dim()),
                    static_cast<Eigen::Index>(k % emb.dim()));
}

inline std::vector<std::size_t> coordinate_sample(std::size_t count, std::size_t cap,
                                                  Rng& rng) {
  std::vector<std::size_t> all(count);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (cap == 0 || cap >= count) return all;
  std::vector<std::size_t> picked;
  std::sample(all.begin(), all.end(), std::back_inserter(picked), cap, rng);
  return picked;
}

}  // namespace detail

// Central-difference check of grad_pair on one hinge pair. Returns false when
// the pair was skipped (inactive, or too close to the activity boundary).
// Touched rows: both entity rows of each triple plus the shared relation.
inline bool fd_check_pair(const EmbeddingStore& emb, const Triple& pos, const Triple& neg,
                          double margin, const FdOptions& opt, Rng& rng, FdCheck& acc) {
  const double z = margin + score(emb, neg) - score(emb, pos);
  if (z < opt.activity_guard) return false;

  const GradientBuffer buf = grad_pair(emb, pos, neg, margin);
  EmbeddingStore work = emb;
  const std::size_t d = emb.dim();
  const bool l1 = emb.kind() == ModelKind::TransE && emb.transe_norm() == TranseNorm::L1;

  Eigen::RowVectorXd r_pos, r_neg;
  if (l1) {
    r_pos = emb.entity(pos.head) + emb.relation_vector(pos.rel) - emb.entity(pos.tail);
    r_neg = emb.entity(neg.head) + emb.relation_vector(neg.rel) - emb.entity(neg.tail);
  }

  struct Row {
    bool is_entity;
    std::uint32_t id;
    bool in_pos;  // participates in the positive residual
    bool in_neg;
  };
  std::vector<Row> rows;
  auto add_entity = [&](EntityId e, bool in_pos, bool in_neg) {
    for (Row& r : rows) {
      if (r.is_entity && r.id == e) {
        r.in_pos = r.in_pos || in_pos;
        r.in_neg = r.in_neg || in_neg;
        return;
      }
    }
    rows.push_back({true, e, in_pos, in_neg});
  };
  add_entity(pos.head, true, false);
  add_entity(pos.tail, true, false);
  add_entity(neg.head, false, true);
  add_entity(neg.tail, false, true);
  rows.push_back({false, pos.rel, true, true});

  acc.pairs++;
  for (const Row& row : rows) {
    const std::size_t count = row.is_entity ? d : emb.relation_param_count();
    for (std::size_t k : detail::coordinate_sample(count, opt.max_coords_per_row, rng)) {
      if (l1 && k < d) {
        // Perturbing coordinate k of a participating row moves residual
        // coordinate k; skip coordinates sitting on the |.| kink.
        if (row.in_pos && std::abs(r_pos(static_cast<Eigen::Index>(k))) <= opt.kink_guard)
          continue;
        if (row.in_neg && std::abs(r_neg(static_cast<Eigen::Index>(k))) <= opt.kink_guard)
          continue;
      }
      double* coord = row.is_entity
                          ? &work.entity_data()[std::size_t(row.id) * d + k]
                          : &work.relation_data()[std::size_t(row.id) * emb.relation_param_count() + k];
      const double saved = *coord;
      *coord = saved + opt.step;
      const double up = detail::pair_loss(work, pos, neg, margin);
      *coord = saved - opt.step;
      const double down = detail::pair_loss(work, pos, neg, margin);
      *coord = saved;

      const double fd = (up - down) / (2.0 * opt.step);
      const double an = row.is_entity ? detail::analytic_entity(buf, row.id, k)
                                      : detail::analytic_relation(buf, emb, row.id, k);
      const double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1.0});
      acc.checked++;
      if (rel <= opt.rel_tol) acc.passed++;
      acc.worst_rel = std::max(acc.worst_rel, rel);
    }
  }
  return true;
}

// Runs fd_check_pair over randomly drawn active pairs until `pairs` of them
// have been accepted.
inline FdCheck fd_check_model(ModelKind kind, TranseNorm norm, std::size_t num_entities,
                              std::size_t num_relations, std::size_t dim, double margin,
                              std::size_t pairs, std::uint64_t seed,
                              FdOptions opt = {}) {
  Rng rng(seed);
  EmbeddingStore emb(kind, num_entities, num_relations, dim, norm);
  fill_uniform(emb, rng);

  std::uniform_int_distribution<EntityId> pick_e(0, static_cast<EntityId>(num_entities - 1));
  std::uniform_int_distribution<RelationId> pick_r(0,
                                                   static_cast<RelationId>(num_relations - 1));
  FdCheck acc;
  std::size_t guard = 0;
  while (acc.pairs < pairs && guard++ < pairs * 200) {
    Triple pos{pick_e(rng), pick_r(rng), pick_e(rng)};
    Side side = (rng() & 1) ? Side::Head : Side::Tail;
    Triple neg = corrupt(pos, side, pick_e(rng));
    if (neg == pos) continue;
    fd_check_pair(emb, pos, neg, margin, opt, rng, acc);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Brute-force ranking oracle (sort based, one score per corruption)

struct OracleRank {
  std::size_t filtered = 0;
  std::size_t raw = 0;
};

namespace detail {

inline std::size_t midtie_rank_from_sorted(std::vector<double>& scores, double target) {
  std::sort(scores.begin(), scores.end(), std::greater<>());
  auto lo = std::lower_bound(scores.begin(), scores.end(), target, std::greater<>());
  auto hi = std::upper_bound(scores.begin(), scores.end(), target, std::greater<>());
  const std::size_t greater = static_cast<std::size_t>(lo - scores.begin());
  const std::size_t ties = static_cast<std::size_t>(hi - lo);  // includes the target
  return 1 + greater + (ties - 1) / 2;
}

}  // namespace detail

inline OracleRank brute_force_rank(const EmbeddingStore& emb, const Triple& t, Side side,
                                   const FilterSet& filter) {
  const double target = score(emb, t);
  std::vector<double> raw_scores, filtered_scores;
  raw_scores.reserve(emb.num_entities());
  for (EntityId e = 0; e < emb.num_entities(); ++e) {
    const Triple cand = corrupt(t, side, e);
    const double s = score(emb, cand);
    raw_scores.push_back(s);
    if (cand == t || !filter.contains(cand)) filtered_scores.push_back(s);
  }
  OracleRank out;
  out.raw = detail::midtie_rank_from_sorted(raw_scores, target);
  out.filtered = detail::midtie_rank_from_sorted(filtered_scores, target);
  return out;
}

// ---------------------------------------------------------------------------
// Random and planted knowledge graphs

struct RandomKg {
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  TripleStore test{Split::Test};
  FilterSet filter;
  EmbeddingStore emb{ModelKind::TransE, 1, 1, 2};
};

// A small KG with random triples split between the filter and the test set.
// Grid-valued embeddings keep every scoring path bit-identical and make ties
// common; `continuous` switches to uniform entries instead.
inline RandomKg make_random_kg(std::uint64_t seed, bool continuous = false) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_n(3, 20);
  std::uniform_int_distribution<std::size_t> pick_nr(1, 4);
  std::uniform_int_distribution<std::size_t> pick_d(2, 6);

  RandomKg kg;
  kg.num_entities = pick_n(rng);
  kg.num_relations = pick_nr(rng);
  const std::size_t dim = pick_d(rng);
  const ModelKind kind = (rng() & 1) ? ModelKind::Rescal : ModelKind::TransE;
  const TranseNorm norm = (rng() & 1) ? TranseNorm::L1 : TranseNorm::L2;

  kg.emb = EmbeddingStore(kind, kg.num_entities, kg.num_relations, dim, norm);
  if (continuous) {
    fill_uniform(kg.emb, rng);
  } else {
    fill_grid(kg.emb, rng);
    // Duplicate a few entity rows outright so whole score columns collide.
    std::uniform_int_distribution<EntityId> pick_e(0,
                                                   static_cast<EntityId>(kg.num_entities - 1));
    for (int i = 0; i < 3; ++i) {
      kg.emb.entity(pick_e(rng)) = kg.emb.entity(pick_e(rng));
    }
  }

  std::uniform_int_distribution<EntityId> pick_e(0, static_cast<EntityId>(kg.num_entities - 1));
  std::uniform_int_distribution<RelationId> pick_r(0,
                                                   static_cast<RelationId>(kg.num_relations - 1));
  std::set<std::tuple<EntityId, RelationId, EntityId>> seen;
  std::vector<Triple> test, extra;
  const std::size_t total = 10 + rng() % 50;
  for (std::size_t i = 0; i < total; ++i) {
    Triple t{pick_e(rng), pick_r(rng), pick_e(rng)};
    if (!seen.insert({t.head, t.rel, t.tail}).second) continue;
    if (rng() % 3 == 0 && !test.empty()) {
      extra.push_back(t);
    } else {
      test.push_back(t);
    }
  }
  if (test.empty()) test.push_back(Triple{0, 0, std::min<EntityId>(1, static_cast<EntityId>(kg.num_entities - 1))});
  kg.test = TripleStore(Split::Test, test);
  kg.filter = make_filter({&kg.test});
  for (const Triple& t : extra) kg.filter.insert(t);
  return kg;
}

// Block-structured KB: entities fall into `blocks` clusters and relation r
// only links block (r mod blocks) to block (r+1 mod blocks). Cluster members
// are interchangeable, so corruptions within the source or target block are
// the hard negatives.
struct PlantedKb {
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  std::vector<int> block;  // entity id -> block id
  TripleStore train{Split::Train};
  TripleStore valid{Split::Valid};
  TripleStore test{Split::Test};
};

inline PlantedKb make_planted_kb(std::size_t entities, std::size_t blocks,
                                 std::size_t relations, std::size_t triples,
                                 std::uint64_t seed, double valid_frac = 0.1,
                                 double test_frac = 0.1) {
  PlantedKb kb;
  kb.num_entities = entities;
  kb.num_relations = relations;
  kb.block.resize(entities);
  std::vector<std::vector<EntityId>> members(blocks);
  for (std::size_t e = 0; e < entities; ++e) {
    const int b = static_cast<int>(e * blocks / entities);
    kb.block[e] = b;
    members[static_cast<std::size_t>(b)].push_back(static_cast<EntityId>(e));
  }

  Rng rng(seed);
  std::uniform_int_distribution<RelationId> pick_r(0, static_cast<RelationId>(relations - 1));
  std::set<std::tuple<EntityId, RelationId, EntityId>> seen;
  std::vector<Triple> all;
  std::size_t attempts = 0;
  while (all.size() < triples && attempts++ < triples * 100) {
    const RelationId r = pick_r(rng);
    const auto& src = members[r % blocks];
    const auto& dst = members[(r + 1) % blocks];
    const EntityId h = src[rng() % src.size()];
    const EntityId t = dst[rng() % dst.size()];
    if (!seen.insert({h, r, t}).second) continue;
    all.push_back(Triple{h, r, t});
  }
  std::shuffle(all.begin(), all.end(), rng);

  const std::size_t n_test = static_cast<std::size_t>(static_cast<double>(all.size()) * test_frac);
  const std::size_t n_valid = static_cast<std::size_t>(static_cast<double>(all.size()) * valid_frac);
  std::vector<Triple> test(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<Triple> valid(all.begin() + static_cast<std::ptrdiff_t>(n_test),
                            all.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid));
  std::vector<Triple> train(all.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid), all.end());
  kb.train = TripleStore(Split::Train, std::move(train));
  kb.valid = TripleStore(Split::Valid, std::move(valid));
  kb.test = TripleStore(Split::Test, std::move(test));
  return kb;
}

// Ring-structured KB: entities sit on a cycle and relation r links every
// entity i to i+a_r and i+b_r (mod n) for small fixed offsets. All n*2
// triples per relation exist, split at random. Unlike the block KB, every
// entity is individually identifiable, so ranking quality is not ceiling-
// limited, and the competitive negatives for a query are the ring neighbors
// of the answer.
struct RingKb {
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  TripleStore train{Split::Train};
  TripleStore valid{Split::Valid};
  TripleStore test{Split::Test};
};

inline RingKb make_ring_kb(std::size_t entities, std::uint64_t seed,
                           double valid_frac = 0.1, double test_frac = 0.1) {
  constexpr std::pair<unsigned, unsigned> kOffsets[5] = {
      {1, 7}, {2, 11}, {3, 13}, {5, 17}, {8, 19}};
  RingKb kb;
  kb.num_entities = entities;
  kb.num_relations = 5;
  const auto n = static_cast<EntityId>(entities);
  std::vector<Triple> all;
  all.reserve(entities * 10);
  for (RelationId r = 0; r < 5; ++r) {
    for (EntityId h = 0; h < n; ++h) {
      all.push_back(Triple{h, r, static_cast<EntityId>((h + kOffsets[r].first) % n)});
      all.push_back(Triple{h, r, static_cast<EntityId>((h + kOffsets[r].second) % n)});
    }
  }
  Rng rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t n_test =
      static_cast<std::size_t>(static_cast<double>(all.size()) * test_frac);
  const std::size_t n_valid =
      static_cast<std::size_t>(static_cast<double>(all.size()) * valid_frac);
  std::vector<Triple> test(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<Triple> valid(all.begin() + static_cast<std::ptrdiff_t>(n_test),
                            all.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid));
  std::vector<Triple> train(all.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid),
                            all.end());
  kb.train = TripleStore(Split::Train, std::move(train));
  kb.valid = TripleStore(Split::Valid, std::move(valid));
  kb.test = TripleStore(Split::Test, std::move(test));
  return kb;
}

// Writes a split as head<TAB>rel<TAB>tail lines under synthetic names
// e<id> / r<id>.
inline void write_split_tsv(const fs::path& p, const TripleStore& store) {
  std::ofstream out(p, std::ios::binary);
  for (const Triple& t : store.triples()) {
    out << "e" << t.head << "\t" << "r" << t.rel << "\t" << "e" << t.tail << "\n";
  }
}

}  // namespace kbc::testutil
