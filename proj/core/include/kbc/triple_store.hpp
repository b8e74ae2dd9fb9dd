#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <unordered_set>
#include <vector>

#include "kbc/types.hpp"
#include "kbc/vocabulary.hpp"

namespace kbc {

enum class Split : std::uint8_t { Train, Valid, Test };

// What to do with names outside a frozen vocabulary when loading valid/test.
enum class UnseenPolicy : std::uint8_t {
  Extend,  // grow the vocabulary (train split)
  Reject,  // raise DataError
  Skip,    // drop the line, keep a count
};

// One dataset split: an ordered, deduplicated triple list plus an O(1)
// membership set. Immutable after construction; any number of concurrent
// readers is safe.
class TripleStore {
 public:
  explicit TripleStore(Split split = Split::Train) : split_(split) {}
  TripleStore(Split split, std::vector<Triple> triples);

  bool contains(const Triple& t) const { return membership_.contains(t); }
  bool contains(EntityId h, RelationId r, EntityId t) const {
    return contains(Triple{h, r, t});
  }

  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  Split split() const { return split_; }

  // Input triples dropped because they repeated an earlier line.
  std::size_t duplicates_dropped() const { return duplicates_dropped_; }
  // Lines skipped under UnseenPolicy::Skip.
  std::size_t unseen_skipped() const { return unseen_skipped_; }

 private:
  friend TripleStore load_split(const std::filesystem::path&, Vocabulary&, Split,
                                UnseenPolicy);

  Split split_;
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> membership_;
  std::size_t duplicates_dropped_ = 0;
  std::size_t unseen_skipped_ = 0;
};

// Parse a `head<TAB>relation<TAB>tail` file into a store, resolving names
// through `vocab`. With UnseenPolicy::Extend the vocabulary grows; otherwise
// it is frozen and unseen names are rejected or skipped per `policy`.
// Malformed lines raise DataError with the file name and line number.
TripleStore load_split(const std::filesystem::path& file, Vocabulary& vocab,
                       Split split, UnseenPolicy policy = UnseenPolicy::Extend);

// Per-relation head/tail corruption statistics in the sense of relation
// cardinality: tph = mean distinct tails per (head, relation), hpt = mean
// distinct heads per (tail, relation), and the head-corruption probability
// p_head = tph / (tph + hpt).
class BernoulliStats {
 public:
  double p_head(RelationId r) const;
  double tails_per_head(RelationId r) const;
  double heads_per_tail(RelationId r) const;
  bool covers(RelationId r) const;
  std::size_t num_relations() const { return tph_.size(); }

  // Hand-built stats for tests and synthetic setups.
  static BernoulliStats from_probabilities(std::span<const double> p_head);

 private:
  friend BernoulliStats compute_bernoulli_stats(const TripleStore&);

  void require(RelationId r) const;

  std::vector<double> tph_;
  std::vector<double> hpt_;
  std::vector<bool> present_;
};

// Requires a nonempty store. Relations absent from the store are excluded;
// querying them later raises DataError.
BernoulliStats compute_bernoulli_stats(const TripleStore& store);

}  // namespace kbc
