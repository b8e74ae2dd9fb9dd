#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <unordered_set>
#include <vector>

#include "kbc/embedding.hpp"
#include "kbc/triple_store.hpp"
#include "kbc/types.hpp"

namespace kbc {

// Known-true triples across every split; candidate corruptions found here are
// discarded during ranking (except the query target itself).
using FilterSet = std::unordered_set<Triple, TripleHash>;

FilterSet make_filter(std::initializer_list<const TripleStore*> stores);

struct QueryRank {
  Triple triple;
  Side side = Side::Head;
  std::size_t filtered_rank = 0;
  std::size_t raw_rank = 0;
};

struct RankingReport {
  std::vector<QueryRank> queries;
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits10 = 0.0;

  std::size_t query_count() const { return queries.size(); }

  // Rebuilds the aggregates from the stored per-query filtered ranks, in
  // query order.
  void recompute();
};

// Rank of the true entity among all replacements of `side`, discarding
// candidates whose triple appears in `filter` (the target always competes).
// Ties split at the midpoint: 1 + #strictly-greater + floor(#ties / 2).
std::size_t filtered_rank(const EmbeddingStore& emb, const Triple& t, Side side,
                          const FilterSet& filter);

// Both-sides protocol: one head and one tail query per test triple, raw and
// filtered ranks for each. Read-only on `emb`.
RankingReport evaluate(const EmbeddingStore& emb, const TripleStore& test,
                       const FilterSet& filter);

// Key-value metric lines, ranking values as percentages with one decimal.
std::string format_metrics(const RankingReport& report);
void write_metrics(const std::string& path, const RankingReport& report);

// One row per query: head name, relation name, tail name, side, filtered
// rank, raw rank.
void write_ranks(const std::string& path, const RankingReport& report, const Vocabulary& vocab);

}  // namespace kbc
