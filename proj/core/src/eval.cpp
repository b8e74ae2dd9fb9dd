#include "kbc/eval.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <utility>

#include "kbc/errors.hpp"
#include "kbc/model.hpp"

namespace kbc {
namespace {

struct RankPair {
  std::size_t filtered = 0;
  std::size_t raw = 0;
};

// Mid-tie rank of the target among candidates, with and without the filter.
// The target entity never counts against itself.
template <typename Scores>
RankPair ranks_from_scores(const Scores& scores, const Triple& t, Side side,
                           const FilterSet& filter) {
  const EntityId target = replaced_entity(t, side);
  const double target_score = scores(target);
  std::size_t raw_greater = 0;
  std::size_t raw_ties = 0;
  std::size_t flt_greater = 0;
  std::size_t flt_ties = 0;
  const std::size_t n = static_cast<std::size_t>(scores.size());
  for (std::size_t i = 0; i < n; ++i) {
    const EntityId e = static_cast<EntityId>(i);
    if (e == target) {
      continue;
    }
    const double s = scores(static_cast<Eigen::Index>(i));
    if (s < target_score) {
      continue;
    }
    const bool greater = s > target_score;
    (greater ? raw_greater : raw_ties) += 1;
    if (!filter.contains(corrupt(t, side, e))) {
      (greater ? flt_greater : flt_ties) += 1;
    }
  }
  return {1 + flt_greater + flt_ties / 2, 1 + raw_greater + raw_ties / 2};
}

}  // namespace

FilterSet make_filter(std::initializer_list<const TripleStore*> stores) {
  std::size_t total = 0;
  for (const TripleStore* s : stores) {
    total += s->size();
  }
  FilterSet filter;
  filter.reserve(total);
  for (const TripleStore* s : stores) {
    for (const Triple& t : s->triples()) {
      filter.insert(t);
    }
  }
  return filter;
}

void RankingReport::recompute() {
  double reciprocal_sum = 0.0;
  std::size_t at1 = 0;
  std::size_t at10 = 0;
  for (const QueryRank& q : queries) {
    reciprocal_sum += 1.0 / static_cast<double>(q.filtered_rank);
    at1 += q.filtered_rank <= 1 ? 1 : 0;
    at10 += q.filtered_rank <= 10 ? 1 : 0;
  }
  const double n = queries.empty() ? 1.0 : static_cast<double>(queries.size());
  mrr = reciprocal_sum / n;
  hits1 = static_cast<double>(at1) / n;
  hits10 = static_cast<double>(at10) / n;
}

std::size_t filtered_rank(const EmbeddingStore& emb, const Triple& t, Side side,
                          const FilterSet& filter) {
  const Eigen::VectorXd scores = candidate_scores(emb, t, side);
  return ranks_from_scores(scores, t, side, filter).filtered;
}

RankingReport evaluate(const EmbeddingStore& emb, const TripleStore& test,
                       const FilterSet& filter) {
  if (test.size() == 0) {
    throw DataError("eval: empty test split");
  }
  RankingReport report;
  report.queries.reserve(2 * test.size());
  for (const Triple& t : test.triples()) {
    report.queries.push_back({t, Side::Head, 0, 0});
    report.queries.push_back({t, Side::Tail, 0, 0});
  }

  if (emb.kind() == ModelKind::Rescal) {
    // Queries sharing (relation, side) reduce to one matrix product against
    // the entity table; grouping keeps evaluation a handful of GEMMs.
    std::map<std::pair<RelationId, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < report.queries.size(); ++i) {
      const QueryRank& q = report.queries[i];
      groups[{q.triple.rel, static_cast<int>(q.side)}].push_back(i);
    }
    for (const auto& [key, indices] : groups) {
      const auto w = emb.relation_matrix(key.first);
      const Side side = static_cast<Side>(key.second);
      RowMatrixXd q_rows(static_cast<Eigen::Index>(indices.size()), emb.dim());
      for (std::size_t g = 0; g < indices.size(); ++g) {
        const Triple& t = report.queries[indices[g]].triple;
        if (side == Side::Head) {
          q_rows.row(static_cast<Eigen::Index>(g)) = emb.entity(t.tail) * w.transpose();
        } else {
          q_rows.row(static_cast<Eigen::Index>(g)) = emb.entity(t.head) * w;
        }
      }
      const RowMatrixXd scores = q_rows * emb.entity_matrix().transpose();
      for (std::size_t g = 0; g < indices.size(); ++g) {
        QueryRank& q = report.queries[indices[g]];
        const RankPair r =
            ranks_from_scores(scores.row(static_cast<Eigen::Index>(g)), q.triple, q.side, filter);
        q.filtered_rank = r.filtered;
        q.raw_rank = r.raw;
      }
    }
  } else {
    for (QueryRank& q : report.queries) {
      const Eigen::VectorXd scores = candidate_scores(emb, q.triple, q.side);
      const RankPair r = ranks_from_scores(scores, q.triple, q.side, filter);
      q.filtered_rank = r.filtered;
      q.raw_rank = r.raw;
    }
  }
  report.recompute();
  return report;
}

std::string format_metrics(const RankingReport& report) {
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof(buf), "MRR\t%.1f\n", report.mrr * 100.0);
  out += buf;
  std::snprintf(buf, sizeof(buf), "Hits@1\t%.1f\n", report.hits1 * 100.0);
  out += buf;
  std::snprintf(buf, sizeof(buf), "Hits@10\t%.1f\n", report.hits10 * 100.0);
  out += buf;
  std::snprintf(buf, sizeof(buf), "queries\t%zu\n", report.query_count());
  out += buf;
  return out;
}

void write_metrics(const std::string& path, const RankingReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("eval: cannot write " + path);
  }
  out << format_metrics(report);
}

void write_ranks(const std::string& path, const RankingReport& report, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("eval: cannot write " + path);
  }
  out << "head\trelation\ttail\tside\tfiltered_rank\traw_rank\n";
  for (const QueryRank& q : report.queries) {
    out << vocab.entities.name(q.triple.head) << '\t' << vocab.relations.name(q.triple.rel)
        << '\t' << vocab.entities.name(q.triple.tail) << '\t'
        << (q.side == Side::Head ? "head" : "tail") << '\t' << q.filtered_rank << '\t'
        << q.raw_rank << '\n';
  }
}

}  // namespace kbc
