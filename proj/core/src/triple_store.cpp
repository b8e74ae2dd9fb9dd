#include "kbc/triple_store.hpp"

#include <array>
#include <fstream>
#include <string>
#include <unordered_map>

#include "kbc/errors.hpp"

namespace kbc {

TripleStore::TripleStore(Split split, std::vector<Triple> triples) : split_(split) {
  triples_.reserve(triples.size());
  membership_.reserve(triples.size());
  for (const Triple& t : triples) {
    if (membership_.insert(t).second) {
      triples_.push_back(t);
    } else {
      ++duplicates_dropped_;
    }
  }
}

TripleStore load_split(const std::filesystem::path& file, Vocabulary& vocab, Split split,
                       UnseenPolicy policy) {
  std::ifstream in(file);
  if (!in) {
    throw DataError("cannot open triple file: " + file.string());
  }

  TripleStore store(split);

  auto resolve = [&](NameMap& map, const std::string& name, std::size_t line_no,
                     std::uint32_t& out) -> bool {
    if (policy == UnseenPolicy::Extend) {
      out = map.add(name);
      return true;
    }
    if (auto id = map.find(name)) {
      out = *id;
      return true;
    }
    if (policy == UnseenPolicy::Reject) {
      throw DataError(file.string() + ":" + std::to_string(line_no) +
                      ": unseen name under frozen vocabulary: " + name);
    }
    return false;  // Skip
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        line.find('\t', tab2 + 1) != std::string::npos) {
      throw DataError(file.string() + ":" + std::to_string(line_no) +
                      ": expected 3 tab-separated fields");
    }

    Triple t;
    const bool ok = resolve(vocab.entities, line.substr(0, tab1), line_no, t.head) &&
                    resolve(vocab.relations, line.substr(tab1 + 1, tab2 - tab1 - 1),
                            line_no, t.rel) &&
                    resolve(vocab.entities, line.substr(tab2 + 1), line_no, t.tail);
    if (!ok) {
      ++store.unseen_skipped_;
      continue;
    }

    if (store.membership_.insert(t).second) {
      store.triples_.push_back(t);
    } else {
      ++store.duplicates_dropped_;
    }
  }
  return store;
}

double BernoulliStats::p_head(RelationId r) const {
  require(r);
  return tph_[r] / (tph_[r] + hpt_[r]);
}

double BernoulliStats::tails_per_head(RelationId r) const {
  require(r);
  return tph_[r];
}

double BernoulliStats::heads_per_tail(RelationId r) const {
  require(r);
  return hpt_[r];
}

bool BernoulliStats::covers(RelationId r) const {
  return r < present_.size() && present_[r];
}

void BernoulliStats::require(RelationId r) const {
  if (!covers(r)) {
    throw DataError("no corruption statistics for relation id " + std::to_string(r));
  }
}

BernoulliStats BernoulliStats::from_probabilities(std::span<const double> p_head) {
  BernoulliStats stats;
  stats.tph_.reserve(p_head.size());
  stats.hpt_.reserve(p_head.size());
  for (double p : p_head) {
    // Any (tph, hpt) pair with tph/(tph+hpt) = p; scale is irrelevant here.
    stats.tph_.push_back(p);
    stats.hpt_.push_back(1.0 - p);
    stats.present_.push_back(true);
  }
  return stats;
}

BernoulliStats compute_bernoulli_stats(const TripleStore& store) {
  if (store.empty()) {
    throw DataError("cannot compute corruption statistics on an empty store");
  }

  // The store is deduplicated, so the distinct (h, t) pair count under a
  // relation is exactly its triple count.
  struct Counts {
    std::size_t triples = 0;
    std::unordered_set<EntityId> heads;
    std::unordered_set<EntityId> tails;
  };
  std::unordered_map<RelationId, Counts> by_rel;
  RelationId max_rel = 0;
  for (const Triple& t : store.triples()) {
    Counts& c = by_rel[t.rel];
    ++c.triples;
    c.heads.insert(t.head);
    c.tails.insert(t.tail);
    max_rel = std::max(max_rel, t.rel);
  }

  BernoulliStats stats;
  stats.tph_.assign(max_rel + 1, 0.0);
  stats.hpt_.assign(max_rel + 1, 0.0);
  stats.present_.assign(max_rel + 1, false);
  for (const auto& [rel, c] : by_rel) {
    stats.tph_[rel] = static_cast<double>(c.triples) / static_cast<double>(c.heads.size());
    stats.hpt_[rel] = static_cast<double>(c.triples) / static_cast<double>(c.tails.size());
    stats.present_[rel] = true;
  }
  return stats;
}

}  // namespace kbc
