#include <algorithm>

#include "qshift/bm25.hpp"
#include "qshift/error.hpp"
#include "qshift/parallel.hpp"
#include "qshift/seeding.hpp"

namespace qshift {

namespace {

struct QueryResult {
  std::vector<Triplet> triplets;
  bool skipped = false;
};

}  // namespace

TripletSet mine_negatives(const InvertedIndex& index, const QuerySet& queries,
                          std::span<const std::string> query_ids, const QrelSet& qrels,
                          const MiningOptions& options) {
  if (options.pool == 0) throw Error(ErrorCode::InvalidArgument, "pool must be >= 1");

  std::vector<std::vector<std::string>> positives(query_ids.size());
  for (std::size_t i = 0; i < query_ids.size(); ++i) {
    auto pos = qrels.positives(query_ids[i], options.min_relevance);
    if (pos.empty()) throw Error(ErrorCode::NoPositives, query_ids[i]);
    positives[i].assign(pos.begin(), pos.end());
    std::sort(positives[i].begin(), positives[i].end());
    (void)queries.text(query_ids[i]);
  }

  std::vector<QueryResult> results(query_ids.size());
  parallel_for(query_ids.size(), options.threads, [&](std::size_t i) {
    const auto& qid = query_ids[i];
    const auto& pos = positives[i];
    auto hits = search(index, queries.text(qid), options.pool, options.bm25);
    std::vector<std::string> candidates;
    candidates.reserve(hits.size());
    for (auto& h : hits)
      if (!std::binary_search(pos.begin(), pos.end(), h.doc_id))
        candidates.push_back(std::move(h.doc_id));
    if (candidates.empty()) {
      results[i].skipped = true;
      return;
    }
    Rng rng(splitmix64(options.seed ^ fnv1a64(qid)));
    const auto take = std::min(options.n_neg, candidates.size());
    for (std::size_t s = 0; s < take; ++s) {
      const auto j = s + rng.uniform_index(candidates.size() - s);
      std::swap(candidates[s], candidates[j]);
    }
    auto& out = results[i].triplets;
    out.reserve(pos.size() * take);
    for (const auto& p : pos)
      for (std::size_t s = 0; s < take; ++s) out.push_back({qid, p, candidates[s]});
  });

  TripletSet set;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].skipped) {
      set.skipped.push_back(query_ids[i]);
      continue;
    }
    set.triplets.insert(set.triplets.end(),
                        std::make_move_iterator(results[i].triplets.begin()),
                        std::make_move_iterator(results[i].triplets.end()));
  }
  return set;
}

std::string format_triplets(const TripletSet& triplets) {
  std::string out;
  for (const auto& t : triplets.triplets) {
    out += t.query_id;
    out += '\t';
    out += t.positive;
    out += '\t';
    out += t.negative;
    out += '\n';
  }
  return out;
}

}  // namespace qshift
