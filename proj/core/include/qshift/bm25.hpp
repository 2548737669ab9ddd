#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qshift/corpus.hpp"

namespace qshift {

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

struct Posting {
  std::uint32_t doc = 0;  // ordinal into the doc id table
  std::uint32_t tf = 0;

  bool operator==(const Posting&) const = default;
};

/// Term -> postings sorted by doc ordinal, plus per-document lengths.
class InvertedIndex {
 public:
  InvertedIndex() = default;

  /// Tokenizes every passage with `tokenize`. Throws EmptyCollection.
  static InvertedIndex build(const Collection& collection);

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  double avgdl() const noexcept { return avgdl_; }
  std::uint32_t doc_length(std::size_t doc) const { return doc_lengths_[doc]; }
  const std::string& doc_id(std::size_t doc) const { return doc_ids_[doc]; }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  std::size_t term_count() const noexcept { return postings_.size(); }

  /// Empty span for unknown terms.
  std::span<const Posting> postings(std::string_view term) const;
  std::size_t df(std::string_view term) const { return postings(term).size(); }
  /// Term frequency of `term` in `doc` (binary search on the postings).
  std::uint32_t tf(std::string_view term, std::size_t doc) const;

  /// Non-negative Robertson idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
  double idf(std::size_t df) const;

  /// Versioned little-endian binary layout, see docs/index_format.md.
  std::string serialize() const;
  static InvertedIndex deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

  bool operator==(const InvertedIndex& other) const;

 private:
  void finish();

  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<std::string> doc_ids_;
  double avgdl_ = 0.0;
};

/// Sum over query tokens (duplicates included, in order) of
/// idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl)).
double bm25_score(const InvertedIndex& index, std::span<const std::string> query_tokens,
                  std::size_t doc, const Bm25Params& params = {});

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

/// Exhaustive term-at-a-time top-k over documents matching at least one
/// query term, sorted by (score desc, doc_id asc).
std::vector<ScoredDoc> search(const InvertedIndex& index, std::string_view query_text,
                              std::size_t k, const Bm25Params& params = {});

std::vector<ScoredDoc> search_tokens(const InvertedIndex& index,
                                     std::span<const std::string> query_tokens, std::size_t k,
                                     const Bm25Params& params = {});

/// BM25 run over `query_ids` (in that order) at the given depth.
RunSet bm25_run(const InvertedIndex& index, const QuerySet& queries,
                std::span<const std::string> query_ids, std::size_t depth,
                const Bm25Params& params = {}, std::size_t threads = 1,
                std::string tag = "bm25");

// --- negative mining ----------------------------------------------------

struct Triplet {
  std::string query_id;
  std::string positive;
  std::string negative;

  bool operator==(const Triplet&) const = default;
};

struct TripletSet {
  std::vector<Triplet> triplets;
  /// Queries skipped because no candidate negative survived.
  std::vector<std::string> skipped;
};

struct MiningOptions {
  std::size_t n_neg = 100;
  std::size_t pool = 1000;
  std::uint64_t seed = 0;
  int min_relevance = 1;
  Bm25Params bm25{};
  std::size_t threads = 1;
};

/// For each query (in order): BM25 top-`pool`, drop the positives, sample
/// min(n_neg, remaining) negatives uniformly without replacement, and emit
/// one triplet per (positive, negative). Each query draws from its own
/// generator seeded by splitmix64(seed ^ fnv1a64(query_id)), so output does
/// not depend on the thread count. Throws NoPositives.
TripletSet mine_negatives(const InvertedIndex& index, const QuerySet& queries,
                          std::span<const std::string> query_ids, const QrelSet& qrels,
                          const MiningOptions& options);

std::string format_triplets(const TripletSet& triplets);

}  // namespace qshift
