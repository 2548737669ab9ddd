#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qshift/corpus.hpp"
#include "qshift/harness.hpp"
#include "qshift/shiftgen.hpp"

namespace qshift {

/// Normalized term frequencies over a set of queries.
struct TermDistribution {
  std::map<std::string, double, std::less<>> frequencies;  // sums to 1
  std::size_t query_count = 0;
};

/// Term counts over all tokenized texts divided by the total token count.
/// Throws EmptyVocabulary.
TermDistribution term_distribution(std::span<const std::string> texts);

/// sum_k min(S_k, T_k) / sum_k max(S_k, T_k) over the union vocabulary.
double weighted_jaccard(const TermDistribution& s, const TermDistribution& t);

/// Mean dot product between a query vector and the given training rows,
/// accumulated in double precision. Throws UnknownId, InvalidArgument.
double model_similarity(std::span<const double> query_vector,
                        std::span<const std::string> train_ids, const EmbeddingSet& emb);

double model_similarity(std::string_view query_id, std::span<const std::string> train_ids,
                        const EmbeddingSet& emb);

struct SimilarityScore {
  std::string query_id;
  double value = 0.0;
};

/// Same quantity as model_similarity for many queries at once: the training
/// rows are summed once into a mean vector and each query is dotted with it.
std::vector<SimilarityScore> model_similarities(std::span<const std::string> query_ids,
                                                std::span<const std::string> train_ids,
                                                const EmbeddingSet& emb, std::size_t threads = 1);

struct JaccardLossRow {
  std::string cluster;
  double jaccard = 0.0;
  double rel_loss = 0.0;
};

/// J between each cluster and its complement paired with that cluster's
/// relative loss. Pooled mode uses all (train + test) queries on both sides;
/// strict mode compares the cluster's test queries with the complement's
/// train queries. Throws ClusterMismatch.
std::vector<JaccardLossRow> jaccard_loss_table(const ShiftManifest& manifest,
                                               const QuerySet& queries,
                                               std::span<const ShiftSummary> summaries,
                                               bool strict = false);

std::string jaccard_loss_to_csv(std::span<const JaccardLossRow> rows);
std::string similarity_scores_to_tsv(std::span<const SimilarityScore> scores);

/// Either `count` equal-population bins or explicit ascending edges.
struct BinSpec {
  std::size_t count = 5;
  std::vector<double> edges;  // when non-empty, overrides count
};

struct BoxStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct Bin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;
  double avg_in = 0.0;
  double out = 0.0;
  double rel_loss = 0.0;  // NaN when the bin is empty or avg_in == 0
  /// Over per-query relative losses (in - out) / in, for queries with in != 0.
  BoxStats box;
  std::size_t box_count = 0;
  bool empty = false;
};

struct BinReport {
  std::vector<Bin> bins;
  std::vector<std::size_t> empty_bins;
  std::size_t total = 0;
};

/// Joins each scored query with its (in-domain mean, zero-shot) values from
/// the matrix and bins by score. Quantile bins take their edges from the
/// sorted scores at positions floor(b * n / count); a score lands in the
/// last bin whose lower edge is <= it, so tied scores share a bin. Bins are
/// half-open [low, high) except the last, which is closed.
/// Throws UnknownId (query not in the matrix), InvalidArgument.
BinReport bin_by_similarity(std::span<const SimilarityScore> scores, const EvalMatrix& matrix,
                            const BinSpec& spec);

std::string bins_to_csv(const BinReport& report);

}  // namespace qshift
