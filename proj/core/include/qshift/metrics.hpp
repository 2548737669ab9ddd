#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "qshift/corpus.hpp"

namespace qshift {

using PositiveSet = std::unordered_set<std::string>;

/// Reciprocal rank of the first positive within the top `cutoff`, else 0.
double mrr_at(std::span<const RunEntry> ranking, const PositiveSet& positives,
              std::size_t cutoff);

inline double mrr_at_10(std::span<const RunEntry> ranking, const PositiveSet& positives) {
  return mrr_at(ranking, positives, 10);
}

/// Bounded atomized search length: for every positive, the number of
/// irrelevant documents ranked strictly before it; positives not retrieved
/// within the top `bound` count as `bound`. Mean over positives.
/// Throws NoPositives.
double asl(std::span<const RunEntry> ranking, const PositiveSet& positives,
           std::size_t bound = 100);

/// Fraction of positives in the top k. Throws NoPositives.
double recall_at_k(std::span<const RunEntry> ranking, const PositiveSet& positives,
                   std::size_t k = 1000);

enum class MetricKind { Mrr, Asl, Recall };

/// A metric with its cutoff: "mrr@10", "asl@100", "recall@1000". The bare
/// names "mrr", "asl" and "recall" take the defaults 10 / 100 / 1000.
struct MetricSpec {
  MetricKind kind = MetricKind::Mrr;
  std::size_t cutoff = 10;

  static MetricSpec parse(std::string_view name);
  std::string name() const;

  double evaluate(std::span<const RunEntry> ranking, const PositiveSet& positives) const;
  /// Score given to a query that is missing from a run.
  double worst_value() const;
  bool higher_is_better() const { return kind != MetricKind::Asl; }
};

struct PerQueryMetric {
  std::string query_id;
  std::string metric;
  double value = 0.0;
};

/// `query_id<TAB>metric<TAB>value` lines.
std::string format_metric_dump(std::span<const PerQueryMetric> values);

}  // namespace qshift
