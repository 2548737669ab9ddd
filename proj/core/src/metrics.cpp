#include "qshift/metrics.hpp"

#include "qshift/error.hpp"
#include "qshift/textio.hpp"

namespace qshift {

double mrr_at(std::span<const RunEntry> ranking, const PositiveSet& positives,
              std::size_t cutoff) {
  for (const auto& e : ranking) {
    if (e.rank > cutoff) break;
    if (positives.contains(e.doc_id)) return 1.0 / static_cast<double>(e.rank);
  }
  return 0.0;
}

double asl(std::span<const RunEntry> ranking, const PositiveSet& positives, std::size_t bound) {
  if (positives.empty()) throw Error(ErrorCode::NoPositives, "ASL needs at least one positive");
  if (bound == 0) throw Error(ErrorCode::InvalidArgument, "ASL bound must be >= 1");
  double total = 0.0;
  std::size_t found = 0;
  std::size_t irrelevant = 0;
  for (const auto& e : ranking) {
    if (e.rank > bound) break;
    if (positives.contains(e.doc_id)) {
      total += static_cast<double>(irrelevant);
      ++found;
    } else {
      ++irrelevant;
    }
  }
  total += static_cast<double>((positives.size() - found) * bound);
  return total / static_cast<double>(positives.size());
}

double recall_at_k(std::span<const RunEntry> ranking, const PositiveSet& positives,
                   std::size_t k) {
  if (positives.empty()) throw Error(ErrorCode::NoPositives, "recall needs at least one positive");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "recall cutoff must be >= 1");
  std::size_t hits = 0;
  for (const auto& e : ranking) {
    if (e.rank > k) break;
    if (positives.contains(e.doc_id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(positives.size());
}

MetricSpec MetricSpec::parse(std::string_view name) {
  std::string_view base = name;
  std::optional<std::int64_t> cutoff;
  if (auto at = name.find('@'); at != std::string_view::npos) {
    base = name.substr(0, at);
    cutoff = textio::parse_int(name.substr(at + 1));
    if (!cutoff || *cutoff < 1)
      throw Error(ErrorCode::InvalidArgument, "bad metric cutoff in " + std::string(name));
  }
  MetricSpec spec;
  if (base == "mrr") {
    spec = {MetricKind::Mrr, 10};
  } else if (base == "asl") {
    spec = {MetricKind::Asl, 100};
  } else if (base == "recall") {
    spec = {MetricKind::Recall, 1000};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown metric " + std::string(name));
  }
  if (cutoff) spec.cutoff = static_cast<std::size_t>(*cutoff);
  return spec;
}

std::string MetricSpec::name() const {
  const char* base = kind == MetricKind::Mrr ? "mrr" : kind == MetricKind::Asl ? "asl" : "recall";
  return std::string(base) + "@" + std::to_string(cutoff);
}

double MetricSpec::evaluate(std::span<const RunEntry> ranking,
                            const PositiveSet& positives) const {
  switch (kind) {
    case MetricKind::Mrr: return mrr_at(ranking, positives, cutoff);
    case MetricKind::Asl: return asl(ranking, positives, cutoff);
    case MetricKind::Recall: return recall_at_k(ranking, positives, cutoff);
  }
  return 0.0;
}

double MetricSpec::worst_value() const {
  return kind == MetricKind::Asl ? static_cast<double>(cutoff) : 0.0;
}

std::string format_metric_dump(std::span<const PerQueryMetric> values) {
  std::string out;
  for (const auto& v : values) {
    out += v.query_id;
    out += '\t';
    out += v.metric;
    out += '\t';
    out += textio::format_double(v.value);
    out += '\n';
  }
  return out;
}

}  // namespace qshift
