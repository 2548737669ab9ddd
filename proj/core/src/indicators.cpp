#include "qshift/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "qshift/error.hpp"
#include "qshift/parallel.hpp"
#include "qshift/stats.hpp"
#include "qshift/textio.hpp"

namespace qshift {

TermDistribution term_distribution(std::span<const std::string> texts) {
  std::map<std::string, std::size_t, std::less<>> counts;
  std::size_t total = 0;
  for (const auto& text : texts) {
    for (auto& tok : tokenize(text)) {
      ++counts[std::move(tok)];
      ++total;
    }
  }
  if (total == 0) throw Error(ErrorCode::EmptyVocabulary, "no tokens in the query set");
  TermDistribution dist;
  dist.query_count = texts.size();
  const double denom = static_cast<double>(total);
  for (const auto& [term, count] : counts)
    dist.frequencies.emplace_hint(dist.frequencies.end(), term,
                                  static_cast<double>(count) / denom);
  return dist;
}

double weighted_jaccard(const TermDistribution& s, const TermDistribution& t) {
  if (s.frequencies.empty() || t.frequencies.empty())
    throw Error(ErrorCode::InvalidArgument, "weighted Jaccard of an empty distribution");
  double num = 0.0;
  double den = 0.0;
  auto a = s.frequencies.begin();
  auto b = t.frequencies.begin();
  while (a != s.frequencies.end() || b != t.frequencies.end()) {
    if (b == t.frequencies.end() || (a != s.frequencies.end() && a->first < b->first)) {
      den += a->second;
      ++a;
    } else if (a == s.frequencies.end() || b->first < a->first) {
      den += b->second;
      ++b;
    } else {
      num += std::min(a->second, b->second);
      den += std::max(a->second, b->second);
      ++a;
      ++b;
    }
  }
  return num / den;
}

double model_similarity(std::span<const double> query_vector,
                        std::span<const std::string> train_ids, const EmbeddingSet& emb) {
  if (query_vector.size() != emb.dim())
    throw Error(ErrorCode::InvalidArgument, "query vector dimension does not match embeddings");
  if (train_ids.empty()) throw Error(ErrorCode::InvalidArgument, "empty training set");
  double total = 0.0;
  for (const auto& id : train_ids) {
    const auto row = emb.row(std::string_view(id));
    double dot = 0.0;
    for (std::size_t d = 0; d < row.size(); ++d) dot += query_vector[d] * row[d];
    total += dot;
  }
  return total / static_cast<double>(train_ids.size());
}

double model_similarity(std::string_view query_id, std::span<const std::string> train_ids,
                        const EmbeddingSet& emb) {
  const auto row = emb.row(query_id);
  std::vector<double> q(row.begin(), row.end());
  return model_similarity(q, train_ids, emb);
}

std::vector<SimilarityScore> model_similarities(std::span<const std::string> query_ids,
                                                std::span<const std::string> train_ids,
                                                const EmbeddingSet& emb, std::size_t threads) {
  if (train_ids.empty()) throw Error(ErrorCode::InvalidArgument, "empty training set");
  std::vector<double> mean(emb.dim(), 0.0);
  for (const auto& id : train_ids) {
    const auto row = emb.row(std::string_view(id));
    for (std::size_t d = 0; d < row.size(); ++d) mean[d] += row[d];
  }
  for (auto& v : mean) v /= static_cast<double>(train_ids.size());
  for (const auto& id : query_ids) (void)emb.row(std::string_view(id));

  std::vector<SimilarityScore> out(query_ids.size());
  parallel_for(query_ids.size(), threads, [&](std::size_t i) {
    const auto row = emb.row(std::string_view(query_ids[i]));
    double dot = 0.0;
    for (std::size_t d = 0; d < row.size(); ++d) dot += row[d] * mean[d];
    out[i] = {query_ids[i], dot};
  });
  return out;
}

std::vector<JaccardLossRow> jaccard_loss_table(const ShiftManifest& manifest,
                                               const QuerySet& queries,
                                               std::span<const ShiftSummary> summaries,
                                               bool strict) {
  if (summaries.size() != manifest.clusters.size())
    throw Error(ErrorCode::ClusterMismatch,
                std::to_string(summaries.size()) + " summaries for " +
                    std::to_string(manifest.clusters.size()) + " clusters");
  auto texts_of = [&](const std::vector<std::string>& ids, std::vector<std::string>& into) {
    for (const auto& id : ids) into.push_back(queries.text(id));
  };
  std::vector<JaccardLossRow> rows;
  for (std::size_t i = 0; i < manifest.clusters.size(); ++i) {
    const auto& cluster = manifest.clusters[i];
    auto it = std::find_if(summaries.begin(), summaries.end(),
                           [&](const ShiftSummary& s) { return s.eval_set == cluster.name; });
    if (it == summaries.end())
      throw Error(ErrorCode::ClusterMismatch, "no summary for cluster " + cluster.name);

    std::vector<std::string> inside, outside;
    if (!strict) texts_of(cluster.train, inside);
    texts_of(cluster.test, inside);
    for (std::size_t j = 0; j < manifest.clusters.size(); ++j) {
      if (j == i) continue;
      texts_of(manifest.clusters[j].train, outside);
      if (!strict) texts_of(manifest.clusters[j].test, outside);
    }
    const double j_value = weighted_jaccard(term_distribution(inside), term_distribution(outside));
    rows.push_back({cluster.name, j_value, it->rel_loss});
  }
  return rows;
}

std::string jaccard_loss_to_csv(std::span<const JaccardLossRow> rows) {
  std::string out = "cluster,jaccard,rel_loss\n";
  for (const auto& r : rows)
    out += r.cluster + "," + textio::format_double(r.jaccard) + "," +
           textio::format_double(r.rel_loss) + "\n";
  return out;
}

std::string similarity_scores_to_tsv(std::span<const SimilarityScore> scores) {
  std::string out;
  for (const auto& s : scores) out += s.query_id + "\t" + textio::format_double(s.value) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// binning

namespace {

struct Joined {
  double score;
  std::string query_id;
  double in;
  double out;
};

void fill_bin(Bin& bin, std::span<const Joined> items) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  bin.count = items.size();
  if (items.empty()) {
    bin.empty = true;
    bin.avg_in = bin.out = bin.rel_loss = nan;
    bin.box = {nan, nan, nan, nan, nan};
    return;
  }
  std::vector<double> ins, outs, losses;
  for (const auto& it : items) {
    ins.push_back(it.in);
    outs.push_back(it.out);
    if (it.in != 0.0) losses.push_back((it.in - it.out) / it.in);
  }
  bin.avg_in = stable_mean(ins);
  bin.out = stable_mean(outs);
  bin.rel_loss = bin.avg_in != 0.0 ? (bin.avg_in - bin.out) / bin.avg_in : nan;
  bin.box_count = losses.size();
  if (losses.empty()) {
    bin.box = {nan, nan, nan, nan, nan};
    return;
  }
  std::sort(losses.begin(), losses.end());
  bin.box = {losses.front(), quantile_sorted(losses, 0.25), quantile_sorted(losses, 0.5),
             quantile_sorted(losses, 0.75), losses.back()};
}

}  // namespace

BinReport bin_by_similarity(std::span<const SimilarityScore> scores, const EvalMatrix& matrix,
                            const BinSpec& spec) {
  if (scores.empty()) throw Error(ErrorCode::InvalidArgument, "no similarity scores to bin");
  std::unordered_map<std::string, std::pair<double, double>> lookup;
  for (const auto& o : query_outcomes(matrix)) lookup.emplace(o.query_id, std::pair{o.in_domain, o.zero_shot});

  std::vector<Joined> items;
  items.reserve(scores.size());
  for (const auto& s : scores) {
    auto it = lookup.find(s.query_id);
    if (it == lookup.end())
      throw Error(ErrorCode::UnknownId, s.query_id + " is not in the evaluation matrix");
    if (!std::isfinite(s.value))
      throw Error(ErrorCode::InvalidArgument, "non-finite similarity for " + s.query_id);
    items.push_back({s.value, s.query_id, it->second.first, it->second.second});
  }
  std::sort(items.begin(), items.end(), [](const Joined& a, const Joined& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.query_id < b.query_id;
  });
  const std::size_t n = items.size();

  std::vector<double> lows;
  double top;
  if (!spec.edges.empty()) {
    if (spec.edges.size() < 2)
      throw Error(ErrorCode::InvalidArgument, "explicit bins need at least two edges");
    for (std::size_t e = 1; e < spec.edges.size(); ++e)
      if (!(spec.edges[e] > spec.edges[e - 1]))
        throw Error(ErrorCode::InvalidArgument, "bin edges must be strictly increasing");
    lows.assign(spec.edges.begin(), spec.edges.end() - 1);
    top = spec.edges.back();
    if (items.front().score < lows.front() || items.back().score > top)
      throw Error(ErrorCode::InvalidArgument, "similarity outside the explicit bin edges");
  } else {
    if (spec.count == 0) throw Error(ErrorCode::InvalidArgument, "bin count must be >= 1");
    for (std::size_t b = 0; b < spec.count; ++b) lows.push_back(items[b * n / spec.count].score);
    top = items.back().score;
  }

  const std::size_t nbins = lows.size();
  std::vector<std::vector<Joined>> members(nbins);
  for (auto& it : items) {
    auto pos = std::upper_bound(lows.begin(), lows.end(), it.score);
    const auto b = static_cast<std::size_t>(pos - lows.begin()) - 1;
    members[b].push_back(std::move(it));
  }

  BinReport report;
  report.total = n;
  for (std::size_t b = 0; b < nbins; ++b) {
    Bin bin;
    bin.low = lows[b];
    bin.high = b + 1 < nbins ? lows[b + 1] : top;
    fill_bin(bin, members[b]);
    if (bin.empty) report.empty_bins.push_back(b);
    report.bins.push_back(bin);
  }
  return report;
}

std::string bins_to_csv(const BinReport& report) {
  std::string out = "bin_low,bin_high,count,avg_in,out,rel_loss,min,q1,median,q3,max\n";
  auto f = [](double v) { return textio::format_double(v); };
  for (const auto& b : report.bins) {
    out += f(b.low) + "," + f(b.high) + "," + std::to_string(b.count) + "," + f(b.avg_in) + "," +
           f(b.out) + "," + f(b.rel_loss) + "," + f(b.box.min) + "," + f(b.box.q1) + "," +
           f(b.box.median) + "," + f(b.box.q3) + "," + f(b.box.max) + "\n";
  }
  return out;
}

}  // namespace qshift
