#include "qshift/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "qshift/error.hpp"
#include "qshift/parallel.hpp"
#include "qshift/textio.hpp"

namespace qshift {

namespace {

constexpr std::string_view kIndexMagic = "QSBM25IX";
constexpr std::uint32_t kIndexVersion = 1;

// Shared by bm25_score and search so both produce bit-identical sums.
inline double term_weight(double idf, double tf, double dl, double avgdl,
                          const Bm25Params& p) {
  return idf * (tf * (p.k1 + 1.0)) / (tf + p.k1 * (1.0 - p.b + p.b * dl / avgdl));
}

}  // namespace

InvertedIndex InvertedIndex::build(const Collection& collection) {
  if (collection.empty()) throw Error(ErrorCode::EmptyCollection, "collection has no passages");
  InvertedIndex index;
  index.doc_ids_.reserve(collection.size());
  index.doc_lengths_.reserve(collection.size());
  std::unordered_map<std::string, std::uint32_t> counts;
  for (std::size_t d = 0; d < collection.size(); ++d) {
    const auto tokens = tokenize(collection[d].text);
    counts.clear();
    for (const auto& t : tokens) ++counts[t];
    for (auto& [term, tf] : counts)
      index.postings_[term].push_back({static_cast<std::uint32_t>(d), tf});
    index.doc_ids_.push_back(collection[d].id);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
  }
  index.finish();
  return index;
}

void InvertedIndex::finish() {
  double total = 0.0;
  for (auto len : doc_lengths_) total += len;
  avgdl_ = doc_lengths_.empty() ? 0.0 : total / static_cast<double>(doc_lengths_.size());
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  if (it == postings_.end()) return {};
  return it->second;
}

std::uint32_t InvertedIndex::tf(std::string_view term, std::size_t doc) const {
  const auto list = postings(term);
  auto it = std::lower_bound(list.begin(), list.end(), doc,
                             [](const Posting& p, std::size_t d) { return p.doc < d; });
  return (it != list.end() && it->doc == doc) ? it->tf : 0;
}

double InvertedIndex::idf(std::size_t df) const {
  const double n = static_cast<double>(doc_count());
  const double f = static_cast<double>(df);
  return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
}

bool InvertedIndex::operator==(const InvertedIndex& other) const {
  return postings_ == other.postings_ && doc_lengths_ == other.doc_lengths_ &&
         doc_ids_ == other.doc_ids_;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

template <typename T>
void put(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

void put_string(std::string& out, std::string_view s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string() {
    const auto len = get<std::uint32_t>();
    need(len);
    std::string s(bytes_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::SizeMismatch, "truncated index file");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string InvertedIndex::serialize() const {
  std::string out(kIndexMagic);
  put<std::uint32_t>(out, kIndexVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, doc_ids_.size());
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    put_string(out, doc_ids_[d]);
    put<std::uint32_t>(out, doc_lengths_[d]);
  }
  std::vector<const std::pair<const std::string, std::vector<Posting>>*> terms;
  terms.reserve(postings_.size());
  for (const auto& entry : postings_) terms.push_back(&entry);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return a->first < b->first; });
  put<std::uint64_t>(out, terms.size());
  for (const auto* entry : terms) {
    put_string(out, entry->first);
    put<std::uint64_t>(out, entry->second.size());
    for (const auto& p : entry->second) {
      put<std::uint32_t>(out, p.doc);
      put<std::uint32_t>(out, p.tf);
    }
  }
  return out;
}

InvertedIndex InvertedIndex::deserialize(std::string_view bytes) {
  if (bytes.substr(0, kIndexMagic.size()) != kIndexMagic)
    throw Error(ErrorCode::BadMagic, "not a qshift BM25 index");
  Reader r(bytes.substr(kIndexMagic.size()));
  const auto version = r.get<std::uint32_t>();
  if (version != kIndexVersion)
    throw Error(ErrorCode::UnsupportedVersion, "index version " + std::to_string(version));
  (void)r.get<std::uint32_t>();
  InvertedIndex index;
  const auto docs = r.get<std::uint64_t>();
  for (std::uint64_t d = 0; d < docs; ++d) {
    index.doc_ids_.push_back(r.get_string());
    index.doc_lengths_.push_back(r.get<std::uint32_t>());
  }
  const auto terms = r.get<std::uint64_t>();
  for (std::uint64_t t = 0; t < terms; ++t) {
    auto term = r.get_string();
    const auto count = r.get<std::uint64_t>();
    std::vector<Posting> list;
    list.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      Posting p;
      p.doc = r.get<std::uint32_t>();
      p.tf = r.get<std::uint32_t>();
      if (p.doc >= docs || (!list.empty() && p.doc <= list.back().doc))
        throw Error(ErrorCode::InvalidArgument, "corrupt postings for term " + term);
      list.push_back(p);
    }
    index.postings_.emplace(std::move(term), std::move(list));
  }
  if (!r.done()) throw Error(ErrorCode::SizeMismatch, "trailing bytes in index file");
  index.finish();
  return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
  textio::write_file(path, serialize());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  return deserialize(textio::read_file(path));
}

// ---------------------------------------------------------------------------
// scoring

double bm25_score(const InvertedIndex& index, std::span<const std::string> query_tokens,
                  std::size_t doc, const Bm25Params& params) {
  if (doc >= index.doc_count()) throw Error(ErrorCode::InvalidArgument, "doc ordinal out of range");
  double score = 0.0;
  const double dl = index.doc_length(doc);
  for (const auto& term : query_tokens) {
    const auto tf = index.tf(term, doc);
    if (tf == 0) continue;
    score += term_weight(index.idf(index.df(term)), tf, dl, index.avgdl(), params);
  }
  return score;
}

std::vector<ScoredDoc> search_tokens(const InvertedIndex& index,
                                     std::span<const std::string> query_tokens, std::size_t k,
                                     const Bm25Params& params) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  thread_local std::vector<double> acc;
  thread_local std::vector<std::uint8_t> seen;
  acc.assign(index.doc_count(), 0.0);
  seen.assign(index.doc_count(), 0);
  std::vector<std::uint32_t> touched;
  for (const auto& term : query_tokens) {
    const auto list = index.postings(term);
    if (list.empty()) continue;
    const double idf = index.idf(list.size());
    for (const auto& p : list) {
      acc[p.doc] += term_weight(idf, p.tf, index.doc_length(p.doc), index.avgdl(), params);
      if (!seen[p.doc]) {
        seen[p.doc] = 1;
        touched.push_back(p.doc);
      }
    }
  }
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (acc[a] != acc[b]) return acc[a] > acc[b];
    return index.doc_id(a) < index.doc_id(b);
  };
  const auto take = std::min(k, touched.size());
  std::partial_sort(touched.begin(), touched.begin() + static_cast<long>(take), touched.end(),
                    better);
  std::vector<ScoredDoc> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i)
    out.push_back({index.doc_id(touched[i]), acc[touched[i]]});
  return out;
}

std::vector<ScoredDoc> search(const InvertedIndex& index, std::string_view query_text,
                              std::size_t k, const Bm25Params& params) {
  const auto tokens = tokenize(query_text);
  return search_tokens(index, tokens, k, params);
}

RunSet bm25_run(const InvertedIndex& index, const QuerySet& queries,
                std::span<const std::string> query_ids, std::size_t depth,
                const Bm25Params& params, std::size_t threads, std::string tag) {
  std::vector<std::vector<ScoredDoc>> results(query_ids.size());
  parallel_for(query_ids.size(), threads, [&](std::size_t i) {
    results[i] = search(index, queries.text(query_ids[i]), depth, params);
  });
  RunSet run(std::move(tag));
  for (std::size_t i = 0; i < query_ids.size(); ++i) {
    if (results[i].empty()) continue;
    Ranking ranking;
    ranking.reserve(results[i].size());
    for (std::size_t r = 0; r < results[i].size(); ++r)
      ranking.push_back({results[i][r].doc_id, r + 1, results[i][r].score});
    run.set(query_ids[i], std::move(ranking));
  }
  return run;
}

}  // namespace qshift
