#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace qshift {

using TokenList = std::vector<std::string>;

/// Lowercases and splits on every non-alphanumeric Unicode codepoint.
/// Invalid UTF-8 bytes act as separators. No stemming, no stopwords.
/// This is the only tokenizer in the toolkit: BM25, term statistics and
/// query lengths all go through it.
TokenList tokenize(std::string_view text);

struct TextEntry {
  std::string id;
  std::string text;

  bool operator==(const TextEntry&) const = default;
};

/// Ordered id -> text store with unique, non-empty ids.
class TextStore {
 public:
  TextStore() = default;
  explicit TextStore(std::vector<TextEntry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<TextEntry>& entries() const noexcept { return entries_; }
  const TextEntry& operator[](std::size_t i) const { return entries_[i]; }

  std::optional<std::size_t> find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id).has_value(); }
  /// Throws Error(UnknownId).
  const std::string& text(std::string_view id) const;

  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

 private:
  std::vector<TextEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

class QuerySet : public TextStore {
 public:
  using TextStore::TextStore;
};

class Collection : public TextStore {
 public:
  using TextStore::TextStore;
};

QuerySet load_queries(const std::filesystem::path& path);
Collection load_collection(const std::filesystem::path& path);
/// Parses `id<TAB>text` lines; exposed for in-memory fixtures.
std::vector<TextEntry> parse_tsv_entries(std::string_view content);
std::string format_tsv_entries(const TextStore& store);

/// query_id -> (doc_id -> relevance).
class QrelSet {
 public:
  using Judgments = std::map<std::string, int>;

  /// Throws DuplicatePair or NegativeRelevance.
  void add(const std::string& query_id, const std::string& doc_id, int relevance);

  const Judgments* find(std::string_view query_id) const;
  /// Docs with relevance >= min_relevance.
  std::unordered_set<std::string> positives(std::string_view query_id,
                                            int min_relevance = 1) const;

  const std::map<std::string, Judgments, std::less<>>& data() const noexcept { return data_; }
  std::size_t query_count() const noexcept { return data_.size(); }

  bool operator==(const QrelSet&) const = default;

 private:
  std::map<std::string, Judgments, std::less<>> data_;
};

QrelSet parse_qrels(std::string_view content);
QrelSet load_qrels(const std::filesystem::path& path);
std::string format_qrels(const QrelSet& qrels);

struct RunEntry {
  std::string doc_id;
  std::size_t rank = 0;  // 1-based
  double score = 0.0;

  bool operator==(const RunEntry&) const = default;
};

using Ranking = std::vector<RunEntry>;

/// One system's ranked lists. Per query: ranks 1..n, scores non-increasing,
/// doc ids unique. `set` validates these.
class RunSet {
 public:
  RunSet() = default;
  explicit RunSet(std::string tag) : tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  /// Entries may arrive in any order; they are sorted by rank and validated.
  void set(const std::string& query_id, Ranking entries);
  const Ranking* find(std::string_view query_id) const;

  const std::map<std::string, Ranking, std::less<>>& data() const noexcept { return data_; }
  std::size_t query_count() const noexcept { return data_.size(); }

  bool operator==(const RunSet&) const = default;

 private:
  std::string tag_;
  std::map<std::string, Ranking, std::less<>> data_;
};

/// Builds a valid ranking (ranks 1..n) from (doc_id, score) pairs already
/// sorted by descending score.
Ranking make_ranking(std::span<const std::pair<std::string, double>> scored);

RunSet parse_run(std::string_view content);
RunSet load_run(const std::filesystem::path& path);
std::string format_run(const RunSet& run);

/// Row-aligned float32 query vectors.
class EmbeddingSet {
 public:
  static constexpr std::string_view kMagic = "SHFTEMB1";
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 8;

  EmbeddingSet() = default;
  /// data is row-major ids.size() x dim. Throws on shape or duplicate ids.
  EmbeddingSet(std::size_t dim, std::vector<std::string> ids, std::vector<float> data);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const float> data() const noexcept { return data_; }

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }
  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws Error(UnknownId).
  std::span<const float> row(std::string_view id) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// `<stem>.ids` next to the binary file.
std::filesystem::path default_ids_path(const std::filesystem::path& bin_path);

EmbeddingSet decode_embeddings(std::string_view bin, std::string_view ids_text);
EmbeddingSet load_embeddings(const std::filesystem::path& bin_path,
                             const std::filesystem::path& ids_path);
std::string encode_embeddings(const EmbeddingSet& emb);
std::string format_embedding_ids(const EmbeddingSet& emb);
void write_embeddings(const EmbeddingSet& emb, const std::filesystem::path& bin_path,
                      const std::filesystem::path& ids_path);

}  // namespace qshift
