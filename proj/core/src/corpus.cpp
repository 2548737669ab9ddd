#include "qshift/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>

#include "qshift/error.hpp"
#include "qshift/textio.hpp"

namespace qshift {

// ---------------------------------------------------------------------------
// TextStore

TextStore::TextStore(std::vector<TextEntry> entries) : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].id.empty()) throw Error(ErrorCode::InvalidArgument, "empty id");
    if (!index_.emplace(entries_[i].id, i).second)
      throw Error(ErrorCode::DuplicateId, entries_[i].id);
  }
}

std::optional<std::size_t> TextStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& TextStore::text(std::string_view id) const {
  auto i = find(id);
  if (!i) throw Error(ErrorCode::UnknownId, std::string(id));
  return entries_[*i].text;
}

std::vector<TextEntry> parse_tsv_entries(std::string_view content) {
  std::vector<TextEntry> entries;
  std::unordered_set<std::string_view> seen;
  auto lines = textio::split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = lines[n];
    if (line.empty()) continue;
    auto fields = textio::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty())
      throw Error(ErrorCode::MalformedLine, "expected id<TAB>text", n + 1);
    if (!seen.insert(fields[0]).second)
      throw Error(ErrorCode::DuplicateId, std::string(fields[0]), n + 1);
    entries.push_back({std::string(fields[0]), std::string(fields[1])});
  }
  return entries;
}

std::string format_tsv_entries(const TextStore& store) {
  std::string out;
  for (const auto& e : store) {
    out += e.id;
    out += '\t';
    out += e.text;
    out += '\n';
  }
  return out;
}

QuerySet load_queries(const std::filesystem::path& path) {
  return QuerySet(parse_tsv_entries(textio::read_file(path)));
}

Collection load_collection(const std::filesystem::path& path) {
  return Collection(parse_tsv_entries(textio::read_file(path)));
}

// ---------------------------------------------------------------------------
// Qrels

void QrelSet::add(const std::string& query_id, const std::string& doc_id, int relevance) {
  if (relevance < 0)
    throw Error(ErrorCode::NegativeRelevance, query_id + " " + doc_id);
  auto& judged = data_[query_id];
  if (!judged.emplace(doc_id, relevance).second)
    throw Error(ErrorCode::DuplicatePair, query_id + " " + doc_id);
}

const QrelSet::Judgments* QrelSet::find(std::string_view query_id) const {
  auto it = data_.find(query_id);
  return it == data_.end() ? nullptr : &it->second;
}

std::unordered_set<std::string> QrelSet::positives(std::string_view query_id,
                                                   int min_relevance) const {
  std::unordered_set<std::string> out;
  if (const auto* judged = find(query_id)) {
    for (const auto& [doc, rel] : *judged)
      if (rel >= min_relevance) out.insert(doc);
  }
  return out;
}

QrelSet parse_qrels(std::string_view content) {
  QrelSet qrels;
  auto lines = textio::split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    auto fields = textio::split_ws(lines[n]);
    if (fields.empty()) continue;
    if (fields.size() != 4)
      throw Error(ErrorCode::MalformedLine, "expected `qid 0 docid rel`", n + 1);
    auto rel = textio::parse_int(fields[3]);
    if (!rel || *rel > std::numeric_limits<int>::max() ||
        *rel < std::numeric_limits<int>::min())
      throw Error(ErrorCode::MalformedLine, "relevance is not an integer", n + 1);
    try {
      qrels.add(std::string(fields[0]), std::string(fields[2]), static_cast<int>(*rel));
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), n + 1);
    }
  }
  return qrels;
}

QrelSet load_qrels(const std::filesystem::path& path) {
  return parse_qrels(textio::read_file(path));
}

std::string format_qrels(const QrelSet& qrels) {
  std::string out;
  for (const auto& [qid, judged] : qrels.data()) {
    for (const auto& [doc, rel] : judged) {
      out += qid;
      out += " 0 ";
      out += doc;
      out += ' ';
      out += std::to_string(rel);
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runs

void RunSet::set(const std::string& query_id, Ranking entries) {
  std::sort(entries.begin(), entries.end(),
            [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
  std::unordered_set<std::string_view> docs;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].rank != i + 1)
      throw Error(ErrorCode::NonContiguousRanks,
                  query_id + ": expected rank " + std::to_string(i + 1) + ", got " +
                      std::to_string(entries[i].rank));
    if (!docs.insert(entries[i].doc_id).second)
      throw Error(ErrorCode::DuplicateDocForQuery, query_id + " " + entries[i].doc_id);
    if (i > 0 && entries[i].score > entries[i - 1].score)
      throw Error(ErrorCode::NonMonotonicScores,
                  query_id + ": score increases at rank " + std::to_string(i + 1));
  }
  data_[query_id] = std::move(entries);
}

const Ranking* RunSet::find(std::string_view query_id) const {
  auto it = data_.find(query_id);
  return it == data_.end() ? nullptr : &it->second;
}

Ranking make_ranking(std::span<const std::pair<std::string, double>> scored) {
  Ranking ranking;
  ranking.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i)
    ranking.push_back({scored[i].first, i + 1, scored[i].second});
  return ranking;
}

RunSet parse_run(std::string_view content) {
  struct Pending {
    Ranking entries;
    std::size_t first_line = 0;
  };
  std::map<std::string, Pending, std::less<>> pending;
  std::optional<std::string> tag;
  auto lines = textio::split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    auto fields = textio::split_ws(lines[n]);
    if (fields.empty()) continue;
    if (fields.size() != 6)
      throw Error(ErrorCode::MalformedLine, "expected `qid Q0 docid rank score tag`", n + 1);
    auto rank = textio::parse_int(fields[3]);
    auto score = textio::parse_double(fields[4]);
    if (!rank || *rank < 0)
      throw Error(ErrorCode::MalformedLine, "rank is not a non-negative integer", n + 1);
    if (!score) throw Error(ErrorCode::MalformedLine, "score is not a number", n + 1);
    if (!tag) {
      tag = std::string(fields[5]);
    } else if (*tag != fields[5]) {
      throw Error(ErrorCode::InconsistentRunTag, std::string(fields[5]), n + 1);
    }
    auto& p = pending[std::string(fields[0])];
    if (p.entries.empty()) p.first_line = n + 1;
    p.entries.push_back({std::string(fields[2]), static_cast<std::size_t>(*rank), *score});
  }
  RunSet run(tag.value_or(""));
  for (auto& [qid, p] : pending) {
    try {
      run.set(qid, std::move(p.entries));
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), p.first_line);
    }
  }
  return run;
}

RunSet load_run(const std::filesystem::path& path) {
  return parse_run(textio::read_file(path));
}

std::string format_run(const RunSet& run) {
  std::string out;
  const std::string tag = run.tag().empty() ? "run" : run.tag();
  for (const auto& [qid, ranking] : run.data()) {
    for (const auto& e : ranking) {
      out += qid;
      out += " Q0 ";
      out += e.doc_id;
      out += ' ';
      out += std::to_string(e.rank);
      out += ' ';
      out += textio::format_double(e.score);
      out += ' ';
      out += tag;
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings

EmbeddingSet::EmbeddingSet(std::size_t dim, std::vector<std::string> ids,
                           std::vector<float> data)
    : dim_(dim), ids_(std::move(ids)), data_(std::move(data)) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "embedding dim must be positive");
  if (data_.size() != ids_.size() * dim_)
    throw Error(ErrorCode::SizeMismatch, "matrix size does not match ids x dim");
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) throw Error(ErrorCode::InvalidArgument, "empty embedding id");
    if (!index_.emplace(ids_[i], i).second) throw Error(ErrorCode::DuplicateId, ids_[i]);
  }
}

std::optional<std::size_t> EmbeddingSet::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> EmbeddingSet::row(std::string_view id) const {
  auto i = find(id);
  if (!i) throw Error(ErrorCode::UnknownId, std::string(id));
  return row(*i);
}

std::filesystem::path default_ids_path(const std::filesystem::path& bin_path) {
  auto p = bin_path;
  p.replace_extension(".ids");
  return p;
}

namespace {

template <typename T>
T read_le(const char* p) {
  T v{};
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<T>(static_cast<std::uint8_t>(p[i])) << (8 * i);
  return v;
}

template <typename T>
void append_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

EmbeddingSet decode_embeddings(std::string_view bin, std::string_view ids_text) {
  if (bin.substr(0, 8) != EmbeddingSet::kMagic)
    throw Error(ErrorCode::BadMagic, "missing SHFTEMB1 header");
  if (bin.size() < EmbeddingSet::kHeaderBytes)
    throw Error(ErrorCode::SizeMismatch, "truncated header");
  const auto version = read_le<std::uint32_t>(bin.data() + 8);
  if (version != EmbeddingSet::kVersion)
    throw Error(ErrorCode::UnsupportedVersion, std::to_string(version));
  const auto dim = read_le<std::uint32_t>(bin.data() + 12);
  const auto count = read_le<std::uint64_t>(bin.data() + 16);
  if (dim == 0) throw Error(ErrorCode::SizeMismatch, "dim is zero");
  const auto payload = bin.size() - EmbeddingSet::kHeaderBytes;
  if (count > payload / 4 / dim || payload != count * dim * 4)
    throw Error(ErrorCode::SizeMismatch,
                "payload " + std::to_string(payload) + " bytes, expected count*dim*4");

  std::vector<std::string> ids;
  for (auto line : textio::split_lines(ids_text)) ids.emplace_back(line);
  if (ids.size() != count)
    throw Error(ErrorCode::IdCountMismatch,
                std::to_string(ids.size()) + " ids for count " + std::to_string(count));

  std::vector<float> data(count * dim);
  const char* p = bin.data() + EmbeddingSet::kHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i, p += 4)
    data[i] = std::bit_cast<float>(read_le<std::uint32_t>(p));
  return EmbeddingSet(dim, std::move(ids), std::move(data));
}

EmbeddingSet load_embeddings(const std::filesystem::path& bin_path,
                             const std::filesystem::path& ids_path) {
  return decode_embeddings(textio::read_file(bin_path), textio::read_file(ids_path));
}

std::string encode_embeddings(const EmbeddingSet& emb) {
  std::string out;
  out.reserve(EmbeddingSet::kHeaderBytes + emb.data().size() * 4);
  out.append(EmbeddingSet::kMagic);
  append_le<std::uint32_t>(out, EmbeddingSet::kVersion);
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(emb.dim()));
  append_le<std::uint64_t>(out, emb.size());
  for (float v : emb.data()) append_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

std::string format_embedding_ids(const EmbeddingSet& emb) {
  std::string out;
  for (const auto& id : emb.ids()) {
    out += id;
    out += '\n';
  }
  return out;
}

void write_embeddings(const EmbeddingSet& emb, const std::filesystem::path& bin_path,
                      const std::filesystem::path& ids_path) {
  textio::write_file(bin_path, encode_embeddings(emb));
  textio::write_file(ids_path, format_embedding_ids(emb));
}

}  // namespace qshift
