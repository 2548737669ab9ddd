#include "qshift/shiftgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

#include "qshift/error.hpp"
#include "qshift/seeding.hpp"

namespace qshift {

std::vector<std::string> Cluster::all_ids() const {
  std::vector<std::string> ids = train;
  ids.insert(ids.end(), test.begin(), test.end());
  return ids;
}

const Cluster* ShiftManifest::find(std::string_view name) const {
  for (const auto& c : clusters)
    if (c.name == name) return &c;
  return nullptr;
}

void validate_manifest(const ShiftManifest& manifest, const QuerySet* queries) {
  std::unordered_set<std::string_view> names;
  std::unordered_set<std::string_view> seen;
  for (const auto& c : manifest.clusters) {
    if (c.name.empty()) throw Error(ErrorCode::InvalidManifest, "cluster with empty name");
    if (!names.insert(c.name).second)
      throw Error(ErrorCode::InvalidManifest, "duplicate cluster name " + c.name);
    for (const auto* list : {&c.train, &c.test}) {
      for (const auto& id : *list) {
        if (!seen.insert(id).second)
          throw Error(ErrorCode::InvalidManifest, "id " + id + " appears more than once");
        if (queries && !queries->contains(id))
          throw Error(ErrorCode::InvalidManifest, "id " + id + " is not in the query set");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// topic shift

ShiftManifest expand_clusters(const KMeansModel& model, std::span<const std::string> row_ids,
                              std::span<const std::size_t> seeds, std::size_t target_size) {
  if (row_ids.size() != model.assignment.size())
    throw Error(ErrorCode::InvalidArgument, "row ids do not match the clustered rows");
  if (target_size == 0) throw Error(ErrorCode::InvalidArgument, "target size must be >= 1");
  std::vector<bool> used(model.k, false);
  for (auto s : seeds) {
    if (s >= model.k) throw Error(ErrorCode::InvalidArgument, "seed cluster out of range");
    if (used[s]) throw Error(ErrorCode::InvalidArgument, "seed clusters must be distinct");
    used[s] = true;
  }

  const auto sizes = model.cluster_sizes();
  const std::size_t m = seeds.size();
  std::vector<std::vector<std::size_t>> members(m);
  std::vector<std::size_t> group_size(m, 0);
  for (std::size_t g = 0; g < m; ++g) {
    members[g].push_back(seeds[g]);
    group_size[g] = sizes[seeds[g]];
  }

  auto distance = [&](std::size_t a, std::size_t b) {
    const auto ca = model.centroid(a);
    const auto cb = model.centroid(b);
    double s = 0.0;
    for (std::size_t d = 0; d < model.dim; ++d) s += (ca[d] - cb[d]) * (ca[d] - cb[d]);
    return std::sqrt(s);
  };

  std::size_t pool = model.k - m;
  bool exhausted = false;
  while (m > 0) {
    const bool satisfied = std::all_of(group_size.begin(), group_size.end(),
                                       [&](std::size_t s) { return s >= target_size; });
    if (satisfied) break;
    if (pool == 0) {
      exhausted = true;
      break;
    }
    const auto g = static_cast<std::size_t>(
        std::min_element(group_size.begin(), group_size.end()) - group_size.begin());
    std::size_t pick = model.k;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model.k; ++c) {
      if (used[c]) continue;
      const double d = distance(seeds[g], c);
      if (d < best) {
        best = d;
        pick = c;
      }
    }
    used[pick] = true;
    --pool;
    members[g].push_back(pick);
    group_size[g] += sizes[pick];
  }

  std::vector<long> group_of(model.k, -1);
  for (std::size_t g = 0; g < m; ++g)
    for (auto c : members[g]) group_of[c] = static_cast<long>(g);

  ShiftManifest manifest;
  manifest.shift = "topic";
  manifest.clusters.resize(m);
  for (std::size_t g = 0; g < m; ++g) manifest.clusters[g].name = "C" + std::to_string(g);
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    const long g = group_of[model.assignment[i]];
    if (g >= 0) manifest.clusters[static_cast<std::size_t>(g)].train.push_back(row_ids[i]);
  }

  auto& p = manifest.params;
  p["target_size"] = target_size;
  p["seed_clusters"] = std::vector<std::size_t>(seeds.begin(), seeds.end());
  p["members"] = members;
  p["group_sizes"] = group_size;
  p["warnings"] = nlohmann::ordered_json::array();
  if (exhausted)
    p["warnings"].push_back("micro-cluster pool exhausted before every group reached target_size");
  return manifest;
}

// ---------------------------------------------------------------------------
// WH words

std::string_view to_string(WhClass c) noexcept {
  switch (c) {
    case WhClass::Wha: return "wha";
    case WhClass::How: return "how";
    case WhClass::Who: return "who";
  }
  return "?";
}

void WhRules::validate() const {
  std::set<std::string> all;
  for (const auto* list : {&wha, &how, &who}) {
    if (list->empty()) throw Error(ErrorCode::InvalidArgument, "empty WH keyword list");
    for (const auto& kw : *list) {
      const auto toks = tokenize(kw);
      if (toks.size() != 1 || toks.front() != kw)
        throw Error(ErrorCode::InvalidArgument,
                    "WH keyword '" + kw + "' is not a single lowercase token");
      if (!all.insert(kw).second)
        throw Error(ErrorCode::InvalidArgument, "WH keyword '" + kw + "' is in several lists");
    }
  }
}

std::optional<WhClass> wh_assign(std::string_view query_text, const WhRules& rules) {
  auto in = [](const std::vector<std::string>& list, const std::string& tok) {
    return std::find(list.begin(), list.end(), tok) != list.end();
  };
  for (const auto& tok : tokenize(query_text)) {
    if (in(rules.wha, tok)) return WhClass::Wha;
    if (in(rules.how, tok)) return WhClass::How;
    if (in(rules.who, tok)) return WhClass::Who;
  }
  return std::nullopt;
}

ShiftManifest wh_split(const QuerySet& queries, const WhRules& rules) {
  rules.validate();
  ShiftManifest manifest;
  manifest.shift = "wh";
  manifest.clusters = {{"wha", {}, {}}, {"how", {}, {}}, {"who", {}, {}}};
  std::size_t unmatched = 0;
  for (const auto& q : queries) {
    auto c = wh_assign(q.text, rules);
    if (!c) {
      ++unmatched;
      continue;
    }
    manifest.clusters[static_cast<std::size_t>(*c)].train.push_back(q.id);
  }
  auto& p = manifest.params;
  p["keywords"] = {{"wha", rules.wha}, {"how", rules.how}, {"who", rules.who}};
  p["unmatched"] = unmatched;
  return manifest;
}

// ---------------------------------------------------------------------------
// length

std::size_t median_length(const QuerySet& queries) {
  if (queries.empty()) throw Error(ErrorCode::EmptyInput, "no queries");
  std::vector<std::size_t> lengths;
  lengths.reserve(queries.size());
  for (const auto& q : queries) lengths.push_back(tokenize(q.text).size());
  const auto mid = lengths.begin() + static_cast<long>((lengths.size() - 1) / 2);
  std::nth_element(lengths.begin(), mid, lengths.end());
  return *mid;
}

ShiftManifest length_split(const QuerySet& queries, std::optional<std::size_t> boundary) {
  if (queries.empty()) throw Error(ErrorCode::EmptyInput, "no queries");
  const std::size_t cut = boundary ? *boundary : median_length(queries);
  ShiftManifest manifest;
  manifest.shift = "length";
  manifest.clusters = {{"short", {}, {}}, {"long", {}, {}}};
  for (const auto& q : queries) {
    const auto len = tokenize(q.text).size();
    manifest.clusters[len <= cut ? 0 : 1].train.push_back(q.id);
  }
  manifest.params["boundary"] = cut;
  manifest.params["boundary_source"] = boundary ? "fixed" : "lower_median";
  return manifest;
}

// ---------------------------------------------------------------------------
// splits and plans

ShiftManifest make_train_test(const ShiftManifest& manifest,
                              std::span<const std::size_t> test_sizes, std::uint64_t seed) {
  if (test_sizes.size() != manifest.clusters.size())
    throw Error(ErrorCode::InvalidArgument, "need one test size per cluster");
  ShiftManifest out = manifest;
  out.seed = seed;
  Rng rng(seed);
  for (std::size_t c = 0; c < out.clusters.size(); ++c) {
    auto ids = manifest.clusters[c].all_ids();
    const std::size_t t = test_sizes[c];
    if (t > ids.size())
      throw Error(ErrorCode::TestSizeTooLarge,
                  manifest.clusters[c].name + ": test size " + std::to_string(t) + " > " +
                      std::to_string(ids.size()));
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      const auto j = i + rng.uniform_index(ids.size() - i);
      std::swap(ids[i], ids[j]);
    }
    auto& cluster = out.clusters[c];
    cluster.test.assign(ids.begin(), ids.begin() + static_cast<long>(t));
    cluster.train.assign(ids.begin() + static_cast<long>(t), ids.end());
    std::sort(cluster.test.begin(), cluster.test.end());
    std::sort(cluster.train.begin(), cluster.train.end());
  }
  out.params["test_sizes"] = std::vector<std::size_t>(test_sizes.begin(), test_sizes.end());
  return out;
}

std::string complement_name(std::string_view cluster) {
  return "without_" + std::string(cluster);
}

const Experiment* ExperimentPlan::find(std::string_view train_set_name) const {
  for (const auto& e : experiments)
    if (e.train_set_name == train_set_name) return &e;
  return nullptr;
}

ExperimentPlan leave_one_out_plan(const ShiftManifest& manifest) {
  if (manifest.clusters.size() < 2)
    throw Error(ErrorCode::TooFewClusters,
                std::to_string(manifest.clusters.size()) + " cluster(s); need at least 2");
  ExperimentPlan plan;
  for (std::size_t i = 0; i < manifest.clusters.size(); ++i) {
    Experiment e;
    e.train_set_name = complement_name(manifest.clusters[i].name);
    e.held_out = i;
    for (std::size_t j = 0; j < manifest.clusters.size(); ++j) {
      if (j == i) continue;
      const auto& train = manifest.clusters[j].train;
      e.train_ids.insert(e.train_ids.end(), train.begin(), train.end());
    }
    if (e.train_ids.empty())
      throw Error(ErrorCode::TooFewClusters,
                  e.train_set_name + " has no training queries");
    plan.experiments.push_back(std::move(e));
    plan.eval_sets.push_back({manifest.clusters[i].name, manifest.clusters[i].test});
  }
  return plan;
}

}  // namespace qshift
