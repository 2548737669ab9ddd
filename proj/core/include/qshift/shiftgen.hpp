#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qshift/corpus.hpp"
#include "qshift/kmeans.hpp"

namespace qshift {

struct Cluster {
  std::string name;
  std::vector<std::string> train;
  std::vector<std::string> test;

  std::size_t size() const noexcept { return train.size() + test.size(); }
  /// train followed by test.
  std::vector<std::string> all_ids() const;

  bool operator==(const Cluster&) const = default;
};

/// Named clusters with disjoint train/test id lists. Before splitting, a
/// cluster's members live in `train` and `test` is empty.
struct ShiftManifest {
  std::string shift;
  std::uint64_t seed = 0;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<Cluster> clusters;

  const Cluster* find(std::string_view name) const;
  bool operator==(const ShiftManifest&) const = default;
};

/// Checks that all id lists are pairwise disjoint and, when `queries` is
/// given, that every id exists there. Throws InvalidManifest.
void validate_manifest(const ShiftManifest& manifest, const QuerySet* queries = nullptr);

std::string manifest_to_json(const ShiftManifest& manifest);
ShiftManifest manifest_from_json(std::string_view text);
void save_manifest(const ShiftManifest& manifest, const std::filesystem::path& path);
ShiftManifest load_manifest(const std::filesystem::path& path);
/// `<dir>/<cluster>.train.ids` and `<dir>/<cluster>.test.ids`, one id per line.
std::vector<std::filesystem::path> write_cluster_id_files(const ShiftManifest& manifest,
                                                          const std::filesystem::path& dir);

// --- topic shift ----------------------------------------------------------

/// Grows one group per seed micro-cluster. While some group is below
/// `target_size` and unassigned micro-clusters remain, the smallest group
/// (ties to the earlier seed) absorbs the unassigned micro-cluster whose
/// centroid is nearest to that group's seed centroid (ties to the lower
/// cluster index). `row_ids[i]` names the query in k-means row i.
/// Pool exhaustion is recorded under params["warnings"].
ShiftManifest expand_clusters(const KMeansModel& model, std::span<const std::string> row_ids,
                              std::span<const std::size_t> seeds, std::size_t target_size);

// --- WH-word shift ------------------------------------------------------

enum class WhClass { Wha, How, Who };

std::string_view to_string(WhClass c) noexcept;

struct WhRules {
  std::vector<std::string> wha{"what", "definition"};
  std::vector<std::string> how{"how"};
  std::vector<std::string> who{"who", "when", "where", "which"};

  /// Keywords must be single lowercase tokens and the lists must not share
  /// any keyword. Throws InvalidArgument.
  void validate() const;
};

/// First token (left to right) found in any keyword list decides the class.
std::optional<WhClass> wh_assign(std::string_view query_text, const WhRules& rules = {});

/// Clusters wha/how/who over all queries; unmatched queries are left out.
ShiftManifest wh_split(const QuerySet& queries, const WhRules& rules = {});

// --- length shift -------------------------------------------------------

/// Lower median of the token counts.
std::size_t median_length(const QuerySet& queries);

/// short: token count <= boundary, long: > boundary. Without a boundary the
/// lower median is used. Throws EmptyInput.
ShiftManifest length_split(const QuerySet& queries, std::optional<std::size_t> boundary);

// --- splitting and experiment plans ----------------------------------------

/// Per cluster: sort all member ids, Fisher-Yates shuffle with a generator
/// seeded once by `seed` (clusters in manifest order), take the first
/// test_sizes[i] as test and the rest as train. Both lists are stored sorted.
/// Throws TestSizeTooLarge, InvalidArgument.
ShiftManifest make_train_test(const ShiftManifest& manifest,
                              std::span<const std::size_t> test_sizes, std::uint64_t seed);

/// Name of the training set that excludes `cluster`.
std::string complement_name(std::string_view cluster);

struct Experiment {
  std::string train_set_name;
  std::size_t held_out = 0;  // cluster index never seen in training
  std::vector<std::string> train_ids;
};

struct EvalSet {
  std::string name;
  std::vector<std::string> query_ids;
};

struct ExperimentPlan {
  std::vector<Experiment> experiments;
  std::vector<EvalSet> eval_sets;

  const Experiment* find(std::string_view train_set_name) const;
};

/// One experiment per cluster, trained on the union of every other
/// cluster's train ids and evaluated on every cluster's test ids.
/// Throws TooFewClusters.
ExperimentPlan leave_one_out_plan(const ShiftManifest& manifest);

}  // namespace qshift
