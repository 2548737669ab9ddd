#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qshift/corpus.hpp"
#include "qshift/metrics.hpp"
#include "qshift/shiftgen.hpp"
#include "qshift/stats.hpp"

namespace qshift {

struct EvalCell {
  std::vector<double> values;         // aligned with the column's query ids
  std::vector<std::uint8_t> missing;  // 1 where the run had no ranking for the query
  std::size_t missing_count() const;
};

/// Per-query metric values for every (training set, eval set) pair.
struct EvalMatrix {
  std::string metric;
  std::vector<std::string> rows;                    // training-set names
  std::vector<std::string> cols;                    // eval-set names
  std::vector<std::vector<std::string>> col_queries;
  /// For each column, the row whose model never saw that cluster.
  std::vector<std::size_t> zero_shot_row;
  std::vector<std::vector<EvalCell>> cells;         // [row][col]

  const EvalCell& cell(std::size_t row, std::size_t col) const { return cells[row][col]; }
};

/// Mean computed as x0 + sum(x - x0) / n, so a constant sequence yields
/// exactly that constant.
double stable_mean(std::span<const double> values);

/// Runs are keyed by training-set name. Queries absent from a run get the
/// metric's worst value and are flagged. Throws MissingRun, MissingQrels.
EvalMatrix build_matrix(const ExperimentPlan& plan, const std::map<std::string, RunSet>& runs,
                        const QrelSet& qrels, const MetricSpec& metric, int min_relevance = 1);

struct ShiftSummary {
  std::string eval_set;
  double avg_in = 0.0;
  double out = 0.0;
  double rel_loss = 0.0;  // fraction, (avg_in - out) / avg_in
  std::optional<TTestResult> t_test;  // empty below two queries
  std::vector<double> cell_means;     // one per matrix row
  std::size_t queries = 0;
  std::size_t missing = 0;            // flagged queries across the column

  bool operator==(const ShiftSummary& other) const;
};

/// (avg_in - out) / avg_in. Throws ZeroAvgIn when avg_in == 0.
double relative_loss(double avg_in, double out);

/// Column-wise Avg In (equal weight per in-domain model), Out (zero-shot
/// model) and Rel Loss, with a paired t-test of each query's in-domain mean
/// against its zero-shot value. Throws NonSquareMatrix, ZeroAvgIn.
std::vector<ShiftSummary> summarize(const EvalMatrix& matrix);

struct QueryOutcome {
  std::string query_id;
  std::size_t column = 0;
  double in_domain = 0.0;  // mean over the in-domain models
  double zero_shot = 0.0;
};

/// One entry per (column, query) in column order.
std::vector<QueryOutcome> query_outcomes(const EvalMatrix& matrix);

enum class SummaryFormat { Csv, Json };

std::string summary_to_csv(std::span<const ShiftSummary> summaries);
/// `extra` keys are written first (e.g. provenance).
std::string summary_to_json(std::span<const ShiftSummary> summaries, std::string_view metric,
                            const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());
std::vector<ShiftSummary> summary_from_json(std::string_view text, std::string* metric = nullptr);
void export_summary(std::span<const ShiftSummary> summaries, SummaryFormat format,
                    const std::filesystem::path& path, std::string_view metric = "");

/// Long form with header: train_set, eval_set, query_id, value.
std::string matrix_to_tsv(const EvalMatrix& matrix);
/// Rebuilds a matrix from its long form using the plan for ordering and the
/// zero-shot mapping. Missing flags are not stored in the long form.
EvalMatrix matrix_from_tsv(std::string_view text, const ExperimentPlan& plan,
                           std::string metric = "");

}  // namespace qshift
