#include "qshift/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "qshift/error.hpp"
#include "qshift/textio.hpp"

namespace qshift {

using ojson = nlohmann::ordered_json;

std::size_t EvalCell::missing_count() const {
  std::size_t n = 0;
  for (auto m : missing) n += m;
  return n;
}

double stable_mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double first = values.front();
  double shift = 0.0;
  for (double v : values) shift += v - first;
  return first + shift / static_cast<double>(values.size());
}

EvalMatrix build_matrix(const ExperimentPlan& plan, const std::map<std::string, RunSet>& runs,
                        const QrelSet& qrels, const MetricSpec& metric, int min_relevance) {
  EvalMatrix m;
  m.metric = metric.name();
  for (const auto& e : plan.experiments) {
    if (!runs.contains(e.train_set_name)) throw Error(ErrorCode::MissingRun, e.train_set_name);
    m.rows.push_back(e.train_set_name);
  }
  m.zero_shot_row.assign(plan.eval_sets.size(), plan.experiments.size());
  for (std::size_t i = 0; i < plan.experiments.size(); ++i) {
    const auto h = plan.experiments[i].held_out;
    if (h < m.zero_shot_row.size()) m.zero_shot_row[h] = i;
  }

  std::vector<std::vector<PositiveSet>> positives;
  for (const auto& es : plan.eval_sets) {
    m.cols.push_back(es.name);
    m.col_queries.push_back(es.query_ids);
    auto& col = positives.emplace_back();
    for (const auto& q : es.query_ids) {
      auto p = qrels.positives(q, min_relevance);
      if (p.empty()) throw Error(ErrorCode::MissingQrels, q);
      col.push_back(std::move(p));
    }
  }

  m.cells.resize(m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const auto& run = runs.at(m.rows[i]);
    m.cells[i].resize(m.cols.size());
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      auto& cell = m.cells[i][j];
      const auto& queries = m.col_queries[j];
      cell.values.resize(queries.size());
      cell.missing.assign(queries.size(), 0);
      for (std::size_t q = 0; q < queries.size(); ++q) {
        const Ranking* ranking = run.find(queries[q]);
        if (!ranking) {
          cell.values[q] = metric.worst_value();
          cell.missing[q] = 1;
        } else {
          cell.values[q] = metric.evaluate(*ranking, positives[j][q]);
        }
      }
    }
  }
  return m;
}

double relative_loss(double avg_in, double out) {
  if (avg_in == 0.0) throw Error(ErrorCode::ZeroAvgIn, "relative loss undefined for Avg In = 0");
  return (avg_in - out) / avg_in;
}

namespace {

void check_square(const EvalMatrix& m) {
  if (m.rows.size() != m.cols.size() || m.cells.size() != m.rows.size() ||
      m.zero_shot_row.size() != m.cols.size() || m.col_queries.size() != m.cols.size())
    throw Error(ErrorCode::NonSquareMatrix,
                std::to_string(m.rows.size()) + " rows x " + std::to_string(m.cols.size()) +
                    " columns");
  std::vector<bool> used(m.rows.size(), false);
  for (auto r : m.zero_shot_row) {
    if (r >= m.rows.size() || used[r])
      throw Error(ErrorCode::NonSquareMatrix, "zero-shot rows do not pair rows with columns");
    used[r] = true;
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    if (m.cells[i].size() != m.cols.size())
      throw Error(ErrorCode::NonSquareMatrix, "ragged matrix row " + m.rows[i]);
    for (std::size_t j = 0; j < m.cols.size(); ++j)
      if (m.cells[i][j].values.size() != m.col_queries[j].size())
        throw Error(ErrorCode::NonSquareMatrix, "cell size does not match column " + m.cols[j]);
  }
}

// Per-query mean over the in-domain rows of column j.
std::vector<double> in_domain_means(const EvalMatrix& m, std::size_t j) {
  const auto n = m.col_queries[j].size();
  std::vector<double> means(n);
  std::vector<double> scratch;
  for (std::size_t q = 0; q < n; ++q) {
    scratch.clear();
    for (std::size_t i = 0; i < m.rows.size(); ++i)
      if (i != m.zero_shot_row[j]) scratch.push_back(m.cells[i][j].values[q]);
    means[q] = stable_mean(scratch);
  }
  return means;
}

}  // namespace

std::vector<ShiftSummary> summarize(const EvalMatrix& matrix) {
  check_square(matrix);
  std::vector<ShiftSummary> out;
  for (std::size_t j = 0; j < matrix.cols.size(); ++j) {
    ShiftSummary s;
    s.eval_set = matrix.cols[j];
    s.queries = matrix.col_queries[j].size();
    if (s.queries == 0)
      throw Error(ErrorCode::InvalidArgument, "eval set " + s.eval_set + " has no queries");
    const auto zs = matrix.zero_shot_row[j];
    std::vector<double> in_means;
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
      const auto& cell = matrix.cells[i][j];
      s.cell_means.push_back(stable_mean(cell.values));
      s.missing += cell.missing_count();
      if (i != zs) in_means.push_back(s.cell_means.back());
    }
    s.out = s.cell_means[zs];
    s.avg_in = stable_mean(in_means);
    try {
      s.rel_loss = relative_loss(s.avg_in, s.out);
    } catch (const Error&) {
      throw Error(ErrorCode::ZeroAvgIn, "Avg In is 0 for " + s.eval_set);
    }
    if (s.queries >= 2)
      s.t_test = paired_t_test(in_domain_means(matrix, j), matrix.cells[zs][j].values);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<QueryOutcome> query_outcomes(const EvalMatrix& matrix) {
  check_square(matrix);
  std::vector<QueryOutcome> out;
  for (std::size_t j = 0; j < matrix.cols.size(); ++j) {
    const auto in = in_domain_means(matrix, j);
    const auto& zero = matrix.cells[matrix.zero_shot_row[j]][j].values;
    for (std::size_t q = 0; q < in.size(); ++q)
      out.push_back({matrix.col_queries[j][q], j, in[q], zero[q]});
  }
  return out;
}

bool ShiftSummary::operator==(const ShiftSummary& o) const {
  auto same_t = [](const std::optional<TTestResult>& a, const std::optional<TTestResult>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->t_statistic == b->t_statistic && a->degrees_of_freedom == b->degrees_of_freedom &&
           a->p_value == b->p_value && a->mean_difference == b->mean_difference;
  };
  return eval_set == o.eval_set && avg_in == o.avg_in && out == o.out &&
         rel_loss == o.rel_loss && same_t(t_test, o.t_test) && cell_means == o.cell_means &&
         queries == o.queries && missing == o.missing;
}

// ---------------------------------------------------------------------------
// export

namespace {

std::string format_p(double p) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), p, std::chars_format::general, 4);
  (void)ec;
  return std::string(buf, ptr);
}

ojson number_or_sentinel(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double from_number_or_sentinel(const ojson& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

}  // namespace

std::string summary_to_csv(std::span<const ShiftSummary> summaries) {
  std::string out = "measure";
  for (const auto& s : summaries) out += "," + s.eval_set;
  out += '\n';
  if (summaries.empty()) return out;
  auto row = [&](std::string_view label, auto render) {
    out += label;
    for (const auto& s : summaries) out += "," + render(s);
    out += '\n';
  };
  row("AvgIn", [](const ShiftSummary& s) { return textio::format_fixed(s.avg_in, 4); });
  row("Out", [](const ShiftSummary& s) { return textio::format_fixed(s.out, 4); });
  row("RelLoss(%)",
      [](const ShiftSummary& s) { return textio::format_fixed(100.0 * s.rel_loss, 1); });
  row("p", [](const ShiftSummary& s) {
    return s.t_test ? format_p(s.t_test->p_value) : std::string("NA");
  });
  row("Missing", [](const ShiftSummary& s) { return std::to_string(s.missing); });
  return out;
}

std::string summary_to_json(std::span<const ShiftSummary> summaries, std::string_view metric,
                            const ojson& extra) {
  ojson j = extra.is_object() ? extra : ojson::object();
  j["metric"] = metric;
  j["summaries"] = ojson::array();
  for (const auto& s : summaries) {
    ojson sj;
    sj["eval_set"] = s.eval_set;
    sj["avg_in"] = s.avg_in;
    sj["out"] = s.out;
    sj["rel_loss"] = s.rel_loss;
    if (s.t_test) {
      sj["t_test"] = {{"t", number_or_sentinel(s.t_test->t_statistic)},
                      {"dof", s.t_test->degrees_of_freedom},
                      {"p", s.t_test->p_value},
                      {"mean_difference", s.t_test->mean_difference}};
    } else {
      sj["t_test"] = nullptr;
    }
    sj["cell_means"] = s.cell_means;
    sj["queries"] = s.queries;
    sj["missing"] = s.missing;
    j["summaries"].push_back(std::move(sj));
  }
  return j.dump(2) + "\n";
}

std::vector<ShiftSummary> summary_from_json(std::string_view text, std::string* metric) {
  std::vector<ShiftSummary> out;
  try {
    const auto j = ojson::parse(text);
    if (metric) *metric = j.at("metric").get<std::string>();
    for (const auto& sj : j.at("summaries")) {
      ShiftSummary s;
      s.eval_set = sj.at("eval_set").get<std::string>();
      s.avg_in = sj.at("avg_in").get<double>();
      s.out = sj.at("out").get<double>();
      s.rel_loss = sj.at("rel_loss").get<double>();
      if (!sj.at("t_test").is_null()) {
        const auto& tj = sj.at("t_test");
        TTestResult t;
        t.t_statistic = from_number_or_sentinel(tj.at("t"));
        t.degrees_of_freedom = tj.at("dof").get<std::size_t>();
        t.p_value = tj.at("p").get<double>();
        t.mean_difference = tj.at("mean_difference").get<double>();
        s.t_test = t;
      }
      s.cell_means = sj.at("cell_means").get<std::vector<double>>();
      s.queries = sj.at("queries").get<std::size_t>();
      s.missing = sj.at("missing").get<std::size_t>();
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad summary json: ") + e.what());
  }
  return out;
}

void export_summary(std::span<const ShiftSummary> summaries, SummaryFormat format,
                    const std::filesystem::path& path, std::string_view metric) {
  textio::write_file(path, format == SummaryFormat::Csv ? summary_to_csv(summaries)
                                                        : summary_to_json(summaries, metric));
}

std::string matrix_to_tsv(const EvalMatrix& matrix) {
  std::string out = "train_set\teval_set\tquery_id\tvalue\n";
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    for (std::size_t j = 0; j < matrix.cols.size(); ++j) {
      const auto& cell = matrix.cells[i][j];
      for (std::size_t q = 0; q < cell.values.size(); ++q) {
        out += matrix.rows[i];
        out += '\t';
        out += matrix.cols[j];
        out += '\t';
        out += matrix.col_queries[j][q];
        out += '\t';
        out += textio::format_double(cell.values[q]);
        out += '\n';
      }
    }
  }
  return out;
}

EvalMatrix matrix_from_tsv(std::string_view text, const ExperimentPlan& plan,
                           std::string metric) {
  EvalMatrix m;
  m.metric = std::move(metric);
  std::unordered_map<std::string, std::size_t> row_index, col_index;
  for (const auto& e : plan.experiments) {
    row_index.emplace(e.train_set_name, m.rows.size());
    m.rows.push_back(e.train_set_name);
  }
  std::vector<std::unordered_map<std::string, std::size_t>> query_index;
  for (const auto& es : plan.eval_sets) {
    col_index.emplace(es.name, m.cols.size());
    m.cols.push_back(es.name);
    m.col_queries.push_back(es.query_ids);
    auto& qi = query_index.emplace_back();
    for (std::size_t q = 0; q < es.query_ids.size(); ++q) qi.emplace(es.query_ids[q], q);
  }
  m.zero_shot_row.assign(m.cols.size(), m.rows.size());
  for (std::size_t i = 0; i < plan.experiments.size(); ++i)
    if (plan.experiments[i].held_out < m.cols.size()) m.zero_shot_row[plan.experiments[i].held_out] = i;

  const auto nan = std::numeric_limits<double>::quiet_NaN();
  m.cells.resize(m.rows.size());
  for (auto& row : m.cells) {
    row.resize(m.cols.size());
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      row[j].values.assign(m.col_queries[j].size(), nan);
      row[j].missing.assign(m.col_queries[j].size(), 0);
    }
  }

  const auto lines = textio::split_lines(text);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto f = textio::split(lines[n], '\t');
    if (f.size() != 4) throw Error(ErrorCode::MalformedLine, "expected 4 fields", n + 1);
    const auto r = row_index.find(std::string(f[0]));
    const auto c = col_index.find(std::string(f[1]));
    if (r == row_index.end() || c == col_index.end())
      throw Error(ErrorCode::ClusterMismatch, "unknown row/column in matrix", n + 1);
    const auto q = query_index[c->second].find(std::string(f[2]));
    if (q == query_index[c->second].end())
      throw Error(ErrorCode::UnknownId, std::string(f[2]), n + 1);
    const auto v = textio::parse_double(f[3]);
    if (!v) throw Error(ErrorCode::MalformedLine, "value is not a number", n + 1);
    m.cells[r->second][c->second].values[q->second] = *v;
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    for (std::size_t j = 0; j < m.cols.size(); ++j)
      for (double v : m.cells[i][j].values)
        if (std::isnan(v))
          throw Error(ErrorCode::InvalidArgument,
                      "matrix has no value for some query in " + m.rows[i] + " x " + m.cols[j]);
  return m;
}

}  // namespace qshift
