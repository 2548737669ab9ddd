// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "qshift/bm25.hpp"
#include "qshift/harness.hpp"
#include "qshift/indicators.hpp"
#include "qshift/kmeans.hpp"
#include "qshift/metrics.hpp"
#include "qshift/spread.hpp"
#include "qshift/stats.hpp"
#include "qshift/textio.hpp"
#include "synth.hpp"

using namespace qshift;
namespace syn = qshift::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;  // wall-clock limit, part of the criterion
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string tsv_of(const TextStore& store) {
  std::string out;
  for (const auto& e : store) out += e.id + "\t" + e.text + "\n";
  return out;
}

// ---------------------------------------------------------------------------

// (Avg In, Out, printed Rel Loss %) for four rankers over five topic clusters
// and over wha/how/who/short/long.
struct ReportedCell {
  const char* label;
  double avg_in, out, printed;
};

const std::vector<ReportedCell> kReported = {
    {"topic bi-encoder C0", 33.2, 30.4, 8.3},  {"topic bi-encoder C1", 37.2, 30.5, 18.0},
    {"topic bi-encoder C2", 28.5, 25.9, 9.0},  {"topic bi-encoder C3", 21.5, 19.0, 11.5},
    {"topic bi-encoder C4", 21.4, 19.6, 8.6},  {"topic SPLADE C0", 36.8, 34.5, 6.3},
    {"topic SPLADE C1", 38.7, 34.0, 12.2},     {"topic SPLADE C2", 31.2, 30.2, 3.2},
    {"topic SPLADE C3", 26.2, 24.5, 6.4},      {"topic SPLADE C4", 25.0, 24.7, 1.4},
    {"topic ColBERT C0", 39.7, 38.6, 2.7},     {"topic ColBERT C1", 42.3, 38.7, 8.5},
    {"topic ColBERT C2", 34.6, 33.4, 3.4},     {"topic ColBERT C3", 28.8, 27.7, 3.7},
    {"topic ColBERT C4", 27.7, 27.1, 2.2},     {"topic monoBERT C0", 39.4, 38.6, 2.1},
    {"topic monoBERT C1", 42.7, 38.4, 10.2},   {"topic monoBERT C2", 33.4, 31.8, 4.8},
    {"topic monoBERT C3", 27.1, 25.9, 4.5},    {"topic monoBERT C4", 26.3, 25.7, 2.4},
    {"wh bi-encoder wha", 27.8, 23.4, 15.8},   {"wh bi-encoder how", 26.0, 19.6, 24.8},
    {"wh bi-encoder who", 33.1, 27.9, 15.8},   {"len bi-encoder short", 34.0, 29.8, 12.5},
    {"len bi-encoder long", 27.1, 25.2, 7.0},  {"wh SPLADE wha", 30.3, 28.6, 5.5},
    {"wh SPLADE how", 28.9, 21.2, 26.8},       {"wh SPLADE who", 37.7, 32.5, 13.7},
    {"len SPLADE short", 34.9, 33.5, 3.9},     {"len SPLADE long", 30.3, 27.1, 10.4},
    {"wh ColBERT wha", 33.5, 31.8, 5.2},       {"wh ColBERT how", 31.7, 27.3, 14.0},
    {"wh ColBERT who", 40.0, 36.6, 8.6},       {"len ColBERT short", 38.4, 36.4, 5.1},
    {"len ColBERT long", 32.5, 31.6, 2.7},     {"wh monoBERT wha", 33.9, 31.1, 8.3},
    {"wh monoBERT how", 30.5, 26.4, 13.5},     {"wh monoBERT who", 40.1, 37.1, 7.5},
    {"len monoBERT short", 37.7, 32.3, 14.3},  {"len monoBERT long", 32.6, 28.9, 11.3},
};

Outcome rel_loss_arithmetic() {
  // Each cell goes through the full column summary: a 2x2 matrix whose
  // column 0 has the in-domain value on row 1 and the zero-shot value on row 0.
  double worst = 0.0;
  std::string worst_label;
  std::size_t failures = 0;
  for (const auto& cell : kReported) {
    EvalMatrix m;
    m.rows = {"zero", "in"};
    m.cols = {"target", "other"};
    m.col_queries = {{"q"}, {"r"}};
    m.zero_shot_row = {0, 1};
    m.cells.assign(2, std::vector<EvalCell>(2));
    m.cells[0][0].values = {cell.out};
    m.cells[1][0].values = {cell.avg_in};
    m.cells[0][1].values = {1.0};
    m.cells[1][1].values = {1.0};
    for (auto& row : m.cells)
      for (auto& c : row) c.missing = {0};
    const double pct = 100.0 * summarize(m)[0].rel_loss;
    const double dev = std::abs(pct - cell.printed);
    // Inputs are printed to one decimal, so a deviation of exactly 0.2 is in tolerance.
    if (dev > 0.2 + 1e-9) ++failures;
    if (dev > worst) {
      worst = dev;
      worst_label = cell.label;
    }
  }
  const double headline = 100.0 * relative_loss(37.2, 30.5);
  const double how = 100.0 * relative_loss(28.9, 21.2);
  const bool ok = failures == 0 && std::abs(headline - 18.0) <= 0.2 && std::abs(how - 26.8) <= 0.2;
  return {ok, std::to_string(kReported.size()) + " cells, " + std::to_string(failures) +
                  " outside 0.2pp; (37.2,30.5)->" + fmt("%.2f%%", headline) + ", (28.9,21.2)->" +
                  fmt("%.2f%%", how) + "; max dev " + fmt("%.3fpp", worst) + " (" + worst_label +
                  ")"};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(101);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t depth = 1 + rng() % 1500;
    const std::size_t universe = depth + 1 + rng() % 200;
    std::vector<std::string> docs;
    for (std::size_t i = 0; i < universe; ++i) docs.push_back("d" + std::to_string(i));
    std::shuffle(docs.begin(), docs.end(), rng);
    std::set<std::string> pos;
    const std::size_t npos = 1 + rng() % 6;
    for (std::size_t i = 0; i < npos; ++i) {
      // Bias draws toward the head so the cutoffs matter.
      const std::size_t r = rng() % 3 == 0 ? rng() % universe : rng() % std::min<std::size_t>(universe, 30);
      pos.insert(docs[r]);
    }
    docs.resize(depth);
    Ranking ranking;
    for (std::size_t i = 0; i < depth; ++i)
      ranking.push_back({docs[i], i + 1, static_cast<double>(depth - i)});
    const PositiveSet ps(pos.begin(), pos.end());
    if (mrr_at_10(ranking, ps) != oracle::mrr(docs, pos, 10)) ++mismatches;
    if (asl(ranking, ps, 100) != oracle::asl(docs, pos, 100)) ++mismatches;
    if (recall_at_k(ranking, ps, 1000) != oracle::recall(docs, pos, 1000)) ++mismatches;
  }
  return {mismatches == 0, "1000 instances x {mrr@10, asl@100, recall@1000}, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome jaccard() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_dist = [&](std::size_t vocab) {
    TermDistribution d;
    double total = 0.0;
    const std::size_t terms = 1 + rng() % vocab;
    for (std::size_t i = 0; i < terms; ++i) {
      const double w = u(rng) + 1e-3;
      d.frequencies["t" + std::to_string(rng() % vocab)] += w;
      total += w;
    }
    for (auto& [t, f] : d.frequencies) f /= total;
    return d;
  };
  std::size_t bad_oracle = 0, bad_sym = 0, bad_bounds = 0, bad_self = 0;
  double max_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t vocab = 2 + rng() % 400;
    const auto s = random_dist(vocab), t = random_dist(vocab);
    const double j = weighted_jaccard(s, t);
    const double want = oracle::weighted_jaccard({s.frequencies.begin(), s.frequencies.end()},
                                                 {t.frequencies.begin(), t.frequencies.end()});
    max_err = std::max(max_err, std::abs(j - want));
    if (std::abs(j - want) > 1e-12) ++bad_oracle;
    if (j != weighted_jaccard(t, s)) ++bad_sym;
    if (!(j >= 0.0 && j <= 1.0)) ++bad_bounds;
    if (weighted_jaccard(s, s) != 1.0) ++bad_self;
  }
  const bool ok = bad_oracle + bad_sym + bad_bounds + bad_self == 0;
  return {ok, "1000 pairs, max |J - oracle| " + fmt("%.1e", max_err) + ", failures oracle/sym/bounds/self " +
                  std::to_string(bad_oracle) + "/" + std::to_string(bad_sym) + "/" +
                  std::to_string(bad_bounds) + "/" + std::to_string(bad_self)};
}

Outcome similarity() {
  constexpr std::size_t dim = 768, pool = 3000, rows = 1000;
  std::mt19937_64 rng(103);
  // Offset mean keeps R away from zero so a relative tolerance is meaningful.
  std::normal_distribution<float> g(0.3f, 1.0f);
  std::vector<std::string> ids;
  std::vector<float> data(pool * dim);
  for (std::size_t i = 0; i < pool; ++i) ids.push_back("e" + std::to_string(i));
  for (auto& x : data) x = g(rng);
  const EmbeddingSet emb(dim, ids, std::move(data));

  std::vector<std::size_t> order(pool);
  std::iota(order.begin(), order.end(), 0);
  std::uniform_real_distribution<double> alpha(-3.0, 3.0);
  double max_rel = 0.0, max_rel_batch = 0.0, max_lin = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::string> train;
    std::vector<std::vector<double>> train_rows;
    for (std::size_t i = 0; i < rows; ++i) {
      train.push_back(ids[order[i]]);
      const auto r = emb.row(order[i]);
      train_rows.emplace_back(r.begin(), r.end());
    }
    const std::string& qid = ids[order[rows]];
    const auto qrow = emb.row(order[rows]);
    const std::vector<double> q(qrow.begin(), qrow.end());

    const double want = oracle::similarity(q, train_rows);
    const double got = model_similarity(q, train, emb);
    max_rel = std::max(max_rel, std::abs(got - want) / std::abs(want));
    const std::vector<std::string> one{qid};
    const double batch = model_similarities(one, train, emb)[0].value;
    max_rel_batch = std::max(max_rel_batch, std::abs(batch - want) / std::abs(want));

    const double a = alpha(rng);
    std::vector<double> scaled(q);
    for (auto& x : scaled) x *= a;
    const double lin = model_similarity(scaled, train, emb);
    max_lin = std::max(max_lin, std::abs(lin - a * got) / std::abs(a * got));
  }
  const bool ok = max_rel <= 1e-9 && max_rel_batch <= 1e-9 && max_lin <= 1e-9;
  return {ok, "100 x (1000 rows, dim 768): max rel err " + fmt("%.1e", max_rel) + " (per-row), " +
                  fmt("%.1e", max_rel_batch) + " (mean-vector); R(aq)=aR(q) max rel " +
                  fmt("%.1e", max_lin)};
}

Outcome spread() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::size_t checked = 0, mismatches = 0;
  for (int set = 0; set < 100; ++set) {
    const std::size_t k = 2 + rng() % 11, dim = 1 + rng() % 16;
    std::vector<double> pts(k * dim);
    for (auto& x : pts) x = u(rng);
    for (std::size_t m = 1; m <= std::min<std::size_t>(4, k); ++m) {
      ++checked;
      if (select_spread_subset(pts, dim, m, SpreadMode::Exact) != oracle::best_spread_subset(pts, dim, m))
        ++mismatches;
    }
  }
  std::normal_distribution<double> g;
  std::vector<double> big(100 * 768);
  for (auto& x : big) x = g(rng);
  const auto t0 = std::chrono::steady_clock::now();
  const auto chosen = select_spread_subset(big, 768, 5, SpreadMode::Exact);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto dist = pairwise_distances(big, 768);
  const auto greedy = select_spread_subset(big, 768, 5, SpreadMode::Greedy);
  const bool dominates = spread_score(dist, 100, chosen) >= spread_score(dist, 100, greedy);
  const bool ok = mismatches == 0 && chosen.size() == 5 && secs < 60.0 && dominates;
  return {ok, std::to_string(checked) + " (set, m) cases over 100 sets, " + std::to_string(mismatches) +
                  " mismatches; k=100 m=5 exact in " + fmt("%.2f s", secs)};
}

Outcome kmeans_properties() {
  std::mt19937_64 rng(105);
  std::normal_distribution<float> g;
  std::size_t increases = 0, iterations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 100 + rng() % 900, dim = 1 + rng() % 12;
    std::vector<float> pts(n * dim);
    for (auto& x : pts) x = g(rng);
    KMeansOptions o;
    o.k = 2 + rng() % 20;
    o.seed = rng();
    o.tol = 0.0;
    const auto m = kmeans(pts, dim, o);
    iterations += m.inertia_trace.size();
    // Lloyd steps cannot raise inertia; allow one part in 1e12 for summation rounding.
    for (std::size_t i = 1; i < m.inertia_trace.size(); ++i)
      if (m.inertia_trace[i] > m.inertia_trace[i - 1] * (1.0 + 1e-12)) ++increases;
  }

  std::size_t impure = 0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 2 + rng() % 7, per = 50 + rng() % 100;
    const double radius = 1.0, separation = 10.0 * radius;
    std::vector<float> pts;
    std::vector<std::size_t> truth;
    for (std::size_t blob = 0; blob < 2; ++blob) {
      for (std::size_t i = 0; i < per; ++i) {
        std::vector<double> p(dim);
        double norm;
        do {
          norm = 0.0;
          for (auto& x : p) {
            x = u(rng);
            norm += x * x;
          }
        } while (norm > 1.0);
        for (std::size_t d = 0; d < dim; ++d)
          pts.push_back(static_cast<float>(radius * p[d] + (d == 0 && blob ? separation : 0.0)));
        truth.push_back(blob);
      }
    }
    KMeansOptions o;
    o.k = 2;
    o.seed = rng();
    const auto m = kmeans(pts, dim, o);
    if (oracle::purity(m.assignment, truth) != 1.0 || m.assignment.front() == m.assignment.back())
      ++impure;
  }
  return {increases == 0 && impure == 0,
          "50 instances (" + std::to_string(iterations) + " iterations), " + std::to_string(increases) +
              " inertia increases; 20 two-blob runs at 10x radius, " + std::to_string(impure) +
              " not fully recovered"};
}

Outcome bm25() {
  std::size_t queries = 0, mismatches = 0;
  double max_err = 0.0;
  for (std::uint64_t inst = 0; inst < 200; ++inst) {
    std::uint64_t state = 1000 + inst;
    const std::size_t vocab = 20 + state % 200;
    std::vector<TextEntry> docs;
    const std::size_t ndocs = 5 + inst % 60;
    for (std::size_t d = 0; d < ndocs; ++d)
      docs.push_back({"doc" + std::to_string(d), syn::random_text(state, 1 + state % 25, vocab)});
    const Collection coll(docs);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& e : docs) pairs.emplace_back(e.id, e.text);
    const auto idx = InvertedIndex::build(coll);
    const oracle::NaiveBm25 naive(pairs, 0.9, 0.4);
    for (int q = 0; q < 5; ++q) {
      ++queries;
      const auto text = syn::random_text(state, 1 + state % 4, vocab);
      const auto got = search(idx, text, 20);
      auto want = naive.rank(tokenize(text));
      if (want.size() > 20) want.resize(20);
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i) {
        same = got[i].doc_id == want[i].first;
        max_err = std::max(max_err, std::abs(got[i].score - want[i].second));
      }
      if (!same) ++mismatches;
    }
  }
  const auto single = InvertedIndex::build(Collection(std::vector<TextEntry>{{"d", "x"}}));
  const TokenList x{"x"};
  const double analytic = bm25_score(single, x, 0);
  const bool analytic_ok = std::abs(analytic - std::log(4.0 / 3.0)) <= 1e-12;
  return {mismatches == 0 && max_err <= 1e-12 && analytic_ok,
          "200 corpora / " + std::to_string(queries) + " queries, " + std::to_string(mismatches) +
              " ranking mismatches, max score err " + fmt("%.1e", max_err) + "; single-doc score " +
              fmt("%.15f", analytic) + " vs ln(4/3)"};
}

Outcome t_test() {
  const std::vector<double> a{1, 2, 3, 4, 5}, zeros(5, 0.0);
  const auto r = paired_t_test(a, zeros);
  const double oracle_p = oracle::t_two_sided_p(r.t_statistic, 4);
  const auto same = paired_t_test(a, a);
  const bool ok = std::abs(r.t_statistic - 4.2426) <= 1e-3 && std::abs(r.p_value - oracle_p) <= 1e-3 &&
                  std::abs(r.p_value - 0.0132) <= 1e-3 && same.p_value == 1.0;
  return {ok, "t=" + fmt("%.4f", r.t_statistic) + " p=" + fmt("%.5f", r.p_value) +
                  " (integration oracle " + fmt("%.5f", oracle_p) + "); identical samples p=" +
                  fmt("%.1f", same.p_value)};
}

// ---------------------------------------------------------------------------
// end to end

struct CsvRow {
  std::string cluster;
  double jaccard, rel_loss;
};

std::vector<CsvRow> read_jaccard_loss(const std::filesystem::path& p) {
  const auto text = textio::read_file(p);
  std::vector<CsvRow> rows;
  const auto lines = textio::split_lines(text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = textio::split(lines[i], ',');
    rows.push_back({std::string(f.at(0)), textio::parse_double(f.at(1)).value(),
                    textio::parse_double(f.at(2)).value()});
  }
  return rows;
}

bool eval_runs(const syn::TempDir& dir, const std::string& tag,
               const std::map<std::string, RunSet>& runs, std::string& err) {
  std::vector<std::string> args{"eval", "--manifest", (dir / "topic/manifest.json").string(),
                                "--qrels", (dir / "qrels.txt").string(), "--out",
                                (dir / ("eval_" + tag)).string()};
  for (const auto& [name, run] : runs) {
    const auto path = dir / (tag + "_" + name + ".trec");
    textio::write_file(path, format_run(run));
    args.push_back("--run");
    args.push_back(name + "=" + path.string());
  }
  const auto r = syn::run_cli(args);
  err = r.err;
  return r.code == 0;
}

Outcome end_to_end() {
  syn::TempDir dir;
  syn::ModeCorpusOptions opts;  // 5 modes x 4000 queries, dim 16
  const auto corpus = syn::make_mode_corpus(opts);
  textio::write_file(dir / "queries.tsv", tsv_of(corpus.queries));
  write_embeddings(corpus.embeddings, dir / "emb.bin", dir / "emb.ids");

  auto r = syn::run_cli({"topic-shift", "--queries", (dir / "queries.tsv").string(), "--embeddings",
                         (dir / "emb.bin").string(), "--k", "100", "--m", "5", "--target-size",
                         "3500", "--test-size", "500", "--out", (dir / "topic").string()});
  if (r.code != 0) return {false, "topic-shift failed: " + r.err};
  const auto manifest = load_manifest(dir / "topic" / "manifest.json");

  std::vector<std::size_t> predicted, truth;
  for (std::size_t c = 0; c < manifest.clusters.size(); ++c)
    for (const auto* list : {&manifest.clusters[c].train, &manifest.clusters[c].test})
      for (const auto& id : *list) {
        predicted.push_back(c);
        truth.push_back(corpus.label.at(id));
      }
  const double purity = oracle::purity(predicted, truth);
  std::set<std::size_t> modes_hit;
  for (std::size_t c = 0; c < manifest.clusters.size(); ++c)
    modes_hit.insert(corpus.label.at(manifest.clusters[c].test.front()));

  const auto plan = leave_one_out_plan(manifest);
  textio::write_file(dir / "qrels.txt", format_qrels(syn::plan_qrels(plan)));
  std::string err;
  if (!eval_runs(dir, "flat", syn::make_plan_runs(plan, corpus.queries, syn::RunShape::Flat), err))
    return {false, "eval (flat) failed: " + err};
  if (!eval_runs(dir, "decay",
                 syn::make_plan_runs(plan, corpus.queries, syn::RunShape::VocabularyDecay), err))
    return {false, "eval (decay) failed: " + err};

  const auto flat = summary_from_json(textio::read_file(dir / "eval_flat" / "summary.json"));
  bool flat_zero = true;
  for (const auto& s : flat) flat_zero = flat_zero && s.rel_loss == 0.0;

  r = syn::run_cli({"indicators", "--manifest", (dir / "topic/manifest.json").string(), "--queries",
                    (dir / "queries.tsv").string(), "--matrix",
                    (dir / "eval_decay/matrix.tsv").string(), "--embeddings",
                    (dir / "emb.bin").string(), "--out", (dir / "ind").string()});
  if (r.code != 0) return {false, "indicators failed: " + r.err};
  const auto rows = read_jaccard_loss(dir / "ind" / "jaccard_loss.csv");
  std::vector<double> js, losses;
  std::string pairs;
  for (const auto& row : rows) {
    js.push_back(row.jaccard);
    losses.push_back(row.rel_loss);
    pairs += (pairs.empty() ? "" : " ") + fmt("(%.3f,", row.jaccard) + fmt("%.3f)", row.rel_loss);
  }
  const double rho = oracle::spearman(js, losses);
  const bool ok = purity >= 0.9 && modes_hit.size() == 5 && flat_zero && rows.size() == 5 && rho < 0.0;
  return {ok, "20000 queries: purity " + fmt("%.4f", purity) + ", " + std::to_string(modes_hit.size()) +
                  " distinct modes; flat control rel_loss all 0: " + (flat_zero ? "yes" : "no") +
                  "; decay (J,rel_loss) " + pairs + ", Spearman " + fmt("%.3f", rho)};
}

// ---------------------------------------------------------------------------
// determinism

Outcome determinism() {
  syn::TempDir dir;
  syn::ModeCorpusOptions opts;
  opts.per_mode = 80;
  const auto corpus = syn::make_mode_corpus(opts);
  const auto q = (dir / "queries.tsv").string();
  const auto emb = (dir / "emb.bin").string();
  textio::write_file(q, tsv_of(corpus.queries));
  write_embeddings(corpus.embeddings, dir / "emb.bin", dir / "emb.ids");

  const auto fx = syn::make_retrieval_fixture(60, 300, 17);
  const auto rq = (dir / "rq.tsv").string(), rc = (dir / "rc.tsv").string(),
             rqrels = (dir / "rqrels.txt").string();
  textio::write_file(rq, tsv_of(fx.queries));
  textio::write_file(rc, tsv_of(fx.collection));
  textio::write_file(rqrels, format_qrels(fx.qrels));

  // The eval / indicators inputs come from a fixed wh-shift manifest.
  if (syn::run_cli({"wh-shift", "--queries", q, "--test-size", "15", "--out", (dir / "base").string()}).code != 0)
    return {false, "fixture wh-shift failed"};
  const auto manifest = load_manifest(dir / "base" / "manifest.json");
  const auto plan = leave_one_out_plan(manifest);
  textio::write_file(dir / "qrels.txt", format_qrels(syn::plan_qrels(plan)));
  std::vector<std::string> run_flags;
  for (const auto& [name, run] : syn::make_plan_runs(plan, corpus.queries, syn::RunShape::VocabularyDecay)) {
    const auto path = dir / (name + ".trec");
    textio::write_file(path, format_run(run));
    run_flags.push_back("--run");
    run_flags.push_back(name + "=" + path.string());
  }
  const auto base_manifest = (dir / "base/manifest.json").string();

  using Args = std::vector<std::string>;
  std::vector<std::pair<std::string, Args>> commands = {
      {"topic-shift", {"--queries", q, "--embeddings", emb, "--k", "12", "--m", "3", "--target-size", "60", "--test-size", "10"}},
      {"wh-shift", {"--queries", q, "--test-size", "10"}},
      {"length-shift", {"--queries", q, "--test-size", "10"}},
      {"bm25-run", {"--queries", rq, "--collection", rc, "--depth", "50", "--save-index"}},
      {"mine-negatives", {"--queries", rq, "--collection", rc, "--qrels", rqrels, "--pool", "100", "--n-neg", "10"}},
      {"eval", {"--manifest", base_manifest, "--qrels", (dir / "qrels.txt").string()}},
      {"indicators", {"--manifest", base_manifest, "--queries", q, "--matrix", "MATRIX", "--embeddings", emb, "--bins", "4"}},
      {"export-cluster-tsv", {"--manifest", base_manifest, "--embeddings", emb}},
  };
  commands[5].second.insert(commands[5].second.end(), run_flags.begin(), run_flags.end());

  std::string failures;
  std::size_t files = 0;
  for (auto& [cmd, args] : commands) {
    std::vector<std::map<std::string, std::string>> trees;
    for (const auto& [threads, tag] : std::vector<std::pair<std::string, std::string>>{{"1", "a"}, {"1", "b"}, {"8", "c"}}) {
      Args full{cmd};
      for (const auto& a : args)
        full.push_back(a == "MATRIX" ? (dir / "eval_src/matrix.tsv").string() : a);
      const auto out = dir / (cmd + "_" + tag);
      full.insert(full.end(), {"--threads", threads, "--out", out.string()});
      const auto r = syn::run_cli(full);
      if (r.code != 0) {
        failures += " " + cmd + "(exit " + std::to_string(r.code) + ": " + r.err + ")";
        break;
      }
      trees.push_back(syn::read_tree(out));
      // indicators reads the eval output of the first pass.
      if (cmd == "eval" && tag == "a") std::filesystem::copy(out, dir / "eval_src");
    }
    if (trees.size() != 3) continue;
    if (trees[0] != trees[1] || trees[0] != trees[2] || trees[0].empty()) failures += " " + cmd;
    files += trees[0].size();
  }
  return {failures.empty(), std::to_string(commands.size()) + " subcommands x threads {1,1,8}, " +
                                std::to_string(files) + " output files compared" +
                                (failures.empty() ? "" : "; differing:" + failures)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"rel-loss-arithmetic", 1.0, rel_loss_arithmetic},
      {"metric-oracles", 5.0, metric_oracles},
      {"weighted-jaccard", 5.0, jaccard},
      {"model-similarity", 10.0, similarity},
      {"spread-subset", 120.0, spread},
      {"kmeans", 60.0, kmeans_properties},
      {"bm25", 30.0, bm25},
      {"end-to-end-synthetic", 120.0, end_to_end},
      {"paired-t-test", 5.0, t_test},
      {"determinism", 120.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s  %-22s %s [%.2f s / %.0f s%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
