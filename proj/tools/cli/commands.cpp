#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string_view>

#include "config.hpp"
#include "qshift/bm25.hpp"
#include "qshift/corpus.hpp"
#include "qshift/error.hpp"
#include "qshift/harness.hpp"
#include "qshift/indicators.hpp"
#include "qshift/kmeans.hpp"
#include "qshift/seeding.hpp"
#include "qshift/shiftgen.hpp"
#include "qshift/spread.hpp"
#include "qshift/textio.hpp"
#include "qshift/version.hpp"

namespace qshift::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kConfigFooter =
    "Any option may also come from the global --config JSON file, either as a top-level key or "
    "inside an object named after the subcommand. Command-line flags override file values.";

struct Common {
  std::size_t threads = 1;
  fs::path out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output directory (created if missing)")->required();
  sub->add_option("--threads", c.threads, "Worker threads; outputs do not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->footer(kConfigFooter);
}

struct NamedPath {
  std::string name;
  fs::path path;
};

std::vector<NamedPath> parse_named_paths(const std::vector<std::string>& specs,
                                         std::string_view flag) {
  std::vector<NamedPath> out;
  std::set<std::string> seen;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw ValidationError(std::string(flag) + " expects name=path, got '" + spec + "'");
    NamedPath np{spec.substr(0, eq), spec.substr(eq + 1)};
    if (!seen.insert(np.name).second)
      throw ValidationError(std::string(flag) + " given twice for " + np.name);
    if (!fs::is_regular_file(np.path))
      throw ValidationError(std::string(flag) + " " + np.name + ": no such file " +
                            np.path.string());
    out.push_back(std::move(np));
  }
  return out;
}

void require_file(const fs::path& path, std::string_view what) {
  if (!fs::is_regular_file(path))
    throw ValidationError(std::string(what) + ": no such file " + path.string());
}

fs::path ids_for(const fs::path& bin, const std::optional<fs::path>& ids) {
  return ids ? *ids : default_ids_path(bin);
}

std::vector<std::string> read_id_list(const fs::path& path) {
  std::vector<std::string> ids;
  const auto text = textio::read_file(path);
  for (auto line : textio::split_lines(text)) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) ids.emplace_back(line);
  }
  return ids;
}

std::vector<std::size_t> expand_sizes(const std::vector<std::size_t>& sizes, std::size_t clusters) {
  if (sizes.size() == 1) return std::vector<std::size_t>(clusters, sizes.front());
  if (sizes.size() != clusters)
    throw ValidationError("--test-size takes one value or one per cluster (" +
                          std::to_string(clusters) + ")");
  return sizes;
}

std::string format_float(float v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void finish_manifest(ShiftManifest& m, const EffectiveConfig& cfg, const fs::path& out,
                     Provenance& prov) {
  m.params["config_hash"] = cfg.hash;
  save_manifest(m, out / "manifest.json");
  prov.outputs.push_back("manifest.json");
  for (const auto& p : write_cluster_id_files(m, out))
    prov.outputs.push_back(p.filename().string());
  for (const auto& c : m.clusters) prov.details["cluster_sizes"][c.name] = {c.train.size(), c.test.size()};
}

// ---------------------------------------------------------------------------

struct TopicShift {
  Common common;
  fs::path queries, embeddings;
  std::optional<fs::path> ids;
  std::size_t k = 100, m = 5, target_size = 25000, max_iter = 100;
  double tol = 1e-4;
  bool normalize = false;
  std::vector<std::size_t> test_size{6200};
  std::string spread = "exact";
  std::uint64_t seed = 0;

  CLI::App* add(CLI::App& app) {
    auto* sub = app.add_subcommand("topic-shift", "Cluster query embeddings into topic groups");
    sub->add_option("--queries", queries, "Queries TSV (id<TAB>text)")->required()->check(CLI::ExistingFile);
    sub->add_option("--embeddings", embeddings, "Query embeddings (SHFTEMB1)")->required()->check(CLI::ExistingFile);
    sub->add_option("--ids", ids, "Row ids for --embeddings [default: same path with .ids]")->check(CLI::ExistingFile);
    sub->add_option("--k", k, "Number of k-means clusters")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--m", m, "Number of topic groups to keep")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--target-size", target_size, "Queries per group before the split")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--test-size", test_size, "Test queries per group (one value or one per group)")->capture_default_str();
    sub->add_option("--spread", spread, "Seed selection: exact or greedy")->capture_default_str()->check(CLI::IsMember({"exact", "greedy"}));
    sub->add_option("--max-iter", max_iter, "k-means iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "k-means relative inertia tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_flag("--normalize", normalize, "L2-normalize embeddings before clustering");
    sub->add_option("--seed", seed, "Base seed; stages derive their own")->capture_default_str();
    add_common(sub, common);
    return sub;
  }

  void run(const EffectiveConfig& cfg, std::ostream& log) {
    const auto ids_path = ids_for(embeddings, ids);
    require_file(ids_path, "--ids");
    if (m > k) throw ValidationError("--m must not exceed --k");
    const auto sizes = expand_sizes(test_size, m);

    Provenance prov{"topic-shift", cfg};
    const auto queries_set = load_queries(queries);
    const auto emb = load_embeddings(embeddings, ids_path);

    KMeansOptions ko;
    ko.k = k;
    ko.max_iter = max_iter;
    ko.tol = tol;
    ko.normalize = normalize;
    ko.threads = common.threads;
    ko.seed = stage_seed(seed, "kmeans");
    const auto model = kmeans(emb, ko);
    log << "k-means: " << model.iterations << " iterations, inertia "
        << textio::format_double(model.inertia) << "\n";

    const auto seeds = select_spread_subset(model.centroids, model.dim, m, parse_spread_mode(spread));
    auto grouped = expand_clusters(model, emb.ids(), seeds, target_size);
    validate_manifest(grouped, &queries_set);
    const auto split_seed = stage_seed(seed, "split");
    auto manifest = make_train_test(grouped, sizes, split_seed);
    manifest.params["k"] = k;
    manifest.params["m"] = m;
    manifest.params["spread"] = spread;
    manifest.params["kmeans_seed"] = ko.seed;
    manifest.params["kmeans_iterations"] = model.iterations;
    manifest.params["kmeans_converged"] = model.converged;

    prov.seeds = {{"base", seed}, {"kmeans", ko.seed}, {"split", split_seed}};
    prov.details["inertia"] = model.inertia;
    for (const auto& w : manifest.params.value("warnings", ordered_json::array()))
      prov.warnings.push_back(w.get<std::string>());
    finish_manifest(manifest, cfg, common.out, prov);
    prov.write(common.out);
  }
};

struct WhShift {
  Common common;
  fs::path queries;
  WhRules rules;
  std::vector<std::size_t> test_size{6500};
  std::uint64_t seed = 0;

  CLI::App* add(CLI::App& app) {
    auto* sub = app.add_subcommand("wh-shift", "Split queries by question word");
    sub->add_option("--queries", queries, "Queries TSV (id<TAB>text)")->required()->check(CLI::ExistingFile);
    sub->add_option("--wha", rules.wha, "Keywords for the wha group")->capture_default_str();
    sub->add_option("--how", rules.how, "Keywords for the how group")->capture_default_str();
    sub->add_option("--who", rules.who, "Keywords for the who group")->capture_default_str();
    sub->add_option("--test-size", test_size, "Test queries per group (one value or one per group)")->capture_default_str();
    sub->add_option("--seed", seed, "Base seed; the split derives its own")->capture_default_str();
    add_common(sub, common);
    return sub;
  }

  void run(const EffectiveConfig& cfg, std::ostream& log) {
    try {
      rules.validate();
    } catch (const Error& e) {
      throw ValidationError(e.detail());
    }
    const auto sizes = expand_sizes(test_size, 3);
    Provenance prov{"wh-shift", cfg};
    const auto qs = load_queries(queries);
    const auto grouped = wh_split(qs, rules);
    const auto split_seed = stage_seed(seed, "split");
    auto manifest = make_train_test(grouped, sizes, split_seed);
    log << "wh: " << manifest.params["unmatched"].get<std::size_t>() << " unmatched queries\n";
    prov.seeds = {{"base", seed}, {"split", split_seed}};
    finish_manifest(manifest, cfg, common.out, prov);
    prov.write(common.out);
  }
};

struct LengthShift {
  Common common;
  fs::path queries;
  std::optional<std::size_t> boundary;
  std::vector<std::size_t> test_size{3500};
  std::uint64_t seed = 0;

  CLI::App* add(CLI::App& app) {
    auto* sub = app.add_subcommand("length-shift", "Split queries into short and long");
    sub->add_option("--queries", queries, "Queries TSV (id<TAB>text)")->required()->check(CLI::ExistingFile);
    sub->add_option("--boundary", boundary, "Longest short query in tokens [default: lower median length]");
    sub->add_option("--test-size", test_size, "Test queries per group (one value or one per group)")->capture_default_str();
    sub->add_option("--seed", seed, "Base seed; the split derives its own")->capture_default_str();
    add_common(sub, common);
    return sub;
  }

  void run(const EffectiveConfig& cfg, std::ostream& log) {
    const auto sizes = expand_sizes(test_size, 2);
    Provenance prov{"length-shift", cfg};
    const auto qs = load_queries(queries);
    const auto grouped = length_split(qs, boundary);
    const auto split_seed = stage_seed(seed, "split");
    auto manifest = make_train_test(grouped, sizes, split_seed);
    log << "length: boundary " << manifest.params["boundary"].get<std::size_t>() << "\n";
    prov.seeds = {{"base", seed}, {"split", split_seed}};
    finish_manifest(manifest, cfg, common.out, prov);
    prov.write(common.out);
  }
};

struct Bm25Flags {
  fs::path queries, collection;
  std::optional<fs::path> query_ids;
  Bm25Params params;
  bool save_index = false;

  void add(CLI::App* sub) {
    sub->add_option("--queries", queries, "Queries TSV (id<TAB>text)")->required()->check(CLI::ExistingFile);
    sub->add_option("--collection", collection, "Collection TSV (id<TAB>text)")->required()->check(CLI::ExistingFile);
    sub->add_option("--query-ids", query_ids, "File of query ids to process, one per line [default: all queries]")->check(CLI::ExistingFile);
    sub->add_option("--k1", params.k1, "BM25 k1")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--b", params.b, "BM25 b")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sub->add_flag("--save-index", save_index, "Also write the index to index.bin");
  }

  std::vector<std::string> select(const QuerySet& qs) const {
    if (!query_ids) {
      std::vector<std::string> all;
      for (const auto& q : qs) all.push_back(q.id);
      return all;
    }
    auto ids = read_id_list(*query_ids);
    for (const auto& id : ids)
      if (!qs.contains(id)) throw Error(ErrorCode::UnknownId, "query " + id + " not in --queries");
    return ids;
  }

  InvertedIndex index(const fs::path& out, Provenance& prov) const {
    auto idx = InvertedIndex::build(load_collection(collection));
    if (save_index) {
      idx.save(out / "index.bin");
      prov.outputs.push_back("index.bin");
    }
    prov.details["documents"] = idx.doc_count();
    prov.details["terms"] = idx.term_count();
    return idx;
  }
};

struct MineNegatives {
  Common common;
  Bm25Flags bm25;
  fs::path qrels;
  std::size_t pool = 1000, n_neg = 100;
  int min_relevance = 1;
  std::uint64_t seed = 0;

  CLI::App* add(CLI::App& app) {
    auto* sub = app.add_subcommand("mine-negatives", "Sample BM25 negatives into training triplets");
    bm25.add(sub);
    sub->add_option("--qrels", qrels, "Qrels file (qid 0 docid rel)")->required()->check(CLI::ExistingFile);
    sub->add_option("--pool", pool, "BM25 depth sampled from")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--n-neg", n_neg, "Negatives per query")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--min-relevance", min_relevance, "Lowest relevance counted as positive")->capture_default_str();
    sub->add_option("--seed", seed, "Base seed; mining derives its own")->capture_default_str();
    add_common(sub, common);
    return sub;
  }

  void run(const EffectiveConfig& cfg, std::ostream& log) {
    Provenance prov{"mine-negatives", cfg};
    const auto qs = load_queries(bm25.queries);
    const auto judged = load_qrels(qrels);
    const auto ids = bm25.select(qs);
    const auto index = bm25.index(common.out, prov);
    MiningOptions mo;
    mo.n_neg = n_neg;
    mo.pool = pool;
    mo.seed = stage_seed(seed, "mine");
    mo.min_relevance = min_relevance;
    mo.bm25 = bm25.params;
    mo.threads = common.threads;
    const auto triplets = mine_negatives(index, qs, ids, judged, mo);
    textio::write_file(common.out / "triplets.tsv", format_triplets(triplets));
    prov.outputs.insert(prov.outputs.begin(), "triplets.tsv");
    prov.seeds = {{"base", seed}, {"mine", mo.seed}};
    prov.details["triplets"] = triplets.triplets.size();
    for (const auto& q : triplets.skipped)
      prov.warnings.push_back("query " + q + " skipped: no candidate negatives");
    log << "mine-negatives: " << triplets.triplets.size() << " triplets, "
        << triplets.skipped.size() << " queries skipped\n";
    prov.write(common.out);
  }
};

struct Bm25RunCmd {
  Common common;
  Bm25Flags bm25;
  std::size_t depth = 1000;
  std::string tag = "bm25";

  CLI::App* add(CLI::App& app) {
    auto* sub = app.add_subcommand("bm25-run", "Write a BM25 TREC run");
    bm25.add(sub);
    sub->add_option("--depth", depth, "Documents per query")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--tag", tag, "Run tag")->capture_default_str();
    add_common(sub, common);
    return sub;
  }

  void run(const EffectiveConfig& cfg, std::ostream& log) {
    if (tag.empty() || tag.find_first_of(" \t\n") != std::string::npos)
      throw ValidationError("--tag must be a single non-empty token");
    Provenance prov{"bm25-run", cfg};
    const auto qs = load_queries(bm25.queries);
    const auto ids = bm25.select(qs);
    const auto index = bm25.index(common.out, prov);
    const auto run = bm25_run(index, qs, ids, depth, bm25.params, common.threads, tag);
    textio::write_file(common.out / "run.trec", format_run(run));
    prov.outputs.insert(prov.outputs.begin(), "run.trec");
    prov.details["queries_ranked"] = run.query_count();
    if (run.query_count() < ids.size())
      prov.warnings.push_back(std::to_string(ids.size() - run.query_count()) +
                              " queries matched no document");
    log << "bm25-run: " << run.query_count() << " queries ranked\n";
    prov.write(common.out);
  }
};

struct Eval {
  Common common;
  fs::path manifest, qrels;
  std::vector<std::string> runs;
  std::string metric = "mrr@10";
  int min_relevance = 1;

  CLI::App* add(CLI::App& app) {
    auto* sub = app.add_subcommand("eval", "Leave-one-out evaluation of per-training-set runs");
    sub->add_option("--manifest", manifest, "Shift manifest JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--qrels", qrels, "Qrels file (qid 0 docid rel)")->required()->check(CLI::ExistingFile);
    sub->add_option("--run", runs, "TREC run per training set, as name=path (repeat)")->required();
    sub->add_option("--metric", metric, "mrr@10, asl or recall@1000 (any cutoff)")->capture_default_str();
    sub->add_option("--min-relevance", min_relevance, "Lowest relevance counted as positive")->capture_default_str();
    add_common(sub, common);
    return sub;
  }

  void run(const EffectiveConfig& cfg, std::ostream& log) {
    MetricSpec spec;
    try {
      spec = MetricSpec::parse(metric);
    } catch (const Error& e) {
      throw ValidationError(e.detail());
    }
    const auto named = parse_named_paths(runs, "--run");
    const auto m = load_manifest(manifest);
    const auto plan = leave_one_out_plan(m);
    for (const auto& np : named)
      if (!plan.find(np.name))
        throw ValidationError("--run " + np.name + " does not name a training set of the manifest");
    for (const auto& e : plan.experiments)
      if (std::none_of(named.begin(), named.end(),
                       [&](const NamedPath& np) { return np.name == e.train_set_name; }))
        throw ValidationError("no --run given for training set " + e.train_set_name);

    Provenance prov{"eval", cfg};
    std::map<std::string, RunSet> run_sets;
    for (const auto& np : named) run_sets.emplace(np.name, load_run(np.path));
    const auto matrix = build_matrix(plan, run_sets, load_qrels(qrels), spec, min_relevance);
    const auto summaries = summarize(matrix);

    textio::write_file(common.out / "summary.csv", summary_to_csv(summaries));
    textio::write_file(common.out / "summary.json",
                       summary_to_json(summaries, spec.name(), {{"config_hash", cfg.hash}}));
    textio::write_file(common.out / "matrix.tsv", matrix_to_tsv(matrix));
    prov.outputs = {"summary.csv", "summary.json", "matrix.tsv"};
    for (const auto& s : summaries) {
      if (s.missing > 0)
        prov.warnings.push_back(s.eval_set + ": " + std::to_string(s.missing) +
                                " (run, query) pairs scored as worst case");
      log << s.eval_set << ": rel loss " << textio::format_fixed(100.0 * s.rel_loss, 1) << "%\n";
    }
    prov.write(common.out);
  }
};

struct Indicators {
  Common common;
  fs::path manifest, queries, matrix;
  std::vector<std::string> embeddings;
  std::size_t bins = 5;
  std::vector<double> bin_edges;
  bool strict_jaccard = false;
  std::string metric = "mrr@10";

  CLI::App* add(CLI::App& app) {
    auto* sub = app.add_subcommand("indicators", "Lexical and embedding similarity versus loss");
    sub->add_option("--manifest", manifest, "Shift manifest JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--queries", queries, "Queries TSV (id<TAB>text)")->required()->check(CLI::ExistingFile);
    sub->add_option("--matrix", matrix, "matrix.tsv written by eval")->required()->check(CLI::ExistingFile);
    sub->add_option("--embeddings", embeddings,
                    "Query embeddings: one path for every model, or name=path per training set (repeat)")
        ->required();
    auto* b = sub->add_option("--bins", bins, "Equal-population similarity bins")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--bin-edges", bin_edges, "Explicit ascending bin edges instead of --bins")->excludes(b);
    sub->add_flag("--strict-jaccard", strict_jaccard,
                  "Compare cluster test queries with complement train queries only");
    sub->add_option("--metric", metric, "Metric name recorded for the matrix")->capture_default_str();
    add_common(sub, common);
    return sub;
  }

  void run(const EffectiveConfig& cfg, std::ostream& log) {
    if (!bin_edges.empty()) {
      if (bin_edges.size() < 2) throw ValidationError("--bin-edges needs at least two values");
      if (!std::is_sorted(bin_edges.begin(), bin_edges.end()) ||
          std::adjacent_find(bin_edges.begin(), bin_edges.end()) != bin_edges.end())
        throw ValidationError("--bin-edges must be strictly increasing");
    }
    std::vector<NamedPath> named;
    const bool single = embeddings.size() == 1 && embeddings.front().find('=') == std::string::npos;
    if (single) {
      require_file(embeddings.front(), "--embeddings");
      named.push_back({"", embeddings.front()});
    } else {
      named = parse_named_paths(embeddings, "--embeddings");
    }
    for (const auto& np : named) require_file(default_ids_path(np.path), "--embeddings ids");
    const auto m = load_manifest(manifest);
    const auto plan = leave_one_out_plan(m);
    if (!single) {
      for (const auto& np : named)
        if (!plan.find(np.name))
          throw ValidationError("--embeddings " + np.name + " does not name a training set");
      for (const auto& e : plan.experiments)
        if (std::none_of(named.begin(), named.end(),
                         [&](const NamedPath& np) { return np.name == e.train_set_name; }))
          throw ValidationError("no --embeddings given for training set " + e.train_set_name);
    }

    Provenance prov{"indicators", cfg};
    const auto qs = load_queries(queries);
    const auto mat = matrix_from_tsv(textio::read_file(matrix), plan, metric);
    const auto summaries = summarize(mat);

    const auto rows = jaccard_loss_table(m, qs, summaries, strict_jaccard);
    textio::write_file(common.out / "jaccard_loss.csv", jaccard_loss_to_csv(rows));

    std::map<std::string, EmbeddingSet> loaded;
    for (const auto& np : named) loaded.emplace(np.name, load_embeddings(np.path, default_ids_path(np.path)));
    std::vector<SimilarityScore> scores;
    for (std::size_t col = 0; col < mat.cols.size(); ++col) {
      const auto& zero_shot = plan.experiments[mat.zero_shot_row[col]];
      const auto& emb = loaded.at(single ? std::string() : zero_shot.train_set_name);
      auto part = model_similarities(mat.col_queries[col], zero_shot.train_ids, emb, common.threads);
      scores.insert(scores.end(), part.begin(), part.end());
    }
    textio::write_file(common.out / "r_scores.tsv", similarity_scores_to_tsv(scores));

    BinSpec spec;
    spec.count = bins;
    spec.edges = bin_edges;
    const auto report = bin_by_similarity(scores, mat, spec);
    textio::write_file(common.out / "bins.csv", bins_to_csv(report));

    prov.outputs = {"jaccard_loss.csv", "r_scores.tsv", "bins.csv"};
    for (auto b : report.empty_bins) prov.warnings.push_back("bin " + std::to_string(b) + " is empty");
    log << "indicators: " << rows.size() << " clusters, " << scores.size() << " scored queries\n";
    prov.write(common.out);
  }
};

struct ExportClusterTsv {
  Common common;
  fs::path manifest, embeddings;
  std::optional<fs::path> ids;

  CLI::App* add(CLI::App& app) {
    auto* sub = app.add_subcommand("export-cluster-tsv",
                                   "Dump embeddings with cluster and split labels for plotting");
    sub->add_option("--manifest", manifest, "Shift manifest JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--embeddings", embeddings, "Query embeddings (SHFTEMB1)")->required()->check(CLI::ExistingFile);
    sub->add_option("--ids", ids, "Row ids for --embeddings [default: same path with .ids]")->check(CLI::ExistingFile);
    add_common(sub, common);
    return sub;
  }

  void run(const EffectiveConfig& cfg, std::ostream& log) {
    const auto ids_path = ids_for(embeddings, ids);
    require_file(ids_path, "--ids");
    Provenance prov{"export-cluster-tsv", cfg};
    const auto m = load_manifest(manifest);
    const auto emb = load_embeddings(embeddings, ids_path);
    std::string body = "query_id\tcluster\tsplit";
    for (std::size_t d = 0; d < emb.dim(); ++d) body += "\tv" + std::to_string(d);
    body += '\n';
    std::size_t rows = 0;
    auto emit = [&](const std::string& id, const std::string& cluster, const char* split) {
      body += id + '\t' + cluster + '\t' + split;
      for (float v : emb.row(std::string_view(id))) body += '\t' + format_float(v);
      body += '\n';
      ++rows;
    };
    for (const auto& c : m.clusters) {
      for (const auto& id : c.train) emit(id, c.name, "train");
      for (const auto& id : c.test) emit(id, c.name, "test");
    }
    textio::write_file(common.out / "clusters.tsv", body);
    prov.outputs = {"clusters.tsv"};
    log << "export-cluster-tsv: " << rows << " rows\n";
    prov.write(common.out);
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query distribution shift toolkit", "qshift"};
  app.set_version_flag("--version", std::string(qshift::version()));
  app.require_subcommand(1);
  app.set_config("--config", "", "JSON config file; flags override its values");
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  TopicShift topic;
  WhShift wh;
  LengthShift length;
  MineNegatives mine;
  Bm25RunCmd bm25;
  Eval eval;
  Indicators indicators;
  ExportClusterTsv export_tsv;

  struct Entry {
    CLI::App* sub;
    Common* common;
    std::function<void(const EffectiveConfig&, std::ostream&)> run;
  };
  std::vector<Entry> entries;
  auto reg = [&](auto& cmd) {
    auto* sub = cmd.add(app);
    sub->fallthrough();
    entries.push_back({sub, &cmd.common,
                       [&cmd](const EffectiveConfig& c, std::ostream& log) { cmd.run(c, log); }});
  };
  reg(topic);
  reg(wh);
  reg(length);
  reg(mine);
  reg(bm25);
  reg(eval);
  reg(indicators);
  reg(export_tsv);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationError;
  }

  for (const auto& entry : entries) {
    if (!entry.sub->parsed()) continue;
    try {
      const auto cfg = effective_config(*entry.sub);
      entry.run(cfg, err);
      return kSuccess;
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << "\n";
      return kValidationError;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kRuntimeError;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kRuntimeError;
    }
  }
  return kValidationError;
}

}  // namespace qshift::cli
