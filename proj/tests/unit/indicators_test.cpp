#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qshift/error.hpp"
#include "qshift/indicators.hpp"

using namespace qshift;

namespace {

TermDistribution dist_of(std::vector<std::string> texts) { return term_distribution(texts); }

std::map<std::string, double> plain(const TermDistribution& d) {
  return {d.frequencies.begin(), d.frequencies.end()};
}

EmbeddingSet random_embeddings(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<float> g;
  std::vector<std::string> ids;
  std::vector<float> data(n * dim);
  for (std::size_t i = 0; i < n; ++i) ids.push_back("e" + std::to_string(i));
  for (auto& x : data) x = g(rng);
  return EmbeddingSet(dim, std::move(ids), std::move(data));
}

// One-column-per-cluster matrix with per-query in-domain / zero-shot values.
EvalMatrix two_by_two(const std::vector<std::string>& q0, const std::vector<double>& in0,
                      const std::vector<double>& out0) {
  EvalMatrix m;
  m.rows = {"r0", "r1"};
  m.cols = {"c0", "c1"};
  m.col_queries = {q0, {"other"}};
  m.zero_shot_row = {0, 1};
  m.cells.resize(2, std::vector<EvalCell>(2));
  m.cells[0][0].values = out0;
  m.cells[1][0].values = in0;
  m.cells[0][1].values = {0.5};
  m.cells[1][1].values = {0.5};
  for (auto& row : m.cells)
    for (auto& c : row) c.missing.assign(c.values.size(), 0);
  return m;
}

}  // namespace

TEST(TermDistribution, NormalizedCounts) {
  auto d = dist_of({"a b", "b c b"});
  EXPECT_EQ(d.query_count, 2u);
  EXPECT_EQ(d.frequencies.at("b"), 0.6);
  EXPECT_EQ(d.frequencies.at("a"), 0.2);
  EXPECT_THROW(dist_of({"", "?!"}), Error);
}

TEST(Jaccard, WorkedExample) {
  EXPECT_NEAR(weighted_jaccard(dist_of({"a b"}), dist_of({"b c"})), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(weighted_jaccard(dist_of({"a"}), dist_of({"b"})), 0.0);
  const auto s = dist_of({"x y z x"});
  EXPECT_NEAR(weighted_jaccard(s, s), 1.0, 1e-15);
  EXPECT_THROW(weighted_jaccard(TermDistribution{}, s), Error);
}

TEST(Jaccard, MatchesOracleSymmetricAndBounded) {
  std::mt19937_64 rng(41);
  auto text = [&](std::size_t vocab) {
    std::string t;
    const auto n = 1 + rng() % 12;
    for (std::size_t i = 0; i < n; ++i) t += "t" + std::to_string(rng() % vocab) + " ";
    return t;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const auto vocab = 2 + rng() % 50;
    std::vector<std::string> a, b;
    for (std::size_t i = 0, n = 1 + rng() % 10; i < n; ++i) a.push_back(text(vocab));
    for (std::size_t i = 0, n = 1 + rng() % 10; i < n; ++i) b.push_back(text(vocab));
    const auto s = term_distribution(a), t = term_distribution(b);
    const double j = weighted_jaccard(s, t);
    EXPECT_NEAR(j, oracle::weighted_jaccard(plain(s), plain(t)), 1e-12);
    EXPECT_EQ(j, weighted_jaccard(t, s));
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, 1.0);
  }
}

TEST(Similarity, MatchesOracleAndMeanVectorRoute) {
  std::mt19937_64 rng(42);
  const auto emb = random_embeddings(rng, 60, 8);
  std::vector<std::string> train{"e1", "e5", "e7", "e20", "e33"};
  std::vector<std::vector<double>> rows;
  for (const auto& id : train) {
    const auto r = emb.row(std::string_view(id));
    rows.emplace_back(r.begin(), r.end());
  }
  std::vector<std::string> queries{"e0", "e2", "e40"};
  const auto batch = model_similarities(queries, train, emb, 3);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto r = emb.row(std::string_view(queries[i]));
    const std::vector<double> q(r.begin(), r.end());
    const double want = oracle::similarity(q, rows);
    EXPECT_NEAR(model_similarity(queries[i], train, emb), want, 1e-12);
    EXPECT_NEAR(batch[i].value, want, 1e-9 * std::max(1.0, std::abs(want)));
    EXPECT_EQ(batch[i].query_id, queries[i]);
  }
}

TEST(Similarity, LinearInQueryVector) {
  std::mt19937_64 rng(43);
  const auto emb = random_embeddings(rng, 20, 5);
  std::vector<std::string> train{"e3", "e4", "e9"};
  std::vector<double> u{1, -2, 0.5, 3, 0}, v{0.25, 1, -1, 2, 7}, mix(5);
  for (std::size_t d = 0; d < 5; ++d) mix[d] = 2.0 * u[d] - 3.0 * v[d];
  EXPECT_NEAR(model_similarity(mix, train, emb),
              2.0 * model_similarity(u, train, emb) - 3.0 * model_similarity(v, train, emb), 1e-12);
}

TEST(Similarity, Errors) {
  std::mt19937_64 rng(44);
  const auto emb = random_embeddings(rng, 4, 3);
  std::vector<std::string> train{"e0"}, missing{"nope"}, none;
  std::vector<double> short_q{1, 2};
  EXPECT_THROW(model_similarity(short_q, train, emb), Error);
  EXPECT_THROW(model_similarity("e1", none, emb), Error);
  try {
    model_similarity("e1", missing, emb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownId);
  }
  std::vector<std::string> bad_query{"nope"};
  EXPECT_THROW(model_similarities(bad_query, train, emb), Error);
}

TEST(JaccardLoss, PooledAndStrict) {
  QuerySet qs({{"a1", "x y"}, {"a2", "x"}, {"b1", "y z"}, {"b2", "z"}});
  ShiftManifest m;
  m.clusters = {{"A", {"a1"}, {"a2"}}, {"B", {"b1"}, {"b2"}}};
  std::vector<ShiftSummary> sums(2);
  sums[0].eval_set = "B";
  sums[0].rel_loss = 0.2;
  sums[1].eval_set = "A";
  sums[1].rel_loss = 0.1;
  auto pooled = jaccard_loss_table(m, qs, sums);
  ASSERT_EQ(pooled.size(), 2u);
  EXPECT_EQ(pooled[0].cluster, "A");
  EXPECT_EQ(pooled[0].rel_loss, 0.1);
  // A = {x 2/3, y 1/3}, B = {y 1/3, z 2/3}: J = (1/3) / (2/3 + 1/3 + 2/3).
  EXPECT_NEAR(pooled[0].jaccard, 0.2, 1e-15);
  auto strict = jaccard_loss_table(m, qs, sums, true);
  // A test = {x}, B train = {y, z}.
  EXPECT_EQ(strict[0].jaccard, 0.0);
  EXPECT_EQ(jaccard_loss_to_csv(strict).substr(0, 24), "cluster,jaccard,rel_loss");

  sums.pop_back();
  try {
    jaccard_loss_table(m, qs, sums);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClusterMismatch);
  }
}

TEST(Bins, SingleBinEqualsColumnSummary) {
  std::vector<std::string> ids{"q0", "q1", "q2", "q3"};
  auto m = two_by_two(ids, {0.5, 0.4, 1.0, 0.2}, {0.25, 0.4, 0.5, 0.1});
  std::vector<SimilarityScore> scores{{"q0", 0.3}, {"q1", 0.1}, {"q2", 0.9}, {"q3", 0.2}};
  BinSpec one;
  one.count = 1;
  auto r = bin_by_similarity(scores, m, one);
  ASSERT_EQ(r.bins.size(), 1u);
  EXPECT_EQ(r.bins[0].count, 4u);
  EXPECT_NEAR(r.bins[0].avg_in, 0.525, 1e-15);
  EXPECT_NEAR(r.bins[0].out, 0.3125, 1e-15);
  EXPECT_EQ(r.bins[0].low, 0.1);
  EXPECT_EQ(r.bins[0].high, 0.9);
  // Per-query losses 0.5, 0, 0.5, 0.5.
  EXPECT_EQ(r.bins[0].box.min, 0.0);
  EXPECT_EQ(r.bins[0].box.median, 0.5);
}

TEST(Bins, QuantileAndExplicitEdges) {
  std::vector<std::string> ids;
  std::vector<double> in, out;
  std::vector<SimilarityScore> scores;
  for (int i = 0; i < 10; ++i) {
    ids.push_back("q" + std::to_string(i));
    in.push_back(1.0);
    out.push_back(i < 5 ? 0.5 : 1.0);
    scores.push_back({ids.back(), static_cast<double>(i)});
  }
  auto m = two_by_two(ids, in, out);
  BinSpec two;
  two.count = 2;
  auto r = bin_by_similarity(scores, m, two);
  ASSERT_EQ(r.bins.size(), 2u);
  EXPECT_EQ(r.bins[0].count, 5u);
  EXPECT_EQ(r.bins[0].rel_loss, 0.5);
  EXPECT_EQ(r.bins[1].rel_loss, 0.0);
  EXPECT_EQ(r.bins[1].low, 5.0);

  BinSpec edges;
  edges.edges = {0.0, 2.0, 20.0, 30.0};
  auto e = bin_by_similarity(scores, m, edges);
  EXPECT_EQ(e.bins[0].count, 2u);
  EXPECT_EQ(e.bins[1].count, 8u);
  EXPECT_EQ(e.empty_bins, (std::vector<std::size_t>{2}));
  EXPECT_TRUE(std::isnan(e.bins[2].rel_loss));
  const auto csv = bins_to_csv(e);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Bins, TiesShareABin) {
  std::vector<std::string> ids{"a", "b", "c", "d"};
  auto m = two_by_two(ids, {1, 1, 1, 1}, {1, 1, 1, 1});
  std::vector<SimilarityScore> scores{{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 2.0}};
  BinSpec two;
  two.count = 2;
  auto r = bin_by_similarity(scores, m, two);
  // Both quantile edges sit on the tied score, so everything lands in the upper bin.
  EXPECT_EQ(r.bins[1].count, 4u);
  EXPECT_EQ(r.empty_bins, (std::vector<std::size_t>{0}));
}

TEST(Bins, Errors) {
  std::vector<std::string> ids{"a", "b"};
  auto m = two_by_two(ids, {1, 1}, {1, 1});
  std::vector<SimilarityScore> unknown{{"zz", 1.0}};
  try {
    bin_by_similarity(unknown, m, BinSpec{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownId);
  }
  std::vector<SimilarityScore> ok{{"a", 1.0}, {"b", 2.0}};
  BinSpec bad;
  bad.edges = {1.0, 1.0};
  EXPECT_THROW(bin_by_similarity(ok, m, bad), Error);
  bad.edges = {1.5, 3.0};
  EXPECT_THROW(bin_by_similarity(ok, m, bad), Error);
  std::vector<SimilarityScore> nan{{"a", std::nan("")}};
  EXPECT_THROW(bin_by_similarity(nan, m, BinSpec{}), Error);
  EXPECT_THROW(bin_by_similarity({}, m, BinSpec{}), Error);
}
