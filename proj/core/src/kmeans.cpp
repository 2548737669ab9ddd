#include "qshift/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qshift/error.hpp"
#include "qshift/parallel.hpp"
#include "qshift/seeding.hpp"

namespace qshift {

std::vector<std::size_t> KMeansModel::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto c : assignment) ++sizes[c];
  return sizes;
}

namespace {

double squared_distance(std::span<const float> x, std::span<const double> c) {
  double sum = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = static_cast<double>(x[d]) - c[d];
    sum += diff * diff;
  }
  return sum;
}

class Lloyd {
 public:
  Lloyd(std::span<const float> data, std::size_t n, std::size_t dim, const KMeansOptions& opts)
      : data_(data), n_(n), dim_(dim), opts_(opts), rng_(opts.seed),
        centroids_(opts.k * dim, 0.0), assignment_(n, 0), distance_(n, 0.0) {}

  KMeansModel run() {
    seed_plus_plus();
    double inertia = assign();
    KMeansModel model;
    model.inertia_trace.push_back(inertia);
    std::size_t iter = 0;
    bool converged = false;
    while (iter < opts_.max_iter) {
      update();
      const double next = assign();
      ++iter;
      model.inertia_trace.push_back(next);
      const double improvement = inertia > 0.0 ? (inertia - next) / inertia : 0.0;
      inertia = next;
      if (improvement < opts_.tol) {
        converged = true;
        break;
      }
    }
    model.k = opts_.k;
    model.dim = dim_;
    model.centroids = std::move(centroids_);
    model.assignment = std::move(assignment_);
    model.inertia = inertia;
    model.seed = opts_.seed;
    model.iterations = iter;
    model.converged = converged;
    return model;
  }

 private:
  std::span<const float> row(std::size_t i) const { return data_.subspan(i * dim_, dim_); }
  std::span<double> centroid(std::size_t c) {
    return std::span<double>(centroids_).subspan(c * dim_, dim_);
  }

  void set_centroid_to_row(std::size_t c, std::size_t i) {
    auto dst = centroid(c);
    auto src = row(i);
    for (std::size_t d = 0; d < dim_; ++d) dst[d] = src[d];
  }

  void seed_plus_plus() {
    std::vector<double> nearest(n_, std::numeric_limits<double>::infinity());
    std::size_t chosen = rng_.uniform_index(n_);
    for (std::size_t c = 0; c < opts_.k; ++c) {
      set_centroid_to_row(c, chosen);
      if (c + 1 == opts_.k) break;
      std::span<const double> latest = centroid(c);
      parallel_for(n_, opts_.threads, [&](std::size_t i) {
        nearest[i] = std::min(nearest[i], squared_distance(row(i), latest));
      });
      double total = 0.0;
      for (double v : nearest) total += v;
      if (total <= 0.0) {
        chosen = rng_.uniform_index(n_);
        continue;
      }
      const double target = rng_.uniform01() * total;
      double cumulative = 0.0;
      chosen = n_ - 1;
      for (std::size_t i = 0; i < n_; ++i) {
        cumulative += nearest[i];
        if (cumulative > target && nearest[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    }
  }

  double assign() {
    parallel_for(n_, opts_.threads, [&](std::size_t i) {
      const auto x = row(i);
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < opts_.k; ++c) {
        const double d = squared_distance(
            x, std::span<const double>(centroids_).subspan(c * dim_, dim_));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignment_[i] = best;
      distance_[i] = best_d;
    });
    double inertia = 0.0;
    for (double d : distance_) inertia += d;
    return inertia;
  }

  // Means in fixed row order; empty clusters move to the farthest points.
  void update() {
    std::vector<double> sums(opts_.k * dim_, 0.0);
    std::vector<std::size_t> counts(opts_.k, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto c = assignment_[i];
      ++counts[c];
      const auto x = row(i);
      double* s = sums.data() + c * dim_;
      for (std::size_t d = 0; d < dim_; ++d) s[d] += x[d];
    }
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < opts_.k; ++c) {
      if (counts[c] == 0) {
        empty.push_back(c);
        continue;
      }
      auto dst = centroid(c);
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (std::size_t d = 0; d < dim_; ++d) dst[d] = sums[c * dim_ + d] * inv;
    }
    if (empty.empty()) return;

    std::vector<double> dist(n_);
    parallel_for(n_, opts_.threads, [&](std::size_t i) {
      dist[i] = squared_distance(
          row(i), std::span<const double>(centroids_).subspan(assignment_[i] * dim_, dim_));
    });
    std::vector<std::size_t> order(n_);
    for (std::size_t i = 0; i < n_; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    for (std::size_t e = 0; e < empty.size() && e < n_; ++e)
      set_centroid_to_row(empty[e], order[e]);
  }

  std::span<const float> data_;
  std::size_t n_;
  std::size_t dim_;
  KMeansOptions opts_;
  Rng rng_;
  std::vector<double> centroids_;
  std::vector<std::size_t> assignment_;
  std::vector<double> distance_;
};

}  // namespace

KMeansModel kmeans(std::span<const float> data, std::size_t dim, const KMeansOptions& options) {
  if (dim == 0 || data.size() % dim != 0)
    throw Error(ErrorCode::InvalidArgument, "data size is not a multiple of dim");
  const std::size_t n = data.size() / dim;
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no rows to cluster");
  if (options.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (options.k > n)
    throw Error(ErrorCode::KTooLarge,
                "k=" + std::to_string(options.k) + " > rows=" + std::to_string(n));
  if (options.max_iter == 0) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  if (!(options.tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be >= 0");

  if (!options.normalize) return Lloyd(data, n, dim, options).run();

  std::vector<float> normalized(data.begin(), data.end());
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) norm += double(normalized[i * dim + d]) * normalized[i * dim + d];
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (std::size_t d = 0; d < dim; ++d)
      normalized[i * dim + d] = static_cast<float>(normalized[i * dim + d] / norm);
  }
  return Lloyd(normalized, n, dim, options).run();
}

KMeansModel kmeans(const EmbeddingSet& emb, const KMeansOptions& options) {
  if (emb.size() == 0) throw Error(ErrorCode::EmptyInput, "embedding set is empty");
  return kmeans(emb.data(), emb.dim(), options);
}

}  // namespace qshift
