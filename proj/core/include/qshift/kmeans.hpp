#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qshift/corpus.hpp"

namespace qshift {

struct KMeansOptions {
  std::size_t k = 100;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  /// Stop once (previous - current) / previous inertia drops below this.
  double tol = 1e-4;
  /// L2-normalize every row before clustering.
  bool normalize = false;
  /// Worker cap for the assignment step; results do not depend on it.
  std::size_t threads = 1;
};

struct KMeansModel {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;         // k x dim, row-major
  std::vector<std::size_t> assignment;   // row -> centroid
  double inertia = 0.0;                  // sum of squared distances to assigned centroid
  std::uint64_t seed = 0;
  /// Inertia after the initial assignment and after every Lloyd step.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
  bool converged = false;

  std::span<const double> centroid(std::size_t c) const {
    return std::span<const double>(centroids).subspan(c * dim, dim);
  }
  std::vector<std::size_t> cluster_sizes() const;
};

/// Lloyd's algorithm with k-means++ seeding over row-major float data.
/// Nearest-centroid ties go to the lowest index. A cluster that empties is
/// re-seeded at the point farthest from its current centroid.
/// Throws EmptyInput, KTooLarge, InvalidArgument.
KMeansModel kmeans(std::span<const float> data, std::size_t dim, const KMeansOptions& options);

KMeansModel kmeans(const EmbeddingSet& emb, const KMeansOptions& options);

}  // namespace qshift
