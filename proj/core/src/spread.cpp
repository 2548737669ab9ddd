#include "qshift/spread.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qshift/error.hpp"

namespace qshift {

SpreadMode parse_spread_mode(std::string_view name) {
  if (name == "exact") return SpreadMode::Exact;
  if (name == "greedy") return SpreadMode::Greedy;
  throw Error(ErrorCode::InvalidArgument, "unknown selection mode: " + std::string(name));
}

std::string_view to_string(SpreadMode mode) noexcept {
  return mode == SpreadMode::Exact ? "exact" : "greedy";
}

std::vector<double> pairwise_distances(std::span<const double> points, std::size_t dim) {
  const std::size_t k = dim == 0 ? 0 : points.size() / dim;
  std::vector<double> dist(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = points[i * dim + d] - points[j * dim + d];
        s += diff * diff;
      }
      dist[i * k + j] = dist[j * k + i] = std::sqrt(s);
    }
  }
  return dist;
}

double spread_score(std::span<const double> distances, std::size_t k,
                    std::span<const std::size_t> subset) {
  double s = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b)
      s += distances[subset[a] * k + subset[b]];
  return s;
}

namespace {

class ExactSearch {
 public:
  ExactSearch(const std::vector<double>& dist, std::size_t k, std::size_t m)
      : dist_(dist), k_(k), m_(m), current_(m), best_(m) {}

  std::vector<std::size_t> run() {
    descend(0, 0, 0.0);
    return best_;
  }

 private:
  void descend(std::size_t level, std::size_t first, double partial) {
    const std::size_t last = k_ - (m_ - level);
    if (level + 1 == m_) {
      // innermost level: only the added distances change
      for (std::size_t i = first; i <= last; ++i) {
        const double* row = dist_.data() + i * k_;
        double s = partial;
        for (std::size_t p = 0; p < level; ++p) s += row[current_[p]];
        if (s > best_score_) {
          best_score_ = s;
          current_[level] = i;
          best_ = current_;
        }
      }
      return;
    }
    for (std::size_t i = first; i <= last; ++i) {
      const double* row = dist_.data() + i * k_;
      double s = partial;
      for (std::size_t p = 0; p < level; ++p) s += row[current_[p]];
      current_[level] = i;
      descend(level + 1, i + 1, s);
    }
  }

  const std::vector<double>& dist_;
  std::size_t k_;
  std::size_t m_;
  std::vector<std::size_t> current_;
  std::vector<std::size_t> best_;
  double best_score_ = -1.0;
};

std::vector<std::size_t> greedy(const std::vector<double>& dist, std::size_t k, std::size_t m) {
  std::size_t bi = 0, bj = 1;
  double far = -1.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (dist[i * k + j] > far) {
        far = dist[i * k + j];
        bi = i;
        bj = j;
      }
  std::vector<std::size_t> chosen{bi, bj};
  std::vector<bool> taken(k, false);
  taken[bi] = taken[bj] = true;
  while (chosen.size() < m) {
    std::size_t pick = k;
    double gain = -1.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (taken[c]) continue;
      double g = 0.0;
      for (auto s : chosen) g += dist[c * k + s];
      if (g > gain) {
        gain = g;
        pick = c;
      }
    }
    taken[pick] = true;
    chosen.push_back(pick);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

std::vector<std::size_t> select_spread_subset(std::span<const double> points, std::size_t dim,
                                              std::size_t m, SpreadMode mode) {
  if (dim == 0 || points.size() % dim != 0)
    throw Error(ErrorCode::InvalidArgument, "centroid matrix size is not a multiple of dim");
  const std::size_t k = points.size() / dim;
  if (m > k)
    throw Error(ErrorCode::MTooLarge, "m=" + std::to_string(m) + " > k=" + std::to_string(k));
  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  if (m == k || m <= 1) return all;

  const auto dist = pairwise_distances(points, dim);
  if (mode == SpreadMode::Greedy) return greedy(dist, k, m);
  return ExactSearch(dist, k, m).run();
}

}  // namespace qshift
