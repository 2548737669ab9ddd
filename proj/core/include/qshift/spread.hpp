#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace qshift {

enum class SpreadMode { Exact, Greedy };

SpreadMode parse_spread_mode(std::string_view name);
std::string_view to_string(SpreadMode mode) noexcept;

/// Symmetric k x k matrix of Euclidean distances between row-major points.
std::vector<double> pairwise_distances(std::span<const double> points, std::size_t dim);

/// Sum of pairwise distances within `subset`, taken from a k x k matrix.
double spread_score(std::span<const double> distances, std::size_t k,
                    std::span<const std::size_t> subset);

/// Picks m of the k points so that the sum of their pairwise distances is
/// maximal.
///
/// Exact mode walks all C(k, m) index tuples in lexicographic order over the
/// precomputed distance matrix, carrying partial sums down the recursion, and
/// keeps the first tuple reaching the maximum. Greedy mode starts from the
/// farthest pair and repeatedly adds the point with the largest summed
/// distance to the current selection (ties to the lowest index).
///
/// The result is sorted ascending. Throws MTooLarge when m > k.
std::vector<std::size_t> select_spread_subset(std::span<const double> points, std::size_t dim,
                                              std::size_t m, SpreadMode mode);

}  // namespace qshift
