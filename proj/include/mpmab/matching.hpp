#pragma once

// Oracle allocations: top-N channel selection and maximum-weight bipartite
// matching of users to channels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "mpmab/errors.hpp"

namespace mpmab {

using Matrix = std::vector<std::vector<double>>;

/// Injective user -> channel map and its total weight.
struct Assignment {
  std::vector<std::size_t> channel_of;  // indexed by user (row)
  double value = 0.0;
};

/// Channels sorted by decreasing value, ties broken by lower index.
inline std::vector<std::size_t> rank_channels(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

/// The n largest entries of `means`; user i gets the i-th best channel.
/// n larger than the channel count saturates to all channels.
inline Assignment top_n(std::span<const double> means, std::size_t n) {
  Assignment out;
  const auto order = rank_channels(means);
  n = std::min(n, means.size());
  out.channel_of.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t c : out.channel_of) out.value += means[c];
  return out;
}

namespace detail {

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// shortest augmenting path form, O(rows^2 * cols). Returns column per row.
inline std::vector<std::size_t> min_cost_assignment(const Matrix& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return {};
  const std::size_t m = cost.front().size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (match[j] != 0) col_of[match[j] - 1] = j - 1;
  return col_of;
}

// Best total weight for `rows` over columns not in `taken`.
inline double best_value(const Matrix& weights, std::span<const std::size_t> rows,
                         const std::vector<char>& taken) {
  if (rows.empty()) return 0.0;
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < taken.size(); ++j)
    if (!taken[j]) cols.push_back(j);
  Matrix cost(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) cost[a][b] = -weights[rows[a]][cols[b]];
  const auto pick = min_cost_assignment(cost);
  double total = 0.0;
  for (std::size_t a = 0; a < rows.size(); ++a) total += weights[rows[a]][cols[pick[a]]];
  return total;
}

}  // namespace detail

/// Maximum-weight injective assignment of N users (rows) to K channels
/// (columns), N <= K. Among maximizers the lexicographically smallest
/// user -> channel map is returned, so identical inputs give identical
/// outputs on every user's terminal.
inline Assignment hungarian(const Matrix& weights) {
  Assignment out;
  const std::size_t n = weights.size();
  if (n == 0) return out;
  const std::size_t k = weights.front().size();
  for (const auto& row : weights) {
    if (row.size() != k) throw ConfigError("hungarian: ragged weight matrix");
    for (double w : row)
      if (!std::isfinite(w)) throw ConfigError("hungarian: non-finite weight");
  }
  if (n > k) throw ConfigError("hungarian: more users than channels");

  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
  std::vector<char> taken(k, 0);
  const double optimum = detail::best_value(weights, all_rows, taken);
  const double tol = 1e-9 * std::max(1.0, std::abs(optimum));

  // Fix users in order to the smallest channel that still admits an optimum.
  out.channel_of.assign(n, 0);
  double fixed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const std::size_t> rest(all_rows.data() + i + 1, n - i - 1);
    bool placed = false;
    for (std::size_t c = 0; c < k && !placed; ++c) {
      if (taken[c]) continue;
      taken[c] = 1;
      const double total = fixed + weights[i][c] + detail::best_value(weights, rest, taken);
      if (total >= optimum - tol) {
        out.channel_of[i] = c;
        fixed += weights[i][c];
        placed = true;
      } else {
        taken[c] = 0;
      }
    }
    if (!placed) throw ConfigError("hungarian: internal tie-break failure");
  }
  for (std::size_t i = 0; i < n; ++i) out.value += weights[i][out.channel_of[i]];
  return out;
}

}  // namespace mpmab
