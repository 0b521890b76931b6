/*
 * Copyright 2026 The lingae Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lingae/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace lingae {

namespace {

std::uint64_t pair_key(int i, int j, std::int64_t n) {
  if (i > j) std::swap(i, j);
  return static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
         static_cast<std::uint64_t>(j);
}

// floor(frac * m), robust to products like 0.29 * 100 landing just below
// an integer.
std::size_t fraction_count(double frac, std::size_t m) {
  return static_cast<std::size_t>(std::floor(frac * static_cast<double>(m) + 1e-9));
}

}  // namespace

SplitFractions SplitFractions::from_train_test(double train, double test) {
  if (!(train > 0.0 && test > 0.0 && train + test <= 1.0)) {
    throw std::invalid_argument("hard split needs train, test > 0 and train + test <= 1");
  }
  return SplitFractions{1.0 - train - test, test};
}

std::vector<NodePair> upper_triangle_edges(const SparseMatrixd& adjacency) {
  std::vector<NodePair> edges;
  edges.reserve(static_cast<std::size_t>(adjacency.nonZeros() / 2));
  for (int r = 0; r < adjacency.outerSize(); ++r) {
    for (SparseMatrixd::InnerIterator it(adjacency, r); it; ++it) {
      if (it.col() > r) edges.emplace_back(r, static_cast<int>(it.col()));
    }
  }
  return edges;
}

EdgeSplit make_link_split(const Graph& graph, const SplitFractions& fractions, Rng& rng) {
  if (!(fractions.val >= 0.0 && fractions.test > 0.0 && fractions.val + fractions.test < 1.0)) {
    throw std::invalid_argument("split fractions must satisfy val >= 0, test > 0, val + test < 1");
  }
  const std::int64_t n = graph.num_nodes();
  std::vector<NodePair> edges = upper_triangle_edges(graph.adjacency);
  const std::size_t m = edges.size();
  const auto held_out_ceil = static_cast<std::size_t>(
      std::ceil((fractions.val + fractions.test) * static_cast<double>(m) - 1e-9));
  if (m < held_out_ceil + 1) {
    throw std::invalid_argument("graph has " + std::to_string(m) +
                                " edges, too few to hold out the requested fractions");
  }
  const std::size_t n_test = fraction_count(fractions.test, m);
  const std::size_t n_val = fraction_count(fractions.val, m);
  const std::size_t needed = n_test + n_val;
  const std::uint64_t total_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t non_edges = total_pairs - m;
  if (needed > non_edges) {
    throw std::invalid_argument("graph has " + std::to_string(non_edges) +
                                " non-edges, need " + std::to_string(needed) + " negatives");
  }

  std::shuffle(edges.begin(), edges.end(), rng);
  EdgeSplit split;
  split.test_pos.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.val_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_test),
                       edges.begin() + static_cast<std::ptrdiff_t>(needed));

  std::vector<Triplet> kept;
  kept.reserve(2 * (m - needed));
  for (std::size_t e = needed; e < m; ++e) {
    const auto [i, j] = edges[e];
    const double w = graph.adjacency.coeff(i, j);
    kept.push_back({i, j, w});
    kept.push_back({j, i, w});
  }
  split.train_adjacency = sparse_from_triplets<double>(static_cast<int>(n), static_cast<int>(n), kept);

  std::unordered_set<std::uint64_t> edge_keys;
  edge_keys.reserve(m * 2);
  for (const auto& [i, j] : edges) edge_keys.insert(pair_key(i, j, n));

  std::vector<NodePair> negatives;
  negatives.reserve(needed);
  if (non_edges <= 4 * static_cast<std::uint64_t>(needed) || total_pairs <= 100000) {
    // Dense or tiny graph: enumerate the non-edges and draw without
    // replacement.
    std::vector<NodePair> pool;
    pool.reserve(static_cast<std::size_t>(non_edges));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!edge_keys.count(pair_key(i, j, n))) pool.emplace_back(i, j);
      }
    }
    for (std::size_t k = 0; k < needed; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
      negatives.push_back(pool[k]);
    }
  } else {
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(needed * 2);
    std::uniform_int_distribution<int> node(0, static_cast<int>(n - 1));
    while (negatives.size() < needed) {
      int i = node(rng);
      int j = node(rng);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      const std::uint64_t key = pair_key(i, j, n);
      if (edge_keys.count(key) || !taken.insert(key).second) continue;
      negatives.emplace_back(i, j);
    }
  }
  split.test_neg.assign(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.val_neg.assign(negatives.begin() + static_cast<std::ptrdiff_t>(n_test), negatives.end());
  return split;
}

double roc_auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw std::invalid_argument("roc_auc needs at least one positive and one negative");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) all.push_back({s, true});
  for (double s : neg_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Scored& a, const Scored& b) { return a.score < b.score; });

  // Sum of positive midranks (1-based).
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < all.size() && all[j].score == all[i].score) {
      pos_in_group += all[j].positive ? 1 : 0;
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += midrank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double p = static_cast<double>(pos_scores.size());
  const double q = static_cast<double>(neg_scores.size());
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double average_precision(std::span<const double> pos_scores,
                         std::span<const double> neg_scores) {
  if (pos_scores.empty()) throw std::invalid_argument("average_precision needs positives");
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) all.push_back({s, true});
  for (double s : neg_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const double total_pos = static_cast<double>(pos_scores.size());
  double tp = 0.0, fp = 0.0, ap = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    double group_tp = 0.0;
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) {
      (all[j].positive ? group_tp : fp) += 1.0;
      ++j;
    }
    tp += group_tp;
    if (group_tp > 0.0) ap += (group_tp / total_pos) * (tp / (tp + fp));
    i = j;
  }
  return ap;
}

namespace {

double squared_distance(const DenseMatrixd& a, Eigen::Index i, const DenseMatrixd& b,
                        Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

// Assigns each point to its nearest centroid (lowest index on ties) and
// returns the inertia.
double assign(const DenseMatrixd& points, const DenseMatrixd& centroids,
              std::vector<int>& labels, std::vector<double>& distances) {
  double inertia = 0.0;
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(points, p, centroids, c);
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    labels[p] = best_c;
    distances[p] = best;
    inertia += best;
  }
  return inertia;
}

DenseMatrixd kmeans_plus_plus(const DenseMatrixd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  DenseMatrixd centroids(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  Eigen::Index idx = first(rng);
  centroids.row(0) = points.row(idx);
  chosen[idx] = true;
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index p = 0; p < n; ++p) d2[p] = squared_distance(points, p, centroids, 0);

  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double acc = 0.0;
      idx = -1;
      for (Eigen::Index p = 0; p < n; ++p) {
        if (d2[p] <= 0.0) continue;
        acc += d2[p];
        idx = p;
        if (acc > target) break;
      }
    } else {
      // Every point coincides with a seed: pick uniformly among the unused.
      std::vector<Eigen::Index> unused;
      for (Eigen::Index p = 0; p < n; ++p) {
        if (!chosen[p]) unused.push_back(p);
      }
      std::uniform_int_distribution<std::size_t> pick(0, unused.size() - 1);
      idx = unused[pick(rng)];
    }
    centroids.row(c) = points.row(idx);
    chosen[idx] = true;
    for (Eigen::Index p = 0; p < n; ++p) {
      d2[p] = std::min(d2[p], squared_distance(points, p, centroids, c));
    }
  }
  return centroids;
}

}  // namespace

ClusteringResult kmeans(const DenseMatrixd& points, int k, Rng& rng, int max_iter, double tol) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw std::invalid_argument("kmeans needs k >= 1");
  if (k > n) {
    throw std::invalid_argument("kmeans: k = " + std::to_string(k) + " exceeds " +
                                std::to_string(n) + " points");
  }
  ClusteringResult result;
  result.centroids = kmeans_plus_plus(points, k, rng);
  result.assignments.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> distances(static_cast<std::size_t>(n));

  for (int iter = 0; iter < max_iter; ++iter) {
    result.inertia_trace.push_back(assign(points, result.centroids, result.assignments, distances));

    DenseMatrixd updated = DenseMatrixd::Zero(k, points.cols());
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index p = 0; p < n; ++p) {
      updated.row(result.assignments[p]) += points.row(p);
      ++counts[result.assignments[p]];
    }
    std::vector<bool> reseeded(static_cast<std::size_t>(n), false);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        updated.row(c) /= static_cast<double>(counts[c]);
        continue;
      }
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index p = 0; p < n; ++p) {
        if (!reseeded[p] && distances[p] > far_d) {
          far_d = distances[p];
          far = p;
        }
      }
      reseeded[far] = true;
      updated.row(c) = points.row(far);
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      shift = std::max(shift, (updated.row(c) - result.centroids.row(c)).norm());
    }
    result.centroids = std::move(updated);
    result.iterations = iter + 1;
    if (shift < tol) break;
  }
  result.inertia = assign(points, result.centroids, result.assignments, distances);
  result.inertia_trace.push_back(result.inertia);
  return result;
}

std::vector<std::vector<long>> contingency_table(std::span<const int> a,
                                                 std::span<const int> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("partitions differ in length: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
  std::map<int, std::size_t> rows, cols;
  for (int v : a) rows.emplace(v, 0);
  for (int v : b) cols.emplace(v, 0);
  std::size_t r = 0, c = 0;
  for (auto& [label, index] : rows) index = r++;
  for (auto& [label, index] : cols) index = c++;
  std::vector<std::vector<long>> table(rows.size(), std::vector<long>(cols.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++table[rows[a[i]]][cols[b[i]]];
  return table;
}

namespace {

struct Margins {
  std::vector<long> rows;
  std::vector<long> cols;
  long total = 0;
};

Margins margins_of(const std::vector<std::vector<long>>& table) {
  Margins m;
  m.rows.assign(table.size(), 0);
  m.cols.assign(table.empty() ? 0 : table[0].size(), 0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < table[i].size(); ++j) {
      m.rows[i] += table[i][j];
      m.cols[j] += table[i][j];
      m.total += table[i][j];
    }
  }
  return m;
}

double entropy(const std::vector<long>& counts, long total) {
  double h = 0.0;
  for (long c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / static_cast<double>(total);
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

double mutual_information(const std::vector<std::vector<long>>& table) {
  const Margins m = margins_of(table);
  const double total = static_cast<double>(m.total);
  double mi = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < table[i].size(); ++j) {
      const long nij = table[i][j];
      if (nij == 0) continue;
      mi += (static_cast<double>(nij) / total) *
            std::log(total * static_cast<double>(nij) /
                     (static_cast<double>(m.rows[i]) * static_cast<double>(m.cols[j])));
    }
  }
  return std::max(mi, 0.0);
}

double expected_mutual_information(const std::vector<std::vector<long>>& table) {
  const Margins m = margins_of(table);
  const long total = m.total;
  const double n = static_cast<double>(total);
  const double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (long a : m.rows) {
    for (long b : m.cols) {
      // log of a! b! (N-a)! (N-b)! / N!, shared by every cell value.
      const double log_front = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) +
                               std::lgamma(n - a + 1.0) + std::lgamma(n - b + 1.0) - lg_n;
      const long lo = std::max(1L, a + b - total);
      const long hi = std::min(a, b);
      for (long nij = lo; nij <= hi; ++nij) {
        const double x = static_cast<double>(nij);
        const double log_p = log_front - std::lgamma(x + 1.0) - std::lgamma(a - x + 1.0) -
                             std::lgamma(b - x + 1.0) -
                             std::lgamma(n - a - b + x + 1.0);
        emi += (x / n) * std::log(n * x / (static_cast<double>(a) * static_cast<double>(b))) *
               std::exp(log_p);
      }
    }
  }
  return emi;
}

double adjusted_mutual_information(std::span<const int> pred, std::span<const int> truth) {
  const auto table = contingency_table(pred, truth);
  if (pred.empty()) throw std::invalid_argument("adjusted_mutual_information needs data");
  const Margins m = margins_of(table);
  const double mi = mutual_information(table);
  const double emi = expected_mutual_information(table);
  const double h_pred = entropy(m.rows, m.total);
  const double h_truth = entropy(m.cols, m.total);
  const double denom = 0.5 * (h_pred + h_truth) - emi;
  const double scale = std::max({1.0, h_pred, h_truth});
  if (std::abs(denom) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) return 0.0;
  return (mi - emi) / denom;
}

MetricSummary MetricSummary::from_values(std::string name, std::vector<double> values) {
  MetricSummary s;
  s.name = std::move(name);
  s.per_run = std::move(values);
  if (s.per_run.empty()) return s;
  const double count = static_cast<double>(s.per_run.size());
  s.mean = std::accumulate(s.per_run.begin(), s.per_run.end(), 0.0) / count;
  if (s.per_run.size() > 1) {
    double ss = 0.0;
    for (double v : s.per_run) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (count - 1.0));
  }
  return s;
}

LinkPredictionScores evaluate_link_prediction(const Parameters<double>& params,
                                              const ModelSpec& spec, const EdgeSplit& split,
                                              const SparseMatrixd& a_norm,
                                              const FeatureMatrixd* features) {
  if (split.test_pos.empty() || split.test_neg.empty()) {
    throw std::invalid_argument("evaluate_link_prediction needs non-empty test sets");
  }
  const DenseMatrixd z = embed(a_norm, spec.use_features ? features : nullptr, params, spec);
  const auto pos = score_edges(z, split.test_pos);
  const auto neg = score_edges(z, split.test_neg);
  return {roc_auc(pos, neg), average_precision(pos, neg)};
}

double evaluate_clustering(const Parameters<double>& params, const ModelSpec& spec,
                           const Graph& graph, const SparseMatrixd& a_norm,
                           const FeatureMatrixd* features, int k, Rng& rng) {
  if (!graph.labels) throw std::invalid_argument("evaluate_clustering needs node labels");
  const DenseMatrixd z = embed(a_norm, spec.use_features ? features : nullptr, params, spec);
  const ClusteringResult clusters = kmeans(z, k, rng);
  return adjusted_mutual_information(clusters.assignments, *graph.labels);
}

}  // namespace lingae
