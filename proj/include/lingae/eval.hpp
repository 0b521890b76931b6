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

#ifndef LINGAE_EVAL_HPP_
#define LINGAE_EVAL_HPP_

#include <span>
#include <string>
#include <vector>

#include "lingae/linalg.hpp"
#include "lingae/models.hpp"
#include "lingae/random.hpp"

namespace lingae {

/// Link-prediction split. Every pair is stored with first < second.
struct EdgeSplit {
  SparseMatrixd train_adjacency;
  std::vector<NodePair> val_pos;
  std::vector<NodePair> val_neg;
  std::vector<NodePair> test_pos;
  std::vector<NodePair> test_neg;
};

/// Edge fractions held out for validation and test.
struct SplitFractions {
  double val = 0.05;
  double test = 0.10;

  /// Hard-split form: keep `train` of the edges, hold out `test`, and
  /// validate on the remainder.
  static SplitFractions from_train_test(double train, double test);
};

/// Undirected edges of a symmetric adjacency as (i, j) with i < j, in row
/// order.
std::vector<NodePair> upper_triangle_edges(const SparseMatrixd& adjacency);

/// Removes floor(val·m) validation and floor(test·m) test edges uniformly at
/// random and pairs each set with as many sampled non-edges of the original
/// graph. Validation and test negatives are disjoint.
EdgeSplit make_link_split(const Graph& graph, const SplitFractions& fractions, Rng& rng);

/// Mann–Whitney ROC AUC; ties count one half.
double roc_auc(std::span<const double> pos_scores, std::span<const double> neg_scores);

/// Step-wise average precision over the descending ranking, equal scores
/// forming one threshold.
double average_precision(std::span<const double> pos_scores,
                         std::span<const double> neg_scores);

struct ClusteringResult {
  std::vector<int> assignments;
  DenseMatrixd centroids;
  /// Sum of squared distances to the assigned centroids.
  double inertia = 0.0;
  /// Inertia after every assignment step.
  std::vector<double> inertia_trace;
  int iterations = 0;
};

/// Lloyd's algorithm from k-means++ seeds. Stops when no centroid moves by
/// `tol` or more, or after `max_iter` updates. An empty cluster is reseeded
/// at the point farthest from its centroid.
ClusteringResult kmeans(const DenseMatrixd& points, int k, Rng& rng, int max_iter = 300,
                        double tol = 1e-4);

/// Contingency table rows = distinct labels of `a`, columns = of `b`.
std::vector<std::vector<long>> contingency_table(std::span<const int> a,
                                                 std::span<const int> b);

/// Mutual information (nats) of a contingency table.
double mutual_information(const std::vector<std::vector<long>>& table);

/// Expected mutual information under the hypergeometric model with the
/// table's margins held fixed.
double expected_mutual_information(const std::vector<std::vector<long>>& table);

/// Adjusted mutual information with arithmetic-mean normalization and
/// natural logarithms. Returns 0 when the normalizer vanishes.
double adjusted_mutual_information(std::span<const int> pred, std::span<const int> truth);

/// Per-run values of one metric with their mean and sample std.
struct MetricSummary {
  std::string name;
  std::vector<double> per_run;
  double mean = 0.0;
  double std = 0.0;

  /// Std uses the n-1 denominator and is 0 for fewer than two runs.
  static MetricSummary from_values(std::string name, std::vector<double> values);
};

struct LinkPredictionScores {
  double auc;
  double ap;
};

/// Scores test pairs with σ(z_i·z_j), using μ for a VAE.
/// `a_norm` is the normalized TRAIN adjacency the model was fit on.
LinkPredictionScores evaluate_link_prediction(const Parameters<double>& params,
                                              const ModelSpec& spec, const EdgeSplit& split,
                                              const SparseMatrixd& a_norm,
                                              const FeatureMatrixd* features);

/// Runs k-means on the embedding (μ for a VAE) and scores it against
/// `graph.labels` with AMI.
double evaluate_clustering(const Parameters<double>& params, const ModelSpec& spec,
                           const Graph& graph, const SparseMatrixd& a_norm,
                           const FeatureMatrixd* features, int k, Rng& rng);

}  // namespace lingae

#endif  // LINGAE_EVAL_HPP_
