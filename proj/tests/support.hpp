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

// Test-only helpers: random instances and brute-force oracles that share no
// code with the library routines they check.

#ifndef LINGAE_TESTS_SUPPORT_HPP_
#define LINGAE_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "lingae/models.hpp"
#include "lingae/random.hpp"
#include "lingae/training.hpp"

namespace lingae::testing {

inline SparseMatrixd random_adjacency(int n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) {
        t.push_back({i, j, 1});
        t.push_back({j, i, 1});
      }
  // Keep the graph connected enough that no node is isolated.
  for (int i = 0; i + 1 < n; ++i) {
    t.push_back({i, i + 1, 1});
    t.push_back({i + 1, i, 1});
  }
  auto a = sparse_from_triplets(n, n, t);
  for (int k = 0; k < a.nonZeros(); ++k) a.valuePtr()[k] = 1.0;
  return a;
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t entries = 0;
};

/// Central differences of the dense-route objective against the analytic
/// gradients, one weight entry at a time, with the VAE noise frozen.
inline GradientCheck finite_difference_check(const ModelSpec& spec, int n, bool featured,
                                             std::uint64_t seed, double h = 1e-5) {
  Rng rng(seed);
  const SparseMatrixd a = random_adjacency(n, 0.3, rng);
  const SparseMatrixd a_norm = normalize_adjacency(a);
  const SparseMatrixd target = reconstruction_target(a);
  const LossConfig cfg = LossConfig::from_train_adjacency(a, spec.variational);
  std::optional<FeatureMatrixd> x;
  if (featured) x = standard_normal<double>(n, 5, rng);
  const FeatureMatrixd* xp = x ? &*x : nullptr;

  Parameters<double> params = initialize_parameters<double>(spec, input_dim(a_norm, xp), rng);
  // Scale up so the loss is away from its flat initial regime.
  for (auto& w : params.weights) w *= 2.0;
  const DenseMatrixd eps = standard_normal<double>(n, spec.embedding_dim, rng);

  const auto cache = forward(a_norm, xp, params, spec, eps);
  const auto grads = backward(cache, a_norm, xp, target, params, spec, cfg);

  GradientCheck out;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (Eigen::Index e = 0; e < params.weights[k].size(); ++e) {
      const double saved = params.weights[k].data()[e];
      params.weights[k].data()[e] = saved + h;
      const double up = objective(forward(a_norm, xp, params, spec, eps), target, spec, cfg);
      params.weights[k].data()[e] = saved - h;
      const double down = objective(forward(a_norm, xp, params, spec, eps), target, spec, cfg);
      params.weights[k].data()[e] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = grads.grads[k].data()[e];
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      out.max_relative_error = std::max(out.max_relative_error, std::abs(numeric - analytic) / scale);
      ++out.entries;
    }
  }
  return out;
}

/// Fraction of (positive, negative) pairs ranked correctly, ties one half.
inline double brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double q : neg) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

/// Walks the distinct thresholds from the top, adding precision × recall gain.
inline double brute_ap(const std::vector<double>& pos, const std::vector<double>& neg) {
  std::set<double, std::greater<>> thresholds(pos.begin(), pos.end());
  thresholds.insert(neg.begin(), neg.end());
  double ap = 0.0;
  double previous_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (double p : pos) tp += p >= t;
    for (double q : neg) fp += q >= t;
    const double recall = tp / static_cast<double>(pos.size());
    ap += (recall - previous_recall) * tp / (tp + fp);
    previous_recall = recall;
  }
  return ap;
}

inline double plain_mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ma, mb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ma[a[i]] += 1;
    mb[b[i]] += 1;
  }
  double mi = 0.0;
  for (const auto& [key, c] : joint) mi += c / n * std::log(n * c / (ma[key.first] * mb[key.second]));
  return mi;
}

inline double plain_entropy(const std::vector<int>& a) {
  std::map<int, double> counts;
  for (int v : a) counts[v] += 1;
  double h = 0.0;
  for (const auto& [label, c] : counts) h -= c / a.size() * std::log(c / a.size());
  return h;
}

/// E[MI] as the average MI over every permutation of `b` against `a`,
/// which is exactly the fixed-margin hypergeometric model. Only for tiny n.
inline double permutation_emi(const std::vector<int>& a, std::vector<int> b) {
  std::sort(b.begin(), b.end());
  double total = 0.0;
  double count = 0.0;
  std::vector<int> index(b.size());
  std::iota(index.begin(), index.end(), 0);
  std::vector<int> permuted(b.size());
  do {
    for (std::size_t i = 0; i < b.size(); ++i) permuted[i] = b[index[i]];
    total += plain_mutual_information(a, permuted);
    count += 1;
  } while (std::next_permutation(index.begin(), index.end()));
  return total / count;
}

/// Direct hypergeometric sum with binomials from a Pascal triangle.
inline double hypergeometric_emi(const std::vector<int>& a, const std::vector<int>& b) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<long double>> c(n + 1, std::vector<long double>(n + 1, 0.0L));
  for (int i = 0; i <= n; ++i) {
    c[i][0] = 1.0L;
    for (int j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  std::map<int, int> ma, mb;
  for (int v : a) ma[v]++;
  for (int v : b) mb[v]++;
  long double emi = 0.0L;
  for (const auto& [la, ai] : ma) {
    for (const auto& [lb, bj] : mb) {
      for (int nij = std::max(1, ai + bj - n); nij <= std::min(ai, bj); ++nij) {
        const long double p = c[bj][nij] * c[n - bj][ai - nij] / c[n][ai];
        emi += p * nij / n * std::log(static_cast<long double>(n) * nij / (static_cast<long double>(ai) * bj));
      }
    }
  }
  return static_cast<double>(emi);
}

inline double brute_ami(const std::vector<int>& a, const std::vector<int>& b) {
  const double mi = plain_mutual_information(a, b);
  const double emi = hypergeometric_emi(a, b);
  const double denom = 0.5 * (plain_entropy(a) + plain_entropy(b)) - emi;
  if (std::abs(denom) < 1e-12) return 0.0;
  return (mi - emi) / denom;
}

}  // namespace lingae::testing

#endif  // LINGAE_TESTS_SUPPORT_HPP_
