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

#ifndef LINGAE_MODELS_HPP_
#define LINGAE_MODELS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lingae/linalg.hpp"
#include "lingae/random.hpp"

namespace lingae {

enum class Encoder { kLinear, kGcn };

/// Declarative model description.
///
/// A linear encoder is a single propagation Ã·H⁰·W with no activation
/// (depth 1). A GCN encoder stacks `depth` propagations with ReLU on every
/// layer but the last. H⁰ is the identity when `use_features` is false and
/// the feature matrix otherwise.
struct ModelSpec {
  Encoder encoder = Encoder::kLinear;
  int depth = 1;
  bool variational = false;
  int embedding_dim = 16;
  std::vector<int> hidden_dims;
  bool use_features = false;

  static ModelSpec linear(bool variational, int embedding_dim = 16,
                          bool use_features = false) {
    return ModelSpec{Encoder::kLinear, 1, variational, embedding_dim, {},
                     use_features};
  }

  static ModelSpec gcn(int depth, bool variational, int embedding_dim = 16,
                       int hidden_dim = 32, bool use_features = false) {
    return ModelSpec{Encoder::kGcn,
                     depth,
                     variational,
                     embedding_dim,
                     std::vector<int>(depth > 1 ? depth - 1 : 0, hidden_dim),
                     use_features};
  }

  void validate() const {
    if (embedding_dim < 1) throw std::invalid_argument("embedding_dim must be >= 1");
    for (int h : hidden_dims) {
      if (h < 1) throw std::invalid_argument("hidden dims must be >= 1");
    }
    if (encoder == Encoder::kLinear) {
      if (depth != 1 || !hidden_dims.empty()) {
        throw std::invalid_argument("linear encoder requires depth 1 and no hidden layers");
      }
    } else {
      if (depth < 2) throw std::invalid_argument("gcn encoder requires depth >= 2");
      if (static_cast<int>(hidden_dims.size()) != depth - 1) {
        throw std::invalid_argument("gcn encoder requires depth-1 hidden dims");
      }
    }
  }

  /// Short identifier such as "linear_ae" or "gcn3_vae".
  std::string label() const {
    std::string base = encoder == Encoder::kLinear ? "linear"
                                                   : "gcn" + std::to_string(depth);
    return base + (variational ? "_vae" : "_ae");
  }

  /// Number of ReLU layers shared by every output.
  int trunk_layers() const { return depth - 1; }
};

/// Weight matrices. AE: W⁰..W^{L-1}. VAE: trunk W⁰..W^{L-2} followed by the
/// μ head and the log σ head (for the linear VAE only the two heads).
template <typename Scalar>
struct Parameters {
  std::vector<DenseMatrix<Scalar>> weights;

  std::size_t size() const { return weights.size(); }
};

/// Intermediates of one forward pass, consumed by the backward pass.
template <typename Scalar>
struct ForwardCache {
  /// H¹..H^{L-1} (post-ReLU). H⁰ is implicit: the identity or the features.
  std::vector<DenseMatrix<Scalar>> hidden;
  std::optional<DenseMatrix<Scalar>> mu;
  /// Raw head output, before clamping.
  std::optional<DenseMatrix<Scalar>> log_sigma;
  std::optional<DenseMatrix<Scalar>> epsilon;
  DenseMatrix<Scalar> z;
};

/// log σ is clamped to this range wherever it is exponentiated.
inline constexpr double kLogSigmaMin = -50.0;
inline constexpr double kLogSigmaMax = 10.0;

/// Default refusal threshold for materializing the n × n logit matrix.
inline constexpr Eigen::Index kDefaultDecoderNodeCap = 32768;

template <typename Scalar>
Scalar clamp_log_sigma(Scalar v) {
  return std::clamp(v, Scalar(kLogSigmaMin), Scalar(kLogSigmaMax));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

/// Column count of H⁰.
template <typename Scalar>
Eigen::Index input_dim(const SparseMatrix<Scalar>& a_norm,
                       const std::type_identity_t<FeatureMatrix<Scalar>>* features) {
  return features ? cols_of(*features) : a_norm.rows();
}

namespace detail {

inline void check_inputs(Eigen::Index n, Eigen::Index a_cols,
                         Eigen::Index feature_rows, bool has_features) {
  if (n != a_cols) throw DimensionError("normalized adjacency must be square");
  if (has_features && feature_rows != n) {
    throw DimensionError("feature rows " + std::to_string(feature_rows) +
                         " != node count " + std::to_string(n));
  }
}

/// Ã · H⁰ · w where H⁰ is the identity (never materialized) or X.
template <typename Scalar>
DenseMatrix<Scalar> propagate_input(const SparseMatrix<Scalar>& a_norm,
                                    const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                                    const DenseMatrix<Scalar>& w) {
  if (features) return spmm(a_norm, feature_product(*features, w));
  return spmm(a_norm, w);
}

template <typename Scalar>
DenseMatrix<Scalar> propagate(const SparseMatrix<Scalar>& a_norm,
                              const DenseMatrix<Scalar>& h,
                              const DenseMatrix<Scalar>& w) {
  return spmm(a_norm, gemm(h, w));
}

template <typename Scalar>
void relu_inplace(DenseMatrix<Scalar>& m) {
  m = m.cwiseMax(Scalar(0));
}

}  // namespace detail

/// Z = Ã W (featureless, W is n × d) or Z = Ã X W (W is f × d).
template <typename Scalar>
DenseMatrix<Scalar> encode_linear(const SparseMatrix<Scalar>& a_norm,
                                  const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                                  const DenseMatrix<Scalar>& w) {
  detail::check_inputs(a_norm.rows(), a_norm.cols(),
                       features ? rows_of(*features) : 0, features != nullptr);
  if (w.rows() != input_dim(a_norm, features)) {
    throw DimensionError("encode_linear: weight has " + std::to_string(w.rows()) +
                         " rows, input dim is " +
                         std::to_string(input_dim(a_norm, features)));
  }
  return detail::propagate_input(a_norm, features, w);
}

/// Glorot-uniform initialization, limit sqrt(6 / (fan_in + fan_out)).
template <typename Scalar>
DenseMatrix<Scalar> glorot_uniform(Eigen::Index fan_in, Eigen::Index fan_out,
                                   Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  DenseMatrix<Scalar> w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(dist(rng));
  return w;
}

/// Weight shapes implied by the spec for an input of `in_dim` columns.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> parameter_shapes(
    const ModelSpec& spec, Eigen::Index in_dim) {
  spec.validate();
  std::vector<Eigen::Index> dims{in_dim};
  for (int h : spec.hidden_dims) dims.push_back(h);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  for (int l = 0; l < spec.trunk_layers(); ++l) shapes.emplace_back(dims[l], dims[l + 1]);
  const Eigen::Index last_in = dims.back();
  shapes.emplace_back(last_in, spec.embedding_dim);
  if (spec.variational) shapes.emplace_back(last_in, spec.embedding_dim);
  return shapes;
}

template <typename Scalar>
Parameters<Scalar> initialize_parameters(const ModelSpec& spec,
                                         Eigen::Index in_dim, Rng& rng) {
  Parameters<Scalar> params;
  for (const auto& [rows, cols] : parameter_shapes(spec, in_dim)) {
    params.weights.push_back(glorot_uniform<Scalar>(rows, cols, rng));
  }
  return params;
}

template <typename Scalar>
void check_parameters(const ModelSpec& spec, Eigen::Index in_dim,
                      const Parameters<Scalar>& params) {
  const auto shapes = parameter_shapes(spec, in_dim);
  if (shapes.size() != params.size()) {
    throw DimensionError("expected " + std::to_string(shapes.size()) +
                         " weight matrices for " + spec.label() + ", got " +
                         std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto& w = params.weights[i];
    if (w.rows() != shapes[i].first || w.cols() != shapes[i].second) {
      throw DimensionError("weight " + std::to_string(i) + " is " +
                           std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                           ", expected " + std::to_string(shapes[i].first) + "x" +
                           std::to_string(shapes[i].second));
    }
  }
}

/// Deterministic encoder pass for any spec. Fills `hidden`, and either `z`
/// (AE) or `mu`/`log_sigma` (VAE, with `z` set to `mu` and no noise drawn).
template <typename Scalar>
ForwardCache<Scalar> encode(const SparseMatrix<Scalar>& a_norm,
                            const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                            const Parameters<Scalar>& params,
                            const ModelSpec& spec) {
  detail::check_inputs(a_norm.rows(), a_norm.cols(),
                       features ? rows_of(*features) : 0, features != nullptr);
  check_parameters(spec, input_dim(a_norm, features), params);

  ForwardCache<Scalar> cache;
  const int trunk = spec.trunk_layers();
  for (int l = 0; l < trunk; ++l) {
    DenseMatrix<Scalar> h =
        l == 0 ? detail::propagate_input(a_norm, features, params.weights[0])
               : detail::propagate(a_norm, cache.hidden.back(), params.weights[l]);
    detail::relu_inplace(h);
    cache.hidden.push_back(std::move(h));
  }
  auto head = [&](std::size_t index) {
    return trunk == 0
               ? detail::propagate_input(a_norm, features, params.weights[index])
               : detail::propagate(a_norm, cache.hidden.back(), params.weights[index]);
  };
  if (spec.variational) {
    cache.mu = head(trunk);
    cache.log_sigma = head(trunk + 1);
    cache.z = *cache.mu;
  } else {
    cache.z = head(trunk);
  }
  return cache;
}

/// Multi-layer GCN encoder: H^l = ReLU(Ã H^{l-1} W^{l-1}) for l < L, last
/// layer (or the μ / log σ heads) without activation.
template <typename Scalar>
ForwardCache<Scalar> encode_gcn(const SparseMatrix<Scalar>& a_norm,
                                const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                                const Parameters<Scalar>& params,
                                const ModelSpec& spec) {
  if (spec.encoder != Encoder::kGcn || spec.depth < 2) {
    throw std::invalid_argument("encode_gcn requires a gcn spec with depth >= 2");
  }
  return encode(a_norm, features, params, spec);
}

template <typename Scalar>
struct Reparameterized {
  DenseMatrix<Scalar> z;
  DenseMatrix<Scalar> epsilon;
};

/// z = μ + exp(log σ) ⊙ ε with a fixed noise matrix.
template <typename Scalar>
DenseMatrix<Scalar> reparameterize_with(const DenseMatrix<Scalar>& mu,
                                        const DenseMatrix<Scalar>& log_sigma,
                                        const DenseMatrix<Scalar>& epsilon) {
  if (mu.rows() != log_sigma.rows() || mu.cols() != log_sigma.cols() ||
      mu.rows() != epsilon.rows() || mu.cols() != epsilon.cols()) {
    throw DimensionError("reparameterize: mu, log_sigma and epsilon differ in shape");
  }
  DenseMatrix<Scalar> z(mu.rows(), mu.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z.data()[i] = mu.data()[i] +
                  std::exp(clamp_log_sigma(log_sigma.data()[i])) * epsilon.data()[i];
  }
  return z;
}

template <typename Scalar>
DenseMatrix<Scalar> standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMatrix<Scalar> eps(rows, cols);
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = static_cast<Scalar>(dist(rng));
  return eps;
}

/// Draws ε ~ N(0, I) and returns it alongside z = μ + σ ⊙ ε.
template <typename Scalar>
Reparameterized<Scalar> reparameterize(const DenseMatrix<Scalar>& mu,
                                       const DenseMatrix<Scalar>& log_sigma,
                                       Rng& rng) {
  if (mu.rows() != log_sigma.rows() || mu.cols() != log_sigma.cols()) {
    throw DimensionError("reparameterize: mu and log_sigma differ in shape");
  }
  DenseMatrix<Scalar> eps = standard_normal<Scalar>(mu.rows(), mu.cols(), rng);
  DenseMatrix<Scalar> z = reparameterize_with(mu, log_sigma, eps);
  return {std::move(z), std::move(eps)};
}

/// Training-time forward pass; a VAE samples fresh noise from `rng`.
template <typename Scalar>
ForwardCache<Scalar> forward(const SparseMatrix<Scalar>& a_norm,
                             const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                             const Parameters<Scalar>& params,
                             const ModelSpec& spec, Rng& rng) {
  ForwardCache<Scalar> cache = encode(a_norm, features, params, spec);
  if (spec.variational) {
    auto [z, eps] = reparameterize(*cache.mu, *cache.log_sigma, rng);
    cache.z = std::move(z);
    cache.epsilon = std::move(eps);
  }
  return cache;
}

/// Forward pass with frozen noise (gradient checks).
template <typename Scalar>
ForwardCache<Scalar> forward(const SparseMatrix<Scalar>& a_norm,
                             const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                             const Parameters<Scalar>& params,
                             const ModelSpec& spec,
                             const DenseMatrix<Scalar>& epsilon) {
  ForwardCache<Scalar> cache = encode(a_norm, features, params, spec);
  if (spec.variational) {
    cache.z = reparameterize_with(*cache.mu, *cache.log_sigma, epsilon);
    cache.epsilon = epsilon;
  }
  return cache;
}

/// Embedding used for evaluation: Z for an AE, the posterior mean μ for a VAE.
template <typename Scalar>
DenseMatrix<Scalar> embed(const SparseMatrix<Scalar>& a_norm,
                          const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                          const Parameters<Scalar>& params, const ModelSpec& spec) {
  return std::move(encode(a_norm, features, params, spec).z);
}

/// Full n × n logit matrix Z Zᵀ, exactly symmetric.
template <typename Scalar>
DenseMatrix<Scalar> decode_inner_product_logits(
    const DenseMatrix<Scalar>& z, Eigen::Index max_nodes = kDefaultDecoderNodeCap) {
  const Eigen::Index n = z.rows();
  if (n > max_nodes) {
    throw std::length_error("decode_inner_product_logits: " + std::to_string(n) +
                            " nodes exceeds the dense decoder cap of " +
                            std::to_string(max_nodes));
  }
  DenseMatrix<Scalar> logits = gemm(z, z, false, /*transpose_b=*/true);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) logits(i, j) = logits(j, i);
  }
  return logits;
}

using NodePair = std::pair<int, int>;

/// σ(z_i · z_j) per pair, without forming the n × n matrix.
template <typename Scalar>
std::vector<Scalar> score_edges(const DenseMatrix<Scalar>& z,
                                const std::vector<NodePair>& pairs) {
  std::vector<Scalar> scores;
  scores.reserve(pairs.size());
  const Eigen::Index n = z.rows();
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw std::out_of_range("score_edges: pair (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") out of range for " +
                              std::to_string(n) + " nodes");
    }
    scores.push_back(sigmoid<Scalar>(z.row(i).dot(z.row(j))));
  }
  return scores;
}

}  // namespace lingae

#endif  // LINGAE_MODELS_HPP_
