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

#ifndef LINGAE_TRAINING_HPP_
#define LINGAE_TRAINING_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lingae/linalg.hpp"
#include "lingae/models.hpp"
#include "lingae/random.hpp"

namespace lingae {

/// Raised when a loss or gradient stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

/// Weighting of the all-pairs reconstruction loss.
///
/// With S the number of positive targets (stored train entries, i.e. both
/// directions of every edge, plus the n diagonal self-loops):
///   pos_weight = (n² - S) / S,   norm = n² / (2 (n² - S)).
struct LossConfig {
  double pos_weight = 1.0;
  double norm = 1.0;
  double kl_scale = 0.0;

  static LossConfig from_train_adjacency(const SparseMatrixd& a_train,
                                         bool variational) {
    const double n = static_cast<double>(a_train.rows());
    const double positives = static_cast<double>(a_train.nonZeros()) + n;
    const double total = n * n;
    if (positives >= total) {
      throw std::invalid_argument("loss weighting undefined for a complete graph");
    }
    LossConfig cfg;
    cfg.pos_weight = (total - positives) / positives;
    cfg.norm = total / (2.0 * (total - positives));
    cfg.kl_scale = variational ? 1.0 / n : 0.0;
    return cfg;
  }
};

/// Binary positive-label pattern A_train + I.
template <typename Scalar>
SparseMatrix<Scalar> reconstruction_target(const SparseMatrix<Scalar>& a_train) {
  std::vector<Eigen::Triplet<Scalar, int>> entries;
  entries.reserve(static_cast<std::size_t>(a_train.nonZeros() + a_train.rows()));
  for (Eigen::Index r = 0; r < a_train.outerSize(); ++r) {
    entries.emplace_back(static_cast<int>(r), static_cast<int>(r), Scalar(1));
    for (typename SparseMatrix<Scalar>::InnerIterator it(a_train, r); it; ++it) {
      if (it.col() != r) entries.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), Scalar(1));
    }
  }
  SparseMatrix<Scalar> target(a_train.rows(), a_train.cols());
  target.setFromTriplets(entries.begin(), entries.end(),
                         [](const Scalar&, const Scalar& b) { return b; });
  target.makeCompressed();
  return target;
}

namespace detail {

/// log(1 + e^{-|x|}) + max(-x, 0) = -log σ(x).
template <typename Scalar>
Scalar neg_log_sigmoid(Scalar x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(-x, Scalar(0));
}

/// Weighted BCE of one logit against label y ∈ {0, 1}:
/// (1 - y) x + (1 + (w - 1) y) (-log σ(x)).
template <typename Scalar>
Scalar weighted_bce(Scalar x, bool positive, Scalar pos_weight) {
  return positive ? pos_weight * neg_log_sigmoid(x) : x + neg_log_sigmoid(x);
}

/// d/dx of weighted_bce: σ(x)(1 - y + w y) - w y.
template <typename Scalar>
Scalar weighted_bce_grad(Scalar x, bool positive, Scalar pos_weight) {
  const Scalar s = sigmoid(x);
  return positive ? pos_weight * (s - Scalar(1)) : s;
}

/// Loss and derivative of one entry sharing a single exponential.
template <typename Scalar>
Scalar weighted_bce_with_grad(Scalar x, bool positive, Scalar pos_weight, Scalar& grad) {
  const Scalar e = std::exp(-std::abs(x));
  const Scalar nls = std::log1p(e) + std::max(-x, Scalar(0));
  const Scalar s = x >= Scalar(0) ? Scalar(1) / (Scalar(1) + e) : e / (Scalar(1) + e);
  if (positive) {
    grad = pos_weight * (s - Scalar(1));
    return pos_weight * nls;
  }
  grad = s;
  return x + nls;
}

}  // namespace detail

/// norm × mean over all n² entries of the pos_weight-weighted binary cross
/// entropy, evaluated directly from logits.
template <typename Scalar>
Scalar reconstruction_loss(const DenseMatrix<Scalar>& logits,
                           const SparseMatrix<Scalar>& target,
                           const LossConfig& cfg) {
  if (logits.rows() != target.rows() || logits.cols() != target.cols()) {
    throw DimensionError("reconstruction_loss: logits and target differ in shape");
  }
  const Scalar w = static_cast<Scalar>(cfg.pos_weight);
  Scalar sum(0);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    typename SparseMatrix<Scalar>::InnerIterator it(target, i);
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      const bool positive = it && it.col() == j;
      if (positive) ++it;
      sum += detail::weighted_bce(logits(i, j), positive, w);
    }
  }
  return static_cast<Scalar>(cfg.norm) * sum /
         static_cast<Scalar>(logits.rows() * logits.cols());
}

/// (1/n) Σ ½(exp(2 log σ) + μ² - 1 - 2 log σ), log σ clamped.
template <typename Scalar>
Scalar kl_divergence(const DenseMatrix<Scalar>& mu,
                     const DenseMatrix<Scalar>& log_sigma) {
  if (mu.rows() != log_sigma.rows() || mu.cols() != log_sigma.cols()) {
    throw DimensionError("kl_divergence: mu and log_sigma differ in shape");
  }
  Scalar sum(0);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const Scalar ls = clamp_log_sigma(log_sigma.data()[i]);
    const Scalar m = mu.data()[i];
    sum += Scalar(0.5) * (std::exp(Scalar(2) * ls) + m * m - Scalar(1) - Scalar(2) * ls);
  }
  return mu.rows() == 0 ? Scalar(0) : sum / static_cast<Scalar>(mu.rows());
}

template <typename Scalar>
struct ReconstructionResult {
  Scalar loss;
  /// ∂loss/∂Z, n × d.
  DenseMatrix<Scalar> grad_z;
};

/// Reconstruction loss of σ(Z Zᵀ) and its gradient with respect to Z,
/// streamed over blocks of rows so memory stays O(block_rows × n).
///
/// The logit gradient G is symmetric, so ∂loss/∂Z = (G + Gᵀ) Z = 2 G Z.
template <typename Scalar>
ReconstructionResult<Scalar> reconstruction_loss_and_gradient(
    const DenseMatrix<Scalar>& z, const SparseMatrix<Scalar>& target,
    const LossConfig& cfg, Eigen::Index block_rows = 256) {
  const Eigen::Index n = z.rows();
  if (target.rows() != n || target.cols() != n) {
    throw DimensionError("reconstruction target must be n x n");
  }
  const Scalar w = static_cast<Scalar>(cfg.pos_weight);
  const Scalar scale = static_cast<Scalar>(cfg.norm) / (static_cast<Scalar>(n) * static_cast<Scalar>(n));
  ReconstructionResult<Scalar> out{Scalar(0), DenseMatrix<Scalar>::Zero(n, z.cols())};
  block_rows = std::max<Eigen::Index>(1, block_rows);
  DenseMatrix<Scalar> block;
  Scalar sum(0);
  for (Eigen::Index start = 0; start < n; start += block_rows) {
    const Eigen::Index rows = std::min(block_rows, n - start);
    block.noalias() = z.middleRows(start, rows) * z.transpose();
    for (Eigen::Index b = 0; b < rows; ++b) {
      typename SparseMatrix<Scalar>::InnerIterator it(target, start + b);
      Scalar* row = block.row(b).data();
      for (Eigen::Index j = 0; j < n; ++j) {
        const bool positive = it && it.col() == j;
        if (positive) ++it;
        Scalar grad;
        sum += detail::weighted_bce_with_grad(row[j], positive, w, grad);
        row[j] = grad * scale;
      }
    }
    out.grad_z.middleRows(start, rows).noalias() = Scalar(2) * block * z;
  }
  out.loss = sum * scale;
  return out;
}

/// Gradients mirroring Parameters::weights.
template <typename Scalar>
struct GradientSet {
  std::vector<DenseMatrix<Scalar>> grads;
};

template <typename Scalar>
struct LossAndGradients {
  Scalar reconstruction;
  Scalar kl;
  /// reconstruction + kl_scale × kl.
  Scalar total;
  GradientSet<Scalar> gradients;
};

namespace detail {

template <typename Scalar>
void check_cache(const ForwardCache<Scalar>& cache, const ModelSpec& spec,
                 Eigen::Index n) {
  if (static_cast<int>(cache.hidden.size()) != spec.trunk_layers()) {
    throw std::invalid_argument("forward cache depth does not match the model spec");
  }
  if (cache.z.rows() != n || cache.z.cols() != spec.embedding_dim) {
    throw std::invalid_argument("forward cache embedding has the wrong shape");
  }
  if (spec.variational && !(cache.mu && cache.log_sigma && cache.epsilon)) {
    throw std::invalid_argument("variational spec needs mu, log_sigma and epsilon in the cache");
  }
}

}  // namespace detail

/// Objective norm·BCE + kl_scale·KL and exact gradients for every weight.
template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const ForwardCache<Scalar>& cache,
                                            const SparseMatrix<Scalar>& a_norm,
                                            const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                                            const SparseMatrix<Scalar>& target,
                                            const Parameters<Scalar>& params,
                                            const ModelSpec& spec,
                                            const LossConfig& cfg,
                                            Eigen::Index block_rows = 256) {
  const Eigen::Index n = a_norm.rows();
  detail::check_cache(cache, spec, n);
  check_parameters(spec, input_dim(a_norm, features), params);

  auto rec = reconstruction_loss_and_gradient(cache.z, target, cfg, block_rows);
  LossAndGradients<Scalar> out{rec.loss, Scalar(0), rec.loss, {}};
  out.gradients.grads.resize(params.size());

  const int trunk = spec.trunk_layers();
  // Gradient with respect to the pre-head activation H^{L-1}; unused when
  // there is no trunk.
  DenseMatrix<Scalar> grad_hidden;

  // Pushes ∂/∂(Ã H W) back through one propagation: stores ∂/∂W in slot
  // `index` and accumulates ∂/∂H into grad_hidden when H is a trunk layer.
  auto back_through_layer = [&](const DenseMatrix<Scalar>& grad_out, std::size_t index,
                                int input_layer, bool accumulate) {
    DenseMatrix<Scalar> t = spmm_transposed(a_norm, grad_out);
    if (input_layer == 0) {
      out.gradients.grads[index] =
          features ? feature_product_transposed(*features, t) : std::move(t);
      return;
    }
    const DenseMatrix<Scalar>& h = cache.hidden[input_layer - 1];
    out.gradients.grads[index] = gemm(h, t, /*transpose_a=*/true);
    DenseMatrix<Scalar> g = gemm(t, params.weights[index], false, /*transpose_b=*/true);
    if (accumulate && grad_hidden.size() > 0) {
      grad_hidden += g;
    } else {
      grad_hidden = std::move(g);
    }
  };

  if (spec.variational) {
    const auto& mu = *cache.mu;
    const auto& log_sigma = *cache.log_sigma;
    const auto& eps = *cache.epsilon;
    out.kl = kl_divergence(mu, log_sigma);
    out.total = out.reconstruction + static_cast<Scalar>(cfg.kl_scale) * out.kl;

    const Scalar kl_coef = static_cast<Scalar>(cfg.kl_scale) / static_cast<Scalar>(n);
    DenseMatrix<Scalar> grad_mu = rec.grad_z + kl_coef * mu;
    DenseMatrix<Scalar> grad_log_sigma(log_sigma.rows(), log_sigma.cols());
    for (Eigen::Index i = 0; i < log_sigma.size(); ++i) {
      const Scalar raw = log_sigma.data()[i];
      const bool inside = raw > Scalar(kLogSigmaMin) && raw < Scalar(kLogSigmaMax);
      const Scalar sigma = std::exp(raw);
      grad_log_sigma.data()[i] =
          inside ? rec.grad_z.data()[i] * sigma * eps.data()[i] +
                       kl_coef * (sigma * sigma - Scalar(1))
                 : Scalar(0);
    }
    back_through_layer(grad_mu, trunk, trunk, false);
    back_through_layer(grad_log_sigma, trunk + 1, trunk, true);
  } else {
    back_through_layer(rec.grad_z, trunk, trunk, false);
  }

  for (int l = trunk - 1; l >= 0; --l) {
    // H^{l+1} = ReLU(P): the mask is H^{l+1} > 0.
    const DenseMatrix<Scalar>& h = cache.hidden[l];
    DenseMatrix<Scalar> grad_pre =
        (h.array() > Scalar(0)).select(grad_hidden.array(), Scalar(0)).matrix();
    back_through_layer(grad_pre, static_cast<std::size_t>(l), l, false);
  }
  return out;
}

template <typename Scalar>
GradientSet<Scalar> backward(const ForwardCache<Scalar>& cache,
                             const SparseMatrix<Scalar>& a_norm,
                             const std::type_identity_t<FeatureMatrix<Scalar>>* features,
                             const SparseMatrix<Scalar>& target,
                             const Parameters<Scalar>& params, const ModelSpec& spec,
                             const LossConfig& cfg) {
  return loss_and_gradients(cache, a_norm, features, target, params, spec, cfg).gradients;
}

/// Objective value of a cache, via the dense logit matrix.
template <typename Scalar>
Scalar objective(const ForwardCache<Scalar>& cache, const SparseMatrix<Scalar>& target,
                 const ModelSpec& spec, const LossConfig& cfg) {
  Scalar loss = reconstruction_loss(decode_inner_product_logits(cache.z), target, cfg);
  if (spec.variational) {
    loss += static_cast<Scalar>(cfg.kl_scale) * kl_divergence(*cache.mu, *cache.log_sigma);
  }
  return loss;
}

/// Adam state; moments mirror the parameter shapes.
template <typename Scalar>
struct OptimizerState {
  std::int64_t step = 0;
  std::vector<DenseMatrix<Scalar>> first_moment;
  std::vector<DenseMatrix<Scalar>> second_moment;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_hat = 1e-8;

  static OptimizerState for_parameters(const Parameters<Scalar>& params,
                                       double learning_rate) {
    OptimizerState state;
    state.learning_rate = learning_rate;
    for (const auto& w : params.weights) {
      state.first_moment.push_back(DenseMatrix<Scalar>::Zero(w.rows(), w.cols()));
      state.second_moment.push_back(DenseMatrix<Scalar>::Zero(w.rows(), w.cols()));
    }
    return state;
  }
};

/// One bias-corrected Adam update, in place.
template <typename Scalar>
void adam_step(Parameters<Scalar>& params, const GradientSet<Scalar>& grads,
               OptimizerState<Scalar>& state) {
  if (grads.grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw DimensionError("adam_step: parameter, gradient and moment counts differ");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& g = grads.grads[k];
    if (g.rows() != params.weights[k].rows() || g.cols() != params.weights[k].cols()) {
      throw DimensionError("adam_step: gradient " + std::to_string(k) + " has the wrong shape");
    }
    if (!g.allFinite()) {
      throw DivergenceError("adam_step: non-finite gradient for weight " + std::to_string(k),
                            static_cast<int>(state.step));
    }
  }
  state.step += 1;
  const Scalar b1 = static_cast<Scalar>(state.beta1);
  const Scalar b2 = static_cast<Scalar>(state.beta2);
  const Scalar lr = static_cast<Scalar>(state.learning_rate);
  const Scalar eps = static_cast<Scalar>(state.epsilon_hat);
  const Scalar correction1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar correction2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    const auto& g = grads.grads[k];
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
    params.weights[k].array() -=
        lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  }
}

struct TrainingConfig {
  int epochs = 200;
  double learning_rate = 0.01;
  /// Row block of the streamed reconstruction loss.
  Eigen::Index block_rows = 256;
};

template <typename Scalar>
struct TrainResult {
  Parameters<Scalar> params;
  /// Objective at each epoch, evaluated before that epoch's update.
  std::vector<Scalar> loss_trace;
};

/// Called after every update with (epoch index, current parameters).
template <typename Scalar>
using EpochCallback = std::function<void(int, const Parameters<Scalar>&)>;

/// Full-batch training: per epoch one forward pass (fresh noise for a VAE),
/// one backward pass and one Adam step. Initialization and noise both draw
/// from `rng`.
template <typename Scalar>
TrainResult<Scalar> train(const SparseMatrix<Scalar>& a_train,
                          const std::type_identity_t<FeatureMatrix<Scalar>>* features, const ModelSpec& spec,
                          const TrainingConfig& hp, Rng& rng,
                          const EpochCallback<Scalar>& on_epoch = {}) {
  spec.validate();
  if (hp.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (spec.use_features && !features) {
    throw std::invalid_argument("model uses features but none were provided");
  }
  const FeatureMatrix<Scalar>* x = spec.use_features ? features : nullptr;
  const SparseMatrix<Scalar> a_norm = normalize_adjacency(a_train);
  const SparseMatrix<Scalar> target = reconstruction_target(a_train);
  const LossConfig cfg = LossConfig::from_train_adjacency(a_train.template cast<double>(),
                                                          spec.variational);

  TrainResult<Scalar> result;
  result.params = initialize_parameters<Scalar>(spec, input_dim(a_norm, x), rng);
  auto state = OptimizerState<Scalar>::for_parameters(result.params, hp.learning_rate);
  result.loss_trace.reserve(static_cast<std::size_t>(hp.epochs));
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    const ForwardCache<Scalar> cache = forward(a_norm, x, result.params, spec, rng);
    auto step = loss_and_gradients(cache, a_norm, x, target, result.params, spec, cfg,
                                   hp.block_rows);
    if (!std::isfinite(static_cast<double>(step.total))) {
      throw DivergenceError("training diverged: non-finite loss at epoch " +
                                std::to_string(epoch),
                            epoch);
    }
    result.loss_trace.push_back(step.total);
    try {
      adam_step(result.params, step.gradients, state);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at epoch " + std::to_string(epoch),
                            epoch);
    }
    if (on_epoch) on_epoch(epoch, result.params);
  }
  return result;
}

}  // namespace lingae

#endif  // LINGAE_TRAINING_HPP_
