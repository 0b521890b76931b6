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

#ifndef LINGAE_LINALG_HPP_
#define LINGAE_LINALG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lingae {

/// Row-major dense matrix. Holds weights, embeddings and activations.
template <typename Scalar>
using DenseMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Compressed sparse row matrix. Once compressed, `outerIndexPtr()` is the
/// row offset array, `innerIndexPtr()` the column indices and `valuePtr()`
/// the values; column indices within a row are strictly increasing.
template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Node features are either a sparse bag-of-words matrix or dense reals.
template <typename Scalar>
using FeatureMatrix = std::variant<SparseMatrix<Scalar>, DenseMatrix<Scalar>>;

using DenseMatrixd = DenseMatrix<double>;
using SparseMatrixd = SparseMatrix<double>;
using FeatureMatrixd = FeatureMatrix<double>;
using Vectord = Vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Triplet {
  int row;
  int col;
  double value;
};

/// Builds a canonical CSR matrix from an unordered triplet list. Duplicate
/// coordinates are summed.
template <typename Scalar = double>
SparseMatrix<Scalar> sparse_from_triplets(int n_rows, int n_cols,
                                          const std::vector<Triplet>& triplets) {
  std::vector<Eigen::Triplet<Scalar, int>> entries;
  entries.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
      throw DimensionError("triplet (" + std::to_string(t.row) + ", " +
                           std::to_string(t.col) + ") outside " +
                           std::to_string(n_rows) + "x" +
                           std::to_string(n_cols));
    }
    entries.emplace_back(t.row, t.col, static_cast<Scalar>(t.value));
  }
  SparseMatrix<Scalar> out(n_rows, n_cols);
  out.setFromTriplets(entries.begin(), entries.end());
  out.makeCompressed();
  return out;
}

template <typename Scalar>
SparseMatrix<Scalar> sparse_identity(int n) {
  SparseMatrix<Scalar> eye(n, n);
  eye.setIdentity();
  eye.makeCompressed();
  return eye;
}

/// Checks the CSR invariants: monotone offsets, strictly increasing
/// in-range column indices per row.
template <typename Scalar>
bool is_canonical(const SparseMatrix<Scalar>& m) {
  if (!m.isCompressed()) return false;
  const int* offsets = m.outerIndexPtr();
  const int* cols = m.innerIndexPtr();
  if (offsets[0] != 0 || offsets[m.rows()] != m.nonZeros()) return false;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (offsets[r + 1] < offsets[r]) return false;
    for (int k = offsets[r]; k < offsets[r + 1]; ++k) {
      if (cols[k] < 0 || cols[k] >= m.cols()) return false;
      if (k > offsets[r] && cols[k] <= cols[k - 1]) return false;
    }
  }
  return true;
}

/// Exact structural and numerical symmetry.
template <typename Scalar>
bool is_symmetric(const SparseMatrix<Scalar>& m) {
  if (m.rows() != m.cols()) return false;
  SparseMatrix<Scalar> t = m.transpose();
  t.makeCompressed();
  if (t.nonZeros() != m.nonZeros()) return false;
  for (Eigen::Index i = 0; i < m.nonZeros(); ++i) {
    if (t.innerIndexPtr()[i] != m.innerIndexPtr()[i] ||
        t.valuePtr()[i] != m.valuePtr()[i])
      return false;
  }
  for (Eigen::Index r = 0; r <= m.rows(); ++r) {
    if (t.outerIndexPtr()[r] != m.outerIndexPtr()[r]) return false;
  }
  return true;
}

/// Weighted degree per node, plus one per node when `add_self_loops`.
template <typename Scalar>
Vector<Scalar> degree_vector(const SparseMatrix<Scalar>& adjacency,
                             bool add_self_loops) {
  if (adjacency.rows() != adjacency.cols()) {
    throw DimensionError("degree_vector: adjacency must be square");
  }
  Vector<Scalar> deg(adjacency.rows());
  for (Eigen::Index r = 0; r < adjacency.rows(); ++r) {
    Scalar sum = add_self_loops ? Scalar(1) : Scalar(0);
    for (typename SparseMatrix<Scalar>::InnerIterator it(adjacency, r); it;
         ++it) {
      sum += it.value();
    }
    deg(r) = sum;
  }
  return deg;
}

/// Symmetric normalization with self-loops: D^{-1/2} (A + I) D^{-1/2}, D the
/// degree matrix of A + I. Entries (i,j) and (j,i) are computed by the same
/// expression on the same operands, so the result is exactly symmetric.
template <typename Scalar>
SparseMatrix<Scalar> normalize_adjacency(const SparseMatrix<Scalar>& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (n != adjacency.cols()) {
    throw DimensionError("normalize_adjacency: adjacency must be square, got " +
                         std::to_string(n) + "x" +
                         std::to_string(adjacency.cols()));
  }
  Vector<Scalar> deg = degree_vector(adjacency, /*add_self_loops=*/true);
  Vector<Scalar> inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt(i) = Scalar(1) / std::sqrt(deg(i));

  std::vector<Eigen::Triplet<Scalar, int>> entries;
  entries.reserve(static_cast<std::size_t>(adjacency.nonZeros() + n));
  for (Eigen::Index r = 0; r < n; ++r) {
    bool has_diag = false;
    for (typename SparseMatrix<Scalar>::InnerIterator it(adjacency, r); it;
         ++it) {
      if (it.value() < Scalar(0)) {
        throw std::invalid_argument("normalize_adjacency: negative edge weight");
      }
      const Eigen::Index c = it.col();
      Scalar a = it.value();
      if (c == r) {
        a += Scalar(1);
        has_diag = true;
      }
      // Product ordered by (min, max) index so both triangles match bitwise.
      const Eigen::Index lo = std::min(r, c), hi = std::max(r, c);
      entries.emplace_back(static_cast<int>(r), static_cast<int>(c),
                           inv_sqrt(lo) * a * inv_sqrt(hi));
    }
    if (!has_diag) {
      entries.emplace_back(static_cast<int>(r), static_cast<int>(r),
                           inv_sqrt(r) * Scalar(1) * inv_sqrt(r));
    }
  }
  SparseMatrix<Scalar> out(n, n);
  out.setFromTriplets(entries.begin(), entries.end());
  out.makeCompressed();
  return out;
}

/// Sparse-dense product a * b.
template <typename Scalar>
DenseMatrix<Scalar> spmm(const SparseMatrix<Scalar>& a,
                         const DenseMatrix<Scalar>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("spmm: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " times " +
                         std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
  DenseMatrix<Scalar> out(a.rows(), b.cols());
  out.noalias() = a * b;
  return out;
}

/// Sparse-transpose-dense product a^T * b.
template <typename Scalar>
DenseMatrix<Scalar> spmm_transposed(const SparseMatrix<Scalar>& a,
                                    const DenseMatrix<Scalar>& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("spmm_transposed: inner dimensions " +
                         std::to_string(a.rows()) + " and " +
                         std::to_string(b.rows()));
  }
  DenseMatrix<Scalar> out(a.cols(), b.cols());
  out.noalias() = a.transpose() * b;
  return out;
}

/// Dense product op(a) * op(b), op being the optional transposition.
template <typename Scalar>
DenseMatrix<Scalar> gemm(const DenseMatrix<Scalar>& a,
                         const DenseMatrix<Scalar>& b, bool transpose_a = false,
                         bool transpose_b = false) {
  const Eigen::Index inner_a = transpose_a ? a.rows() : a.cols();
  const Eigen::Index inner_b = transpose_b ? b.cols() : b.rows();
  if (inner_a != inner_b) {
    throw DimensionError("gemm: inner dimensions " + std::to_string(inner_a) +
                         " and " + std::to_string(inner_b));
  }
  DenseMatrix<Scalar> out(transpose_a ? a.cols() : a.rows(),
                          transpose_b ? b.rows() : b.cols());
  if (transpose_a && transpose_b) {
    out.noalias() = a.transpose() * b.transpose();
  } else if (transpose_a) {
    out.noalias() = a.transpose() * b;
  } else if (transpose_b) {
    out.noalias() = a * b.transpose();
  } else {
    out.noalias() = a * b;
  }
  return out;
}

template <typename Scalar>
Eigen::Index rows_of(const FeatureMatrix<Scalar>& x) {
  return std::visit([](const auto& m) { return m.rows(); }, x);
}

template <typename Scalar>
Eigen::Index cols_of(const FeatureMatrix<Scalar>& x) {
  return std::visit([](const auto& m) { return m.cols(); }, x);
}

/// X * w for sparse or dense X.
template <typename Scalar>
DenseMatrix<Scalar> feature_product(const FeatureMatrix<Scalar>& x,
                                    const DenseMatrix<Scalar>& w) {
  if (const auto* sparse = std::get_if<SparseMatrix<Scalar>>(&x)) {
    return spmm(*sparse, w);
  }
  return gemm(std::get<DenseMatrix<Scalar>>(x), w);
}

/// X^T * g for sparse or dense X.
template <typename Scalar>
DenseMatrix<Scalar> feature_product_transposed(const FeatureMatrix<Scalar>& x,
                                               const DenseMatrix<Scalar>& g) {
  if (const auto* sparse = std::get_if<SparseMatrix<Scalar>>(&x)) {
    return spmm_transposed(*sparse, g);
  }
  return gemm(std::get<DenseMatrix<Scalar>>(x), g, /*transpose_a=*/true);
}

template <typename Scalar>
DenseMatrix<Scalar> to_dense(const FeatureMatrix<Scalar>& x) {
  if (const auto* sparse = std::get_if<SparseMatrix<Scalar>>(&x)) {
    return DenseMatrix<Scalar>(*sparse);
  }
  return std::get<DenseMatrix<Scalar>>(x);
}

/// Scales each feature row to unit L1 norm; all-zero rows are left as is.
template <typename Scalar>
FeatureMatrix<Scalar> row_normalize(FeatureMatrix<Scalar> x) {
  std::visit(
      [](auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DenseMatrix<Scalar>>) {
          for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const Scalar s = m.row(r).cwiseAbs().sum();
            if (s > Scalar(0)) m.row(r) /= s;
          }
        } else {
          for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
            Scalar s(0);
            for (typename M::InnerIterator it(m, r); it; ++it) s += std::abs(it.value());
            if (s <= Scalar(0)) continue;
            for (typename M::InnerIterator it(m, r); it; ++it) it.valueRef() /= s;
          }
        }
      },
      x);
  return x;
}

/// An undirected graph. Self-loops are never stored in `adjacency`.
struct Graph {
  SparseMatrixd adjacency;
  std::optional<FeatureMatrixd> features;
  std::optional<std::vector<int>> labels;
  bool is_weighted = false;
  /// Original node identifiers, index-aligned with the adjacency rows.
  std::vector<std::string> node_names;

  Eigen::Index num_nodes() const { return adjacency.rows(); }
  /// Number of undirected edges.
  Eigen::Index num_edges() const { return adjacency.nonZeros() / 2; }
  int num_classes() const;
};

/// Throws std::invalid_argument describing the first violated Graph
/// invariant (symmetry, zero diagonal, contiguous labels, dimension match).
void validate_graph(const Graph& graph);

}  // namespace lingae

#endif  // LINGAE_LINALG_HPP_
