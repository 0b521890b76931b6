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

#include "lingae/linalg.hpp"

#include <algorithm>
#include <set>

namespace lingae {

int Graph::num_classes() const {
  if (!labels || labels->empty()) return 0;
  return *std::max_element(labels->begin(), labels->end()) + 1;
}

void validate_graph(const Graph& graph) {
  const auto& a = graph.adjacency;
  if (a.rows() != a.cols()) throw std::invalid_argument("adjacency is not square");
  if (!is_canonical(a)) throw std::invalid_argument("adjacency is not in canonical CSR form");
  if (!is_symmetric(a)) throw std::invalid_argument("adjacency is not symmetric");
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrixd::InnerIterator it(a, r); it; ++it) {
      if (it.col() == r) {
        throw std::invalid_argument("adjacency stores a self-loop at node " + std::to_string(r));
      }
    }
  }
  if (graph.features && rows_of(*graph.features) != a.rows()) {
    throw std::invalid_argument("feature rows do not match node count");
  }
  if (graph.labels) {
    if (static_cast<Eigen::Index>(graph.labels->size()) != a.rows()) {
      throw std::invalid_argument("label count does not match node count");
    }
    std::set<int> seen(graph.labels->begin(), graph.labels->end());
    int expect = 0;
    for (int v : seen) {
      if (v != expect++) throw std::invalid_argument("class ids are not contiguous 0..k-1");
    }
  }
  if (!graph.node_names.empty() &&
      static_cast<Eigen::Index>(graph.node_names.size()) != a.rows()) {
    throw std::invalid_argument("node name count does not match node count");
  }
}

}  // namespace lingae
