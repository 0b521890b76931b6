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

#ifndef LINGAE_DATA_HPP_
#define LINGAE_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lingae/linalg.hpp"

namespace lingae {

enum class DatasetFormat { kCitationContent, kEdgeListTsv };

std::string to_string(DatasetFormat format);
DatasetFormat parse_dataset_format(const std::string& text);

/// Where a dataset lives on disk and how to read it.
///
/// citation-content: `feature_path` is the content file
/// (`id <tab> f features <tab> class`), `edge_path` the cites file
/// (`cited <tab> citing`).
/// edge-list-tsv: `edge_path` holds `src dst [weight]` lines; the optional
/// `label_path` holds `id label` lines and `feature_path` `id v1 .. vf` lines.
struct DatasetDescriptor {
  std::string name;
  std::filesystem::path edge_path;
  std::optional<std::filesystem::path> feature_path;
  std::optional<std::filesystem::path> label_path;
  DatasetFormat format = DatasetFormat::kEdgeListTsv;
  bool binarize = true;
  bool directed_input = true;
  bool row_normalize_features = false;
};

/// Raised for unreadable or malformed input; carries the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& file, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Counters reported by the loaders.
struct LoadStats {
  std::size_t edge_lines = 0;
  std::size_t skipped_unknown_ids = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges = 0;
};

Graph load_citation_dataset(const DatasetDescriptor& desc, LoadStats* stats = nullptr);

Graph load_edge_list(const DatasetDescriptor& desc, LoadStats* stats = nullptr);

/// Dispatches on `desc.format`.
Graph load_dataset(const DatasetDescriptor& desc, LoadStats* stats = nullptr);

/// Stochastic block model parameters.
struct SbmConfig {
  std::vector<int> block_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;
};

/// Undirected SBM graph; labels are block ids, node names are indices.
Graph generate_sbm(const SbmConfig& cfg);

/// Writes `u \t v` (plus `\t w` for weighted graphs) per undirected edge,
/// u < v, using node names when present. Isolated nodes are not written.
void export_edge_list(const Graph& graph, std::ostream& out);
void export_edge_list(const Graph& graph, const std::filesystem::path& path);

}  // namespace lingae

#endif  // LINGAE_DATA_HPP_
