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

#include "lingae/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "lingae/random.hpp"

namespace lingae {

ParseError::ParseError(const std::filesystem::path& file, std::size_t line,
                       const std::string& what)
    : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string to_string(DatasetFormat format) {
  return format == DatasetFormat::kCitationContent ? "citation-content" : "edge-list-tsv";
}

DatasetFormat parse_dataset_format(const std::string& text) {
  if (text == "citation-content") return DatasetFormat::kCitationContent;
  if (text == "edge-list-tsv") return DatasetFormat::kEdgeListTsv;
  throw std::invalid_argument("unknown dataset format '" + text + "'");
}

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

bool parse_double(std::string_view text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool is_integer(std::string_view text) {
  long long v;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

bool is_comment_or_blank(std::string_view line) {
  const auto tokens_start = line.find_first_not_of(" \t\r");
  if (tokens_start == std::string_view::npos) return true;
  return line[tokens_start] == '#' || line[tokens_start] == '%';
}

/// Maps raw ids to 0..n-1 in sorted order: numeric when every id is an
/// integer, lexicographic otherwise.
std::unordered_map<std::string, int> compact_ids(std::vector<std::string>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const bool numeric = std::all_of(ids.begin(), ids.end(), [](const std::string& s) { return is_integer(s); });
  if (numeric) {
    std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
      return std::stoll(a) < std::stoll(b);
    });
  }
  std::unordered_map<std::string, int> index;
  index.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<int>(i));
  return index;
}

/// Symmetric adjacency from undirected (i < j) weights.
SparseMatrixd symmetric_adjacency(int n, const std::map<std::pair<int, int>, double>& edges) {
  std::vector<Triplet> triplets;
  triplets.reserve(edges.size() * 2);
  for (const auto& [key, w] : edges) {
    triplets.push_back({key.first, key.second, w});
    triplets.push_back({key.second, key.first, w});
  }
  return sparse_from_triplets<double>(n, n, triplets);
}

std::vector<int> contiguous_labels(const std::vector<std::string>& names) {
  std::vector<std::string> classes(names);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::vector<int> labels;
  labels.reserve(names.size());
  for (const auto& name : names) {
    labels.push_back(static_cast<int>(std::lower_bound(classes.begin(), classes.end(), name) -
                                      classes.begin()));
  }
  return labels;
}

}  // namespace

Graph load_citation_dataset(const DatasetDescriptor& desc, LoadStats* stats) {
  if (desc.format != DatasetFormat::kCitationContent) {
    throw std::invalid_argument("load_citation_dataset needs the citation-content format");
  }
  if (!desc.feature_path) {
    throw std::invalid_argument("citation-content dataset needs a content file (feature_path)");
  }
  LoadStats local;
  LoadStats& st = stats ? *stats : local;

  struct Row {
    std::string id;
    std::vector<std::pair<int, double>> nonzeros;
    std::string label;
  };
  std::vector<Row> rows;
  int num_features = -1;
  {
    std::ifstream in = open_or_throw(*desc.feature_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (is_comment_or_blank(line)) continue;
      auto tokens = split_whitespace(line);
      if (tokens.size() < 2) throw ParseError(*desc.feature_path, line_no, "expected id, features, label");
      const int f = static_cast<int>(tokens.size()) - 2;
      if (num_features < 0) num_features = f;
      if (f != num_features) {
        throw ParseError(*desc.feature_path, line_no,
                         "expected " + std::to_string(num_features) + " features, found " +
                             std::to_string(f));
      }
      Row row{std::string(tokens.front()), {}, std::string(tokens.back())};
      for (int k = 0; k < f; ++k) {
        double v;
        if (!parse_double(tokens[k + 1], v)) {
          throw ParseError(*desc.feature_path, line_no,
                           "bad feature value '" + std::string(tokens[k + 1]) + "'");
        }
        if (v != 0.0) row.nonzeros.emplace_back(k, v);
      }
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) throw ParseError(*desc.feature_path, 0, "empty graph: no nodes");

  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (const auto& r : rows) ids.push_back(r.id);
  auto index = compact_ids(ids);
  if (ids.size() != rows.size()) throw ParseError(*desc.feature_path, 0, "duplicate node ids");
  const int n = static_cast<int>(ids.size());

  std::vector<Triplet> feature_entries;
  std::vector<std::string> label_names(static_cast<std::size_t>(n));
  for (const auto& r : rows) {
    const int node = index.at(r.id);
    for (const auto& [k, v] : r.nonzeros) feature_entries.push_back({node, k, v});
    label_names[node] = r.label;
  }

  std::map<std::pair<int, int>, double> edges;
  {
    std::ifstream in = open_or_throw(desc.edge_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (is_comment_or_blank(line)) continue;
      auto tokens = split_whitespace(line);
      if (tokens.size() != 2) throw ParseError(desc.edge_path, line_no, "expected 'cited citing'");
      ++st.edge_lines;
      auto a = index.find(std::string(tokens[0]));
      auto b = index.find(std::string(tokens[1]));
      if (a == index.end() || b == index.end()) {
        ++st.skipped_unknown_ids;
        continue;
      }
      if (a->second == b->second) {
        ++st.self_loops_dropped;
        continue;
      }
      const auto key = std::minmax(a->second, b->second);
      if (!edges.emplace(key, 1.0).second) ++st.duplicate_edges;
    }
  }
  if (st.skipped_unknown_ids > 0) {
    std::cerr << "warning: " << desc.edge_path.string() << ": skipped " << st.skipped_unknown_ids
              << " citation(s) referencing unknown ids\n";
  }
  if (edges.empty()) throw ParseError(desc.edge_path, 0, "empty graph: no edges");

  Graph g;
  g.adjacency = symmetric_adjacency(n, edges);
  FeatureMatrixd features = sparse_from_triplets<double>(n, num_features, feature_entries);
  g.features = desc.row_normalize_features ? row_normalize(std::move(features)) : std::move(features);
  g.labels = contiguous_labels(label_names);
  g.node_names = std::move(ids);
  return g;
}

Graph load_edge_list(const DatasetDescriptor& desc, LoadStats* stats) {
  if (desc.format != DatasetFormat::kEdgeListTsv) {
    throw std::invalid_argument("load_edge_list needs the edge-list-tsv format");
  }
  LoadStats local;
  LoadStats& st = stats ? *stats : local;

  struct RawEdge {
    std::string src, dst;
    double weight;
  };
  std::vector<RawEdge> raw;
  bool saw_weight = false;
  {
    std::ifstream in = open_or_throw(desc.edge_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (is_comment_or_blank(line)) continue;
      auto tokens = split_whitespace(line);
      if (tokens.size() < 2) throw ParseError(desc.edge_path, line_no, "expected 'src dst [weight]'");
      double w = 1.0;
      if (tokens.size() >= 3) {
        if (!parse_double(tokens[2], w)) {
          throw ParseError(desc.edge_path, line_no, "bad weight '" + std::string(tokens[2]) + "'");
        }
        if (w < 0.0) throw ParseError(desc.edge_path, line_no, "negative edge weight");
        saw_weight = true;
      }
      ++st.edge_lines;
      raw.push_back({std::string(tokens[0]), std::string(tokens[1]), w});
    }
  }
  std::vector<std::string> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& e : raw) {
    ids.push_back(e.src);
    ids.push_back(e.dst);
  }
  auto index = compact_ids(ids);
  const int n = static_cast<int>(ids.size());

  // Weight per ordered pair; lines repeating an ordered pair are parallel
  // edges and add up.
  std::map<std::pair<int, int>, double> directed;
  for (const auto& e : raw) {
    const int a = index.at(e.src), b = index.at(e.dst);
    if (a == b) {
      ++st.self_loops_dropped;
      continue;
    }
    auto [it, inserted] = directed.emplace(std::make_pair(a, b), 0.0);
    if (!inserted) ++st.duplicate_edges;
    it->second += e.weight;
  }
  // Directed input: u->v and v->u are two arcs of one undirected edge and
  // add up. Undirected input may list an edge from both ends; the mirror
  // is the same edge, so the larger listing wins.
  std::map<std::pair<int, int>, double> edges;
  for (const auto& [pair, w] : directed) {
    auto [it, inserted] = edges.emplace(std::minmax(pair.first, pair.second), w);
    if (inserted) continue;
    ++st.duplicate_edges;
    it->second = desc.directed_input ? it->second + w : std::max(it->second, w);
  }
  std::erase_if(edges, [](const auto& kv) { return kv.second == 0.0; });
  if (desc.binarize) {
    for (auto& kv : edges) kv.second = 1.0;
  }
  if (edges.empty()) throw ParseError(desc.edge_path, 0, "empty graph: no edges");

  Graph g;
  g.adjacency = symmetric_adjacency(n, edges);
  g.is_weighted = saw_weight && !desc.binarize;

  if (desc.label_path) {
    std::ifstream in = open_or_throw(*desc.label_path);
    std::vector<std::string> names(static_cast<std::size_t>(n));
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (is_comment_or_blank(line)) continue;
      auto tokens = split_whitespace(line);
      if (tokens.size() != 2) throw ParseError(*desc.label_path, line_no, "expected 'id label'");
      auto it = index.find(std::string(tokens[0]));
      if (it == index.end()) {
        ++st.skipped_unknown_ids;
        continue;
      }
      names[it->second] = std::string(tokens[1]);
      seen[it->second] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw ParseError(*desc.label_path, 0, "some nodes have no label");
    }
    g.labels = contiguous_labels(names);
  }

  if (desc.feature_path) {
    std::ifstream in = open_or_throw(*desc.feature_path);
    std::vector<Triplet> entries;
    int f = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (is_comment_or_blank(line)) continue;
      auto tokens = split_whitespace(line);
      const int cols = static_cast<int>(tokens.size()) - 1;
      if (f < 0) f = cols;
      if (cols < 1 || cols != f) throw ParseError(*desc.feature_path, line_no, "inconsistent feature count");
      auto it = index.find(std::string(tokens[0]));
      if (it == index.end()) {
        ++st.skipped_unknown_ids;
        continue;
      }
      for (int k = 0; k < cols; ++k) {
        double v;
        if (!parse_double(tokens[k + 1], v)) throw ParseError(*desc.feature_path, line_no, "bad feature value");
        if (v != 0.0) entries.push_back({it->second, k, v});
      }
    }
    if (f < 1) throw ParseError(*desc.feature_path, 0, "no feature rows");
    DenseMatrixd dense = DenseMatrixd::Zero(n, f);
    for (const auto& t : entries) dense(t.row, t.col) = t.value;
    FeatureMatrixd features = std::move(dense);
    g.features = desc.row_normalize_features ? row_normalize(std::move(features)) : std::move(features);
  }
  g.node_names = std::move(ids);
  return g;
}

Graph load_dataset(const DatasetDescriptor& desc, LoadStats* stats) {
  return desc.format == DatasetFormat::kCitationContent ? load_citation_dataset(desc, stats)
                                                        : load_edge_list(desc, stats);
}

Graph generate_sbm(const SbmConfig& cfg) {
  if (!(0.0 <= cfg.p_out && cfg.p_out <= cfg.p_in && cfg.p_in <= 1.0)) {
    throw std::invalid_argument("sbm needs 0 <= p_out <= p_in <= 1");
  }
  std::vector<int> block;
  for (std::size_t b = 0; b < cfg.block_sizes.size(); ++b) {
    if (cfg.block_sizes[b] < 0) throw std::invalid_argument("negative block size");
    block.insert(block.end(), static_cast<std::size_t>(cfg.block_sizes[b]), static_cast<int>(b));
  }
  const int n = static_cast<int>(block.size());
  Rng rng(derive_seed(cfg.seed, 0));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Triplet> triplets;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = block[i] == block[j] ? cfg.p_in : cfg.p_out;
      if (u(rng) < p) {
        triplets.push_back({i, j, 1.0});
        triplets.push_back({j, i, 1.0});
      }
    }
  }
  Graph g;
  g.adjacency = sparse_from_triplets<double>(n, n, triplets);
  g.labels = block;
  g.node_names.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g.node_names.push_back(std::to_string(i));
  return g;
}

void export_edge_list(const Graph& graph, std::ostream& out) {
  const auto name = [&](int i) {
    return graph.node_names.empty() ? std::to_string(i) : graph.node_names[i];
  };
  std::ostringstream value;
  value.precision(17);
  for (int r = 0; r < graph.adjacency.outerSize(); ++r) {
    for (SparseMatrixd::InnerIterator it(graph.adjacency, r); it; ++it) {
      if (it.col() <= r) continue;
      out << name(r) << '\t' << name(static_cast<int>(it.col()));
      if (graph.is_weighted) {
        value.str("");
        value << it.value();
        out << '\t' << value.str();
      }
      out << '\n';
    }
  }
}

void export_edge_list(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  export_edge_list(graph, out);
}

}  // namespace lingae
