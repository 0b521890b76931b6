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

#include "lingae/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "lingae/random.hpp"
#include "lingae/training.hpp"

namespace lingae {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = lower(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

long long parse_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<int>(parse_integer(key, item)));
  }
  return out;
}

std::string join(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string to_string(Task task) {
  return task == Task::kLinkPrediction ? "link-prediction" : "clustering";
}

Task parse_task(const std::string& text) {
  if (text == "link-prediction") return Task::kLinkPrediction;
  if (text == "clustering") return Task::kClustering;
  throw std::invalid_argument("unknown task '" + text + "'");
}

const ConfigMap& config_keys() {
  static const ConfigMap keys = {
      {"label", ""},
      {"dataset", ""},
      {"dataset_format", "edge-list-tsv"},
      {"edge_path", ""},
      {"feature_path", ""},
      {"label_path", ""},
      {"binarize", "true"},
      {"directed_input", "true"},
      {"row_normalize_features", "false"},
      {"sbm_blocks", ""},
      {"sbm_p_in", "0"},
      {"sbm_p_out", "0"},
      {"sbm_seed", "0"},
      {"task", "link-prediction"},
      {"encoder", "linear"},
      {"depth", ""},
      {"variational", "false"},
      {"embedding_dim", "16"},
      {"hidden_dim", "32"},
      {"hidden_dims", ""},
      {"use_features", "false"},
      {"epochs", "200"},
      {"learning_rate", ""},
      {"repetitions", "100"},
      {"master_seed", "0"},
      {"val_frac", "0.05"},
      {"test_frac", "0.10"},
      {"train_frac", ""},
      {"clusters", "0"},
      {"output_path", ""},
  };
  return keys;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!config_keys().count(key)) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ConfigMap apply_overrides(ConfigMap base, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& flag = args[i];
    if (flag.rfind("--", 0) != 0) throw std::invalid_argument("unexpected argument '" + flag + "'");
    std::string key = flag.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else {
      if (i + 1 >= args.size()) throw std::invalid_argument("missing value for '" + flag + "'");
      value = args[++i];
    }
    std::replace(key.begin(), key.end(), '-', '_');
    if (!config_keys().count(key)) throw std::invalid_argument("unknown option '" + flag + "'");
    base[key] = value;
  }
  return base;
}

std::string ExperimentConfig::dataset_name() const {
  if (const auto* d = std::get_if<DatasetDescriptor>(&dataset)) return d->name;
  return "sbm";
}

void ExperimentConfig::validate() const {
  model.validate();
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (task == Task::kLinkPrediction &&
      !(split.val >= 0.0 && split.val < 1.0 && split.test > 0.0 && split.test < 1.0 &&
        split.val + split.test < 1.0)) {
    throw std::invalid_argument("split fractions must lie in (0,1) and sum below 1");
  }
  if (clusters < 0) throw std::invalid_argument("clusters must be >= 0");
}

double default_learning_rate(const std::string& dataset_name, const ModelSpec& spec) {
  const std::string name = lower(dataset_name);
  if (name == "arxiv-hepth") return 0.1;
  if (name == "webkd") {
    if (spec.encoder == Encoder::kLinear) return spec.variational ? 0.01 : 0.001;
    return 0.005;
  }
  if (name == "proteins") return spec.variational ? 0.005 : 0.01;
  return 0.01;
}

ExperimentConfig build_experiment_config(const ConfigMap& values,
                                         const std::filesystem::path& base_dir) {
  ConfigMap v = config_keys();
  for (const auto& [key, value] : values) {
    if (!v.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
    v[key] = value;
  }
  const auto get = [&](const std::string& key) { return v.at(key); };

  std::filesystem::path root = base_dir;
  if (const char* env = std::getenv(kDataDirEnv); env && *env) root = env;
  const auto resolve = [&](const std::string& p) -> std::filesystem::path {
    std::filesystem::path path(p);
    return path.is_absolute() || root.empty() ? path : root / path;
  };

  ExperimentConfig cfg;
  const std::string format = get("dataset_format");
  if (format == "sbm") {
    SbmConfig sbm;
    sbm.block_sizes = parse_int_list("sbm_blocks", get("sbm_blocks"));
    sbm.p_in = parse_real("sbm_p_in", get("sbm_p_in"));
    sbm.p_out = parse_real("sbm_p_out", get("sbm_p_out"));
    sbm.seed = static_cast<std::uint64_t>(parse_integer("sbm_seed", get("sbm_seed")));
    if (sbm.block_sizes.empty()) throw std::invalid_argument("sbm dataset needs sbm_blocks");
    cfg.dataset = sbm;
  } else {
    DatasetDescriptor d;
    d.name = get("dataset");
    d.format = parse_dataset_format(format);
    if (get("edge_path").empty()) throw std::invalid_argument("dataset needs edge_path");
    d.edge_path = resolve(get("edge_path"));
    if (!get("feature_path").empty()) d.feature_path = resolve(get("feature_path"));
    if (!get("label_path").empty()) d.label_path = resolve(get("label_path"));
    d.binarize = parse_bool("binarize", get("binarize"));
    d.directed_input = parse_bool("directed_input", get("directed_input"));
    d.row_normalize_features = parse_bool("row_normalize_features", get("row_normalize_features"));
    cfg.dataset = d;
  }

  cfg.task = parse_task(get("task"));
  const bool variational = parse_bool("variational", get("variational"));
  const int d = static_cast<int>(parse_integer("embedding_dim", get("embedding_dim")));
  const bool use_features = parse_bool("use_features", get("use_features"));
  const std::string encoder = get("encoder");
  if (encoder == "linear") {
    cfg.model = ModelSpec::linear(variational, d, use_features);
    if (!get("depth").empty() && parse_integer("depth", get("depth")) != 1) {
      throw std::invalid_argument("linear encoder has depth 1");
    }
  } else if (encoder == "gcn") {
    const int depth = get("depth").empty() ? 2 : static_cast<int>(parse_integer("depth", get("depth")));
    cfg.model = ModelSpec::gcn(depth, variational, d,
                               static_cast<int>(parse_integer("hidden_dim", get("hidden_dim"))),
                               use_features);
    if (!get("hidden_dims").empty()) cfg.model.hidden_dims = parse_int_list("hidden_dims", get("hidden_dims"));
  } else {
    throw std::invalid_argument("unknown encoder '" + encoder + "'");
  }

  cfg.epochs = static_cast<int>(parse_integer("epochs", get("epochs")));
  cfg.repetitions = static_cast<int>(parse_integer("repetitions", get("repetitions")));
  cfg.master_seed = static_cast<std::uint64_t>(parse_integer("master_seed", get("master_seed")));
  if (get("train_frac").empty()) {
    cfg.split = SplitFractions{parse_real("val_frac", get("val_frac")),
                               parse_real("test_frac", get("test_frac"))};
  } else {
    cfg.split = SplitFractions::from_train_test(parse_real("train_frac", get("train_frac")),
                                                parse_real("test_frac", get("test_frac")));
  }
  cfg.clusters = static_cast<int>(parse_integer("clusters", get("clusters")));
  cfg.learning_rate = get("learning_rate").empty()
                          ? default_learning_rate(cfg.dataset_name(), cfg.model)
                          : parse_real("learning_rate", get("learning_rate"));
  if (!get("output_path").empty()) cfg.output_path = get("output_path");
  cfg.label = get("label");
  if (cfg.label.empty()) {
    cfg.label = cfg.dataset_name() + (use_features ? "+features" : "") + "/" + cfg.model.label();
  }
  cfg.validate();
  return cfg;
}

ConfigMap describe_config(const ExperimentConfig& cfg) {
  ConfigMap out;
  out["label"] = cfg.label;
  if (const auto* d = std::get_if<DatasetDescriptor>(&cfg.dataset)) {
    out["dataset"] = d->name;
    out["dataset_format"] = to_string(d->format);
    out["edge_path"] = d->edge_path.string();
    out["feature_path"] = d->feature_path ? d->feature_path->string() : "";
    out["label_path"] = d->label_path ? d->label_path->string() : "";
    out["binarize"] = d->binarize ? "true" : "false";
    out["directed_input"] = d->directed_input ? "true" : "false";
    out["row_normalize_features"] = d->row_normalize_features ? "true" : "false";
  } else {
    const auto& s = std::get<SbmConfig>(cfg.dataset);
    out["dataset"] = "sbm";
    out["dataset_format"] = "sbm";
    out["sbm_blocks"] = join(s.block_sizes);
    out["sbm_p_in"] = format_real(s.p_in);
    out["sbm_p_out"] = format_real(s.p_out);
    out["sbm_seed"] = std::to_string(s.seed);
  }
  out["task"] = to_string(cfg.task);
  out["encoder"] = cfg.model.encoder == Encoder::kLinear ? "linear" : "gcn";
  out["depth"] = std::to_string(cfg.model.depth);
  out["variational"] = cfg.model.variational ? "true" : "false";
  out["embedding_dim"] = std::to_string(cfg.model.embedding_dim);
  out["hidden_dims"] = join(cfg.model.hidden_dims);
  out["use_features"] = cfg.model.use_features ? "true" : "false";
  out["epochs"] = std::to_string(cfg.epochs);
  out["learning_rate"] = format_real(cfg.learning_rate);
  out["repetitions"] = std::to_string(cfg.repetitions);
  out["master_seed"] = std::to_string(cfg.master_seed);
  out["val_frac"] = format_real(cfg.split.val);
  out["test_frac"] = format_real(cfg.split.test);
  out["clusters"] = std::to_string(cfg.clusters);
  return out;
}

std::uint64_t repetition_seed(std::uint64_t master_seed, int repetition) {
  return derive_seed(master_seed, 0x1000000ULL + static_cast<std::uint64_t>(repetition));
}

RepetitionError::RepetitionError(int repetition, std::uint64_t seed, const std::string& what)
    : std::runtime_error("repetition " + std::to_string(repetition) + " (seed " +
                         std::to_string(seed) + ") failed: " + what),
      repetition_(repetition),
      seed_(seed) {}

RepetitionResult run_repetition(const ExperimentConfig& cfg, const Graph& graph, int repetition) {
  RepetitionResult out;
  out.index = repetition;
  out.seed = repetition_seed(cfg.master_seed, repetition);
  const auto start = std::chrono::steady_clock::now();

  const FeatureMatrixd* features = nullptr;
  if (cfg.model.use_features) {
    if (!graph.features) throw std::invalid_argument("model uses features but the dataset has none");
    features = &*graph.features;
  }
  const TrainingConfig hp{cfg.epochs, cfg.learning_rate};
  Rng train_rng = make_rng(out.seed, Stream::kInit);

  if (cfg.task == Task::kLinkPrediction) {
    Rng split_rng = make_rng(out.seed, Stream::kSplit);
    const EdgeSplit split = make_link_split(graph, cfg.split, split_rng);
    const auto trained = train(split.train_adjacency, features, cfg.model, hp, train_rng);
    const SparseMatrixd a_norm = normalize_adjacency(split.train_adjacency);
    const auto test = evaluate_link_prediction(trained.params, cfg.model, split, a_norm, features);
    out.metrics["auc"] = 100.0 * test.auc;
    out.metrics["ap"] = 100.0 * test.ap;
    if (!split.val_pos.empty()) {
      EdgeSplit val_view;
      val_view.test_pos = split.val_pos;
      val_view.test_neg = split.val_neg;
      const auto val = evaluate_link_prediction(trained.params, cfg.model, val_view, a_norm, features);
      out.metrics["val_auc"] = 100.0 * val.auc;
      out.metrics["val_ap"] = 100.0 * val.ap;
    }
  } else {
    const int k = cfg.clusters > 0 ? cfg.clusters : graph.num_classes();
    if (k < 1) throw std::invalid_argument("clustering needs labels or an explicit cluster count");
    const auto trained = train(graph.adjacency, features, cfg.model, hp, train_rng);
    const SparseMatrixd a_norm = normalize_adjacency(graph.adjacency);
    Rng cluster_rng = make_rng(out.seed, Stream::kClustering);
    out.metrics["ami"] =
        100.0 * evaluate_clustering(trained.params, cfg.model, graph, a_norm, features, k, cluster_rng);
  }
  out.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void RunReport::summarize() {
  std::map<std::string, std::vector<double>> values;
  for (const auto& rep : repetitions) {
    for (const auto& [name, v] : rep.metrics) values[name].push_back(v);
  }
  summaries.clear();
  for (auto& [name, vs] : values) summaries[name] = MetricSummary::from_values(name, std::move(vs));
}

RunReport run_experiment(const ExperimentConfig& cfg, const Graph& graph, int jobs) {
  cfg.validate();
  validate_graph(graph);
  RunReport report;
  report.label = cfg.label;
  report.config = describe_config(cfg);
  report.repetitions.resize(static_cast<std::size_t>(cfg.repetitions));

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::optional<RepetitionError> first_error;
  auto worker = [&] {
    for (int r = next++; r < cfg.repetitions; r = next++) {
      try {
        report.repetitions[r] = run_repetition(cfg, graph, r);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error || first_error->repetition() > r) {
          first_error.emplace(r, repetition_seed(cfg.master_seed, r), e.what());
        }
      }
    }
  };
  jobs = std::clamp(jobs, 1, cfg.repetitions);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) throw *first_error;
  report.summarize();
  report.timestamp = utc_timestamp();
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg, int jobs) {
  Graph graph;
  if (const auto* d = std::get_if<DatasetDescriptor>(&cfg.dataset)) {
    graph = load_dataset(*d);
  } else {
    graph = generate_sbm(std::get<SbmConfig>(cfg.dataset));
  }
  RunReport report = run_experiment(cfg, graph, jobs);
  if (cfg.output_path) {
    std::ofstream out(*cfg.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + cfg.output_path->string());
    out << render_report(report, ReportFormat::kJson);
  }
  return report;
}

ReportFormat parse_report_format(const std::string& text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "table" || text == "text-table") return ReportFormat::kTable;
  throw std::invalid_argument("unknown report format '" + text + "'");
}

namespace {

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json j;
  j["label"] = report.label;
  j["config"] = report.config;
  j["software_version"] = report.software_version;
  j["timestamp"] = report.timestamp;
  j["repetitions"] = nlohmann::json::array();
  for (const auto& rep : report.repetitions) {
    j["repetitions"].push_back({{"index", rep.index},
                                {"seed", rep.seed},
                                {"metrics", rep.metrics},
                                {"wall_clock_seconds", rep.wall_clock_seconds}});
  }
  j["summaries"] = nlohmann::json::object();
  for (const auto& [name, s] : report.summaries) {
    j["summaries"][name] = {{"mean", s.mean}, {"std", s.std}, {"per_run", s.per_run}};
  }
  return j;
}

std::string display_name(const std::string& metric) {
  if (metric == "auc") return "AUC (in %)";
  if (metric == "ap") return "AP (in %)";
  if (metric == "ami") return "AMI (in %)";
  if (metric == "val_auc") return "val AUC (in %)";
  if (metric == "val_ap") return "val AP (in %)";
  return metric;
}

std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

std::string render_report(const RunReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson:
      return to_json(report).dump(2) + "\n";
    case ReportFormat::kCsv: {
      std::vector<std::string> metrics;
      for (const auto& [name, s] : report.summaries) metrics.push_back(name);
      std::ostringstream os;
      os << std::setprecision(17);
      os << "repetition,seed";
      for (const auto& m : metrics) os << ',' << m;
      os << ",wall_clock_seconds\n";
      for (const auto& rep : report.repetitions) {
        os << rep.index << ',' << rep.seed;
        for (const auto& m : metrics) {
          os << ',';
          if (auto it = rep.metrics.find(m); it != rep.metrics.end()) os << it->second;
        }
        os << ',' << rep.wall_clock_seconds << '\n';
      }
      os << "mean,";
      for (const auto& m : metrics) os << ',' << report.summaries.at(m).mean;
      os << ",\nstd,";
      for (const auto& m : metrics) os << ',' << report.summaries.at(m).std;
      os << ",\n";
      return os.str();
    }
    case ReportFormat::kTable: {
      std::vector<std::string> metrics;
      for (const char* preferred : {"auc", "ap", "ami", "val_auc", "val_ap"}) {
        if (report.summaries.count(preferred)) metrics.push_back(preferred);
      }
      for (const auto& [name, s] : report.summaries) {
        if (std::find(metrics.begin(), metrics.end(), name) == metrics.end()) metrics.push_back(name);
      }
      const std::size_t label_width = std::max<std::size_t>(5, report.label.size());
      std::ostringstream os;
      os << std::left << std::setw(static_cast<int>(label_width)) << "Model";
      for (const auto& m : metrics) os << " | " << std::setw(16) << display_name(m);
      os << '\n' << std::string(label_width, '-');
      for (std::size_t i = 0; i < metrics.size(); ++i) os << "-+-" << std::string(16, '-');
      os << '\n' << std::setw(static_cast<int>(label_width)) << report.label;
      for (const auto& m : metrics) {
        const auto& s = report.summaries.at(m);
        os << " | " << std::setw(16) << (fixed2(s.mean) + " +/- " + fixed2(s.std));
      }
      os << "\n(" << report.repetitions.size() << " repetitions)\n";
      return os.str();
    }
  }
  throw std::invalid_argument("unknown report format");
}

RunReport report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunReport report;
  report.label = j.at("label").get<std::string>();
  report.config = j.at("config").get<ConfigMap>();
  report.software_version = j.at("software_version").get<std::string>();
  report.timestamp = j.at("timestamp").get<std::string>();
  for (const auto& r : j.at("repetitions")) {
    RepetitionResult rep;
    rep.index = r.at("index").get<int>();
    rep.seed = r.at("seed").get<std::uint64_t>();
    rep.metrics = r.at("metrics").get<std::map<std::string, double>>();
    rep.wall_clock_seconds = r.at("wall_clock_seconds").get<double>();
    report.repetitions.push_back(std::move(rep));
  }
  for (const auto& [name, s] : j.at("summaries").items()) {
    MetricSummary m;
    m.name = name;
    m.mean = s.at("mean").get<double>();
    m.std = s.at("std").get<double>();
    m.per_run = s.at("per_run").get<std::vector<double>>();
    report.summaries[name] = std::move(m);
  }
  return report;
}

std::vector<ReferenceRow> parse_reference(const std::string& text) {
  std::vector<ReferenceRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    ReferenceRow row;
    if (!(fields >> row.label)) continue;
    std::string extra;
    if (!(fields >> row.metric >> row.mean >> row.tolerance) || (fields >> extra)) {
      throw std::invalid_argument("reference line " + std::to_string(line_no) +
                                  ": expected 'label metric mean tolerance'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Verdict> compare_against_reference(const std::vector<RunReport>& reports,
                                               const std::vector<ReferenceRow>& reference) {
  std::vector<Verdict> verdicts;
  for (const auto& row : reference) {
    const auto report = std::find_if(reports.begin(), reports.end(),
                                     [&](const RunReport& r) { return r.label == row.label; });
    if (report == reports.end()) continue;
    const auto summary = report->summaries.find(row.metric);
    if (summary == report->summaries.end()) {
      throw std::invalid_argument("report '" + row.label + "' has no metric '" + row.metric + "'");
    }
    Verdict v{row, summary->second.mean, false};
    v.pass = std::abs(v.observed - row.mean) <= row.tolerance;
    verdicts.push_back(v);
  }
  if (verdicts.empty()) throw std::invalid_argument("no reference row matches any report label");
  return verdicts;
}

}  // namespace lingae
