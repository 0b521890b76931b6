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

// lingae run   --config cfg.txt [--jobs N] [--format json|csv|table] [--out file] [--key value ...]
// lingae check --report a.json [--report b.json ...] --reference ref.txt

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lingae/experiment.hpp"

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_command(const std::string& config_path, int jobs, const std::string& format,
                const std::string& out_path, const std::vector<std::string>& overrides) {
  lingae::ConfigMap values;
  std::filesystem::path base_dir;
  if (!config_path.empty()) {
    values = lingae::read_config_file(config_path);
    base_dir = std::filesystem::path(config_path).parent_path();
  }
  values = lingae::apply_overrides(std::move(values), overrides);
  const auto cfg = lingae::build_experiment_config(values, base_dir);
  const auto fmt = lingae::parse_report_format(format);

  std::cerr << "lingae " << lingae::kVersion << ": " << cfg.label << ", " << cfg.repetitions
            << " repetitions, " << cfg.epochs << " epochs, lr " << cfg.learning_rate << "\n";
  const auto report = lingae::run_experiment(cfg, jobs);
  const std::string text = lingae::render_report(report, fmt);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
  }
  return 0;
}

int check_command(const std::vector<std::string>& report_paths, const std::string& reference_path) {
  std::vector<lingae::RunReport> reports;
  for (const auto& p : report_paths) reports.push_back(lingae::report_from_json(slurp(p)));
  const auto rows = lingae::parse_reference(slurp(reference_path));
  const auto verdicts = lingae::compare_against_reference(reports, rows);
  bool all = true;
  for (const auto& v : verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.reference.label << ' ' << v.reference.metric
              << std::fixed << std::setprecision(2) << " observed " << v.observed << " expected "
              << v.reference.mean << " +/- " << v.reference.tolerance << '\n';
    all = all && v.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear and GCN graph autoencoder benchmarks"};
  app.set_version_flag("--version", lingae::kVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "train and evaluate one configuration");
  std::string config_path;
  int jobs = 1;
  std::string format = "table";
  std::string out_path;
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--jobs", jobs, "repetitions run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--format", format, "json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  run->add_option("--out", out_path, "write the report here instead of stdout");
  run->allow_extras();
  run->footer("Any config key can be overridden with --key value.");

  auto* check = app.add_subcommand("check", "compare JSON reports against a reference file");
  std::vector<std::string> report_paths;
  std::string reference_path;
  check->add_option("--report", report_paths, "JSON report")->required()->check(CLI::ExistingFile);
  check->add_option("--reference", reference_path, "reference file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path, jobs, format, out_path, run->remaining());
    return check_command(report_paths, reference_path);
  } catch (const lingae::RepetitionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
