#pragma once

#include <array>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "segconf/confmap.hpp"
#include "segconf/eval.hpp"
#include "segconf/report.hpp"
#include "segconf/scorer.hpp"
#include "segconf/synthetic.hpp"

namespace segconf {

/// One manifest row. Paths are relative to the dataset directory.
struct DatasetEntry {
  std::string id;
  std::array<std::filesystem::path, 3> post;
  std::optional<std::array<std::filesystem::path, 3>> pre;
  std::filesystem::path truth;
};

/// `manifest.json` of a dataset directory:
///   {"task": "single"|"multi",
///    "samples": [{"id", "post": {"r","g","b"}, "pre": {"r","g","b"} (multi only), "truth"}]}
struct DatasetManifest {
  Task task = Task::single;
  std::vector<DatasetEntry> samples;
};

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
/// Checks task/pre consistency and id uniqueness.
DatasetManifest manifest_from_json(const nlohmann::json& doc);
/// Reads `<dir>/manifest.json` and checks that every referenced file exists.
DatasetManifest load_manifest(const std::filesystem::path& dir);
Sample load_sample(const std::filesystem::path& dir, const DatasetEntry& entry);

/// Settings of a `confmap` run; `eval` reuses the evaluation fields.
struct RunConfig {
  Method method = Method::tta;
  /// "synthetic" or "external:<path to executable>".
  std::string scorer = "synthetic";
  std::uint64_t seed = 0;
  std::size_t trials = 286;
  double tau = 0.5;
  ThresholdGrid grid;
  AucPooling auc_pooling = AucPooling::pooled;
  /// When set, must match the manifest.
  std::optional<Task> task;
  std::filesystem::path data_dir;
  std::filesystem::path out_dir;
  /// Execution only; never affects output bytes and is not recorded.
  std::size_t workers = 1;

  void validate() const;
};

/// Everything but out_dir and workers, so that a recorded run can be replayed.
nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& doc);

std::unique_ptr<Scorer> make_scorer(const std::string& descriptor);

/// Writes per-sample PFM planes, `truth.pgm` and `manifest.json` into out_dir.
DatasetManifest cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& out_dir,
                          std::size_t workers = 1);

/// Writes `<out>/<method>/<id>.pfm` for every sample and `<out>/<method>/run.json`.
/// Returns the method directory.
std::filesystem::path cmd_confmap(const RunConfig& config);

struct EvalCommand {
  std::filesystem::path data_dir;
  std::filesystem::path maps_dir;
  std::filesystem::path out_dir;
  /// Defaults to the method in maps_dir/run.json, else the directory name.
  std::optional<std::string> method;
  EvalOptions options;
};

/// Writes report.json, calibration.csv, per_image.csv and gains.csv.
EvalReport cmd_eval(const EvalCommand& command);

/// Writes calibration.svg, roc.svg and gains.svg from report.json files.
void cmd_report(const std::vector<std::filesystem::path>& reports,
                const std::filesystem::path& out_dir);

/// Catalog description as pretty-printed JSON.
std::string cmd_catalog_dump();

/// 0 on success, 1 validation, 2 I/O or scorer protocol.
int exit_code_for(const std::exception& error);

}  // namespace segconf
