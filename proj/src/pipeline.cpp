#include "segconf/pipeline.hpp"

#include <set>

#include "segconf/augment.hpp"
#include "segconf/error.hpp"
#include "segconf/external_scorer.hpp"
#include "segconf/hashing.hpp"
#include "segconf/netpbm.hpp"
#include "segconf/parallel.hpp"
#include "segconf/plots.hpp"

namespace segconf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kChannels[] = {"r", "g", "b"};
constexpr const char* kExternalPrefix = "external:";

json planes_to_json(const std::array<fs::path, 3>& planes) {
  json out = json::object();
  for (std::size_t q = 0; q < 3; ++q) out[kChannels[q]] = planes[q].generic_string();
  return out;
}

std::array<fs::path, 3> planes_from_json(const json& doc) {
  std::array<fs::path, 3> out;
  for (std::size_t q = 0; q < 3; ++q) out[q] = doc.at(kChannels[q]).get<std::string>();
  return out;
}

Image load_planes(const fs::path& dir, const std::array<fs::path, 3>& planes) {
  std::vector<ScoreMap> maps;
  for (const auto& p : planes) maps.push_back(read_pfm(dir / p));
  return merge_channels(maps);
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create directory: " + ec.message());
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

bool same_directory(const fs::path& a, const fs::path& b) {
  std::error_code ec;
  return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

}  // namespace

json manifest_to_json(const DatasetManifest& manifest) {
  json samples = json::array();
  for (const auto& e : manifest.samples) {
    json entry = {{"id", e.id}, {"post", planes_to_json(e.post)}};
    if (e.pre) entry["pre"] = planes_to_json(*e.pre);
    entry["truth"] = e.truth.generic_string();
    samples.push_back(std::move(entry));
  }
  return {{"task", to_string(manifest.task)}, {"samples", std::move(samples)}};
}

DatasetManifest manifest_from_json(const json& doc) {
  DatasetManifest m;
  try {
    m.task = task_from_string(doc.at("task").get<std::string>());
    std::set<std::string> seen;
    for (const auto& s : doc.at("samples")) {
      DatasetEntry e;
      e.id = s.at("id").get<std::string>();
      if (!is_valid_sample_id(e.id)) throw ValidationError("manifest: invalid sample id '" + e.id + "'");
      if (!seen.insert(e.id).second) throw ValidationError("manifest: duplicate sample id " + e.id);
      e.post = planes_from_json(s.at("post"));
      if (s.contains("pre")) e.pre = planes_from_json(s.at("pre"));
      e.truth = s.at("truth").get<std::string>();
      if (e.pre.has_value() != (m.task == Task::multi)) {
        throw ValidationError("manifest: sample " + e.id +
                              (m.task == Task::multi ? " lacks a pre-event image"
                                                     : " has a pre-event image in a single task"));
      }
      m.samples.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

DatasetManifest load_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) throw IoError(path, "manifest not found");
  auto manifest = manifest_from_json(read_json(path));
  for (const auto& e : manifest.samples) {
    std::vector<fs::path> files(e.post.begin(), e.post.end());
    if (e.pre) files.insert(files.end(), e.pre->begin(), e.pre->end());
    files.push_back(e.truth);
    for (const auto& f : files) {
      if (!fs::exists(dir / f)) throw IoError(dir / f, "referenced by sample " + e.id + " but missing");
    }
  }
  return manifest;
}

Sample load_sample(const fs::path& dir, const DatasetEntry& entry) {
  std::optional<Image> pre;
  if (entry.pre) pre = load_planes(dir, *entry.pre);
  return Sample(entry.id, load_planes(dir, entry.post), std::move(pre), read_pgm(dir / entry.truth));
}

void RunConfig::validate() const {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must be in (0,1)");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (data_dir.empty()) throw ValidationError("no data directory given");
  if (!out_dir.empty() && same_directory(data_dir, out_dir)) {
    throw ValidationError("output directory must differ from the data directory");
  }
  if (scorer != "synthetic" && scorer.rfind(kExternalPrefix, 0) != 0) {
    throw ValidationError("scorer must be 'synthetic' or 'external:<path>', got '" + scorer + "'");
  }
}

json run_config_to_json(const RunConfig& c) {
  json doc = {{"method", to_string(c.method)},
              {"scorer", c.scorer},
              {"seed", c.seed},
              {"trials", c.trials},
              {"tau", c.tau},
              {"grid", std::vector<double>(c.grid.values().begin(), c.grid.values().end())},
              {"auc_pooling", to_string(c.auc_pooling)},
              {"data_dir", c.data_dir.generic_string()}};
  doc["task"] = c.task ? json(to_string(*c.task)) : json(nullptr);
  return doc;
}

RunConfig run_config_from_json(const json& doc) {
  try {
    RunConfig c;
    c.method = method_from_string(doc.at("method").get<std::string>());
    c.scorer = doc.at("scorer").get<std::string>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.trials = doc.at("trials").get<std::size_t>();
    c.tau = doc.at("tau").get<double>();
    c.grid = ThresholdGrid(doc.at("grid").get<std::vector<double>>());
    c.auc_pooling = pooling_from_string(doc.at("auc_pooling").get<std::string>());
    c.data_dir = doc.at("data_dir").get<std::string>();
    if (doc.contains("task") && !doc["task"].is_null()) {
      c.task = task_from_string(doc["task"].get<std::string>());
    }
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("run config: ") + e.what());
  }
}

std::unique_ptr<Scorer> make_scorer(const std::string& descriptor) {
  if (descriptor == "synthetic") return std::make_unique<SyntheticScorer>();
  if (descriptor.rfind(kExternalPrefix, 0) == 0) {
    ExternalScorerConfig cfg;
    cfg.executable = descriptor.substr(std::string_view(kExternalPrefix).size());
    return std::make_unique<ExternalScorer>(std::move(cfg));
  }
  throw ValidationError("unknown scorer '" + descriptor + "'");
}

DatasetManifest cmd_synth(const SyntheticSpec& spec, const fs::path& out_dir, std::size_t workers) {
  spec.validate();
  ensure_directory(out_dir);
  DatasetManifest manifest;
  manifest.task = spec.task;
  manifest.samples.resize(spec.count);
  parallel_for(spec.count, workers, [&](std::size_t i) {
    const Sample s = generate_synthetic_sample(spec, i);
    const fs::path rel = s.id();
    ensure_directory(out_dir / rel);
    DatasetEntry e;
    e.id = s.id();
    for (std::size_t q = 0; q < 3; ++q) {
      e.post[q] = rel / (std::string("post.") + kChannels[q] + ".pfm");
      write_pfm(extract_channel(s.post_image(), q), out_dir / e.post[q]);
    }
    if (s.pre_image()) {
      e.pre.emplace();
      for (std::size_t q = 0; q < 3; ++q) {
        (*e.pre)[q] = rel / (std::string("pre.") + kChannels[q] + ".pfm");
        write_pfm(extract_channel(*s.pre_image(), q), out_dir / (*e.pre)[q]);
      }
    }
    e.truth = rel / "truth.pgm";
    write_pgm(s.truth(), out_dir / e.truth);
    manifest.samples[i] = std::move(e);
  });
  write_json(out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

fs::path cmd_confmap(const RunConfig& config) {
  config.validate();
  if (config.out_dir.empty()) throw ValidationError("no output directory given");
  const auto manifest = load_manifest(config.data_dir);
  if (manifest.samples.empty()) throw ValidationError("manifest lists no samples");
  if (config.task && *config.task != manifest.task) {
    throw ValidationError("configured task '" + std::string(to_string(*config.task)) +
                          "' does not match the manifest task '" +
                          std::string(to_string(manifest.task)) + "'");
  }
  const auto scorer = make_scorer(config.scorer);
  const auto caps = scorer->capabilities();
  if (config.method == Method::mc_dropout && !caps.stochastic) {
    throw CapabilityError("method mcdropout needs a stochastic scorer");
  }
  if (manifest.task == Task::multi && !caps.multi_image) {
    throw CapabilityError("scorer does not support the multi-image task");
  }

  const fs::path method_dir = config.out_dir / std::string(to_string(config.method));
  ensure_directory(method_dir);
  const Catalog catalog = build_catalog();

  // Samples fan out over workers; each map is built with a serial inner loop.
  std::vector<std::string> checksums(manifest.samples.size());
  parallel_for(manifest.samples.size(), config.workers, [&](std::size_t i) {
    const auto& entry = manifest.samples[i];
    const Sample sample = load_sample(config.data_dir, entry);
    ConfidenceMap map = [&] {
      switch (config.method) {
        case Method::pre_threshold: return pre_threshold_map(*scorer, sample);
        case Method::mc_dropout:
          return mc_dropout_map(*scorer, sample,
                                {.trials = config.trials, .tau = config.tau,
                                 .first_seed = config.seed, .workers = 1});
        case Method::tta: return tta_map(*scorer, sample, catalog, {.workers = 1});
      }
      throw ValidationError("unknown method");
    }();
    const std::string bytes = encode_pfm(map.to_score_map());
    write_file(method_dir / (entry.id + ".pfm"), bytes);
    checksums[i] = sha256_hex(bytes);
  });

  json run = run_config_to_json(config);
  run["task"] = to_string(manifest.task);
  run["catalog"] = {{"size", catalog.size()}, {"checksum", catalog_checksum(catalog)}};
  json outputs = json::object();
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    outputs[manifest.samples[i].id] = checksums[i];
  }
  run["outputs"] = std::move(outputs);
  write_json(method_dir / "run.json", run);
  return method_dir;
}

EvalReport cmd_eval(const EvalCommand& command) {
  const auto manifest = load_manifest(command.data_dir);
  if (manifest.samples.empty()) throw ValidationError("manifest lists no samples");
  if (command.out_dir.empty()) throw ValidationError("no output directory given");

  std::string method;
  if (command.method) {
    method = *command.method;
  } else if (fs::exists(command.maps_dir / "run.json")) {
    method = read_json(command.maps_dir / "run.json").value("method", std::string());
  }
  if (method.empty()) method = command.maps_dir.filename().string();

  std::vector<std::string> ids;
  std::vector<ScoreMap> maps;
  std::vector<BinaryMask> truths;
  for (const auto& e : manifest.samples) {
    const fs::path map_path = command.maps_dir / (e.id + ".pfm");
    if (!fs::exists(map_path)) throw IoError(map_path, "no confidence map for sample " + e.id);
    ids.push_back(e.id);
    maps.push_back(read_pfm(map_path));
    truths.push_back(read_pgm(command.data_dir / e.truth));
  }

  const auto report = evaluate(method, ids, maps, truths, command.options);
  ensure_directory(command.out_dir);
  write_json(command.out_dir / "report.json", report_to_json(report));
  write_file(command.out_dir / "calibration.csv", calibration_csv(report));
  write_file(command.out_dir / "per_image.csv", per_image_csv(report));
  write_file(command.out_dir / "gains.csv", gains_csv(report));
  return report;
}

void cmd_report(const std::vector<fs::path>& reports, const fs::path& out_dir) {
  if (reports.empty()) throw ValidationError("report: no report files given");
  std::vector<EvalReport> parsed;
  for (const auto& p : reports) parsed.push_back(report_from_json(read_json(p)));
  ensure_directory(out_dir);
  write_file(out_dir / "calibration.svg", calibration_svg(parsed));
  write_file(out_dir / "roc.svg", roc_svg(parsed));
  write_file(out_dir / "gains.svg", gains_svg(parsed));
}

std::string cmd_catalog_dump() { return catalog_to_json(build_catalog()).dump(2) + "\n"; }

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ValidationError*>(&error)) return 1;
  return 2;
}

}  // namespace segconf
