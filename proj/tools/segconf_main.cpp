#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "segconf/error.hpp"
#include "segconf/netpbm.hpp"
#include "segconf/pipeline.hpp"

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw segconf::ValidationError("invalid threshold '" + item + "' in --grid");
    }
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence maps and their evaluation for binary segmentation"};
  app.require_subcommand(1);

  // synth
  segconf::SyntheticSpec spec;
  std::string synth_out;
  std::string synth_task = "single";
  std::size_t synth_size = 512;
  std::size_t synth_workers = 1;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--seed", spec.seed, "Dataset seed")->capture_default_str();
  synth->add_option("--count", spec.count, "Number of samples")->capture_default_str();
  synth->add_option("--size", synth_size, "Image height and width")->capture_default_str();
  synth->add_option("--blobs-min", spec.blob_min)->capture_default_str();
  synth->add_option("--blobs-max", spec.blob_max)->capture_default_str();
  synth->add_option("--noise", spec.noise_level, "Speckle amplitude")->capture_default_str();
  synth->add_option("--task", synth_task, "single or multi")->capture_default_str();
  synth->add_option("--workers", synth_workers)->capture_default_str();
  synth->add_option("--out", synth_out, "Output directory")->required();

  // confmap
  segconf::RunConfig cfg;
  std::string method = "tta";
  std::string task;
  std::string pooling = "pooled";
  std::string grid;
  std::string data_dir;
  std::string out_dir;
  std::string config_path;
  auto* confmap = app.add_subcommand("confmap", "Build confidence maps for every sample");
  confmap->add_option("--data", data_dir, "Dataset directory (with manifest.json)");
  confmap->add_option("--out", out_dir, "Output directory")->required();
  confmap->add_option("--method", method, "prethresh, mcdropout or tta")->capture_default_str();
  confmap->add_option("--scorer", cfg.scorer, "synthetic or external:<path>")->capture_default_str();
  confmap->add_option("--seed", cfg.seed, "First dropout seed")->capture_default_str();
  confmap->add_option("--trials", cfg.trials, "Dropout trials")->capture_default_str();
  confmap->add_option("--tau", cfg.tau, "Dropout threshold")->capture_default_str();
  confmap->add_option("--task", task, "Expected task (single or multi)");
  confmap->add_option("--grid", grid, "Comma separated thresholds (recorded)");
  confmap->add_option("--auc-pooling", pooling, "pooled or per_image_mean (recorded)")
      ->capture_default_str();
  confmap->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
  confmap->add_option("--config", config_path, "Replay a recorded run.json");

  // eval
  segconf::EvalCommand eval_cmd;
  std::string eval_data;
  std::string eval_maps;
  std::string eval_out;
  std::string eval_method;
  std::string eval_grid;
  std::string eval_pooling = "pooled";
  auto* eval = app.add_subcommand("eval", "Evaluate a directory of confidence maps");
  eval->add_option("--data", eval_data, "Dataset directory")->required();
  eval->add_option("--maps", eval_maps, "Directory of <id>.pfm maps")->required();
  eval->add_option("--out", eval_out, "Output directory")->required();
  eval->add_option("--method", eval_method, "Method label for the report");
  eval->add_option("--grid", eval_grid, "Comma separated thresholds");
  eval->add_option("--auc-pooling", eval_pooling)->capture_default_str();
  eval->add_option("--tau", eval_cmd.options.default_tau, "Default threshold")
      ->capture_default_str();
  eval->add_option("--min-samples", eval_cmd.options.min_samples)->capture_default_str();

  // report
  std::vector<std::string> report_files;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Render SVG plots from report.json files");
  report->add_option("--reports", report_files, "report.json files")->required();
  report->add_option("--out", report_out, "Output directory")->required();

  // catalog-dump
  std::string catalog_out;
  auto* catalog = app.add_subcommand("catalog-dump", "Print the augmentation catalog as JSON");
  catalog->add_option("--out", catalog_out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*synth) {
      spec.height = spec.width = synth_size;
      spec.task = segconf::task_from_string(synth_task);
      const auto manifest = segconf::cmd_synth(spec, synth_out, synth_workers);
      std::cout << "wrote " << manifest.samples.size() << " samples to " << synth_out << "\n";
    } else if (*confmap) {
      if (!config_path.empty()) {
        const auto workers = cfg.workers;
        cfg = segconf::run_config_from_json(
            nlohmann::json::parse(segconf::read_file(config_path)));
        cfg.workers = workers;
        if (!data_dir.empty()) cfg.data_dir = data_dir;
      } else {
        cfg.method = segconf::method_from_string(method);
        cfg.auc_pooling = segconf::pooling_from_string(pooling);
        if (!task.empty()) cfg.task = segconf::task_from_string(task);
        if (!grid.empty()) cfg.grid = segconf::ThresholdGrid(parse_grid(grid));
        cfg.data_dir = data_dir;
      }
      cfg.out_dir = out_dir;
      const auto dir = segconf::cmd_confmap(cfg);
      std::cout << "wrote confidence maps to " << dir.string() << "\n";
    } else if (*eval) {
      eval_cmd.data_dir = eval_data;
      eval_cmd.maps_dir = eval_maps;
      eval_cmd.out_dir = eval_out;
      if (!eval_method.empty()) eval_cmd.method = eval_method;
      if (!eval_grid.empty()) eval_cmd.options.grid = segconf::ThresholdGrid(parse_grid(eval_grid));
      eval_cmd.options.pooling = segconf::pooling_from_string(eval_pooling);
      const auto r = segconf::cmd_eval(eval_cmd);
      std::cout << r.method << ": auc " << r.auc << " iou_a " << r.iou_a << "\n";
    } else if (*report) {
      std::vector<std::filesystem::path> paths(report_files.begin(), report_files.end());
      segconf::cmd_report(paths, report_out);
      std::cout << "wrote plots to " << report_out << "\n";
    } else if (*catalog) {
      const auto text = segconf::cmd_catalog_dump();
      if (catalog_out.empty()) {
        std::cout << text;
      } else {
        segconf::write_file(catalog_out, text);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return segconf::exit_code_for(e);
  }
  return 0;
}
