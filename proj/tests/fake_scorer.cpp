// Stand-in scorer process for the job-directory protocol tests.
// Behaviour is picked by SEGCONF_FAKE_MODE:
//   echo        red plane of the post image
//   synthetic   in-process synthetic scorer, honouring seeds
//   wrong_dims  2x2 outputs
//   no_output   ok status, nothing written
//   fail        error status and exit code 3
//   error_ok    error status but exit code 0
//   no_status   outputs but no done.json
//   bad_status  done.json that is not JSON
//   bad_range   outputs holding 1.5
//   garbage     outputs that are not PFM
#include <cstdlib>
#include <cstring>
#include <optional>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "segconf/netpbm.hpp"
#include "segconf/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

segconf::Image load_planes(const fs::path& dir, const json& planes) {
  std::vector<segconf::ScoreMap> maps;
  for (const char* c : {"r", "g", "b"}) {
    maps.push_back(segconf::read_pfm(dir / planes[c].get<std::string>()));
  }
  return segconf::merge_channels(maps);
}

void status(const fs::path& dir, const std::string& s, const std::string& message = "") {
  json doc = {{"status", s}};
  if (!message.empty()) doc["message"] = message;
  segconf::write_file(dir / "done.json", doc.dump());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) return 64;
  const fs::path dir = argv[1];
  const char* env = std::getenv("SEGCONF_FAKE_MODE");
  const std::string mode = env ? env : "echo";
  if (const char* log = std::getenv("SEGCONF_FAKE_LOG")) {
    std::ofstream(log, std::ios::app) << segconf::read_file(dir / "job.json") << "\n";
  }

  if (mode == "fail") {
    status(dir, "error", "model exploded");
    return 3;
  }
  if (mode == "error_ok") {
    status(dir, "error", "refused");
    return 0;
  }
  if (mode == "bad_status") {
    segconf::write_file(dir / "done.json", "{not json");
    return 0;
  }

  const auto job = json::parse(segconf::read_file(dir / "job.json"));
  for (const auto& s : job["samples"]) {
    const auto id = s["id"].get<std::string>();
    const fs::path out = dir / "out" / (id + ".pfm");
    const auto post = load_planes(dir, s["post_pfm"]);
    if (mode == "no_output") continue;
    if (mode == "wrong_dims") {
      segconf::write_pfm(segconf::ScoreMap::filled(2, 2, 0.5f), out);
    } else if (mode == "bad_range") {
      std::string bytes = segconf::encode_pfm(segconf::ScoreMap::filled(post.height(), post.width(), 1.0f));
      const float big = 1.5f;
      std::memcpy(bytes.data() + bytes.size() - 4, &big, 4);
      segconf::write_file(out, bytes);
    } else if (mode == "garbage") {
      segconf::write_file(out, "hello");
    } else if (mode == "synthetic") {
      std::optional<segconf::Image> pre;
      if (s.contains("pre_pfm")) pre = load_planes(dir, s["pre_pfm"]);
      const segconf::Sample sample(
          id, post, pre,
          segconf::BinaryMask(post.height(), post.width(),
                              std::vector<std::uint8_t>(post.pixel_count(), 0)));
      std::optional<std::uint64_t> seed;
      if (!s["seed"].is_null()) seed = s["seed"].get<std::uint64_t>();
      segconf::write_pfm(segconf::synthetic_score(sample, seed), out);
    } else {
      segconf::write_pfm(segconf::extract_channel(post, 0), out);
    }
  }
  if (mode != "no_status") status(dir, "ok");
  return 0;
}
