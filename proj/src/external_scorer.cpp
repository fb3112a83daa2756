#include "segconf/external_scorer.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstring>
#include <optional>
#include <set>

#include "json.hpp"
#include "segconf/error.hpp"
#include "segconf/netpbm.hpp"

extern char** environ;

namespace segconf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kChannelNames[] = {"r", "g", "b"};

json write_planes(const Image& image, const fs::path& job_dir, const fs::path& rel_dir,
                  const std::string& prefix) {
  json planes = json::object();
  for (std::size_t q = 0; q < 3; ++q) {
    const ScoreMap plane = extract_channel(image, image.channels() == 3 ? q : 0);
    const fs::path rel = rel_dir / (prefix + "." + kChannelNames[q] + ".pfm");
    write_pfm(plane, job_dir / rel);
    planes[kChannelNames[q]] = rel.generic_string();
  }
  return planes;
}

int run_process(const fs::path& executable, const fs::path& job_dir) {
  std::error_code ec;
  if (!fs::is_regular_file(executable, ec) || ::access(executable.c_str(), X_OK) != 0) {
    throw ProtocolError(ProtocolErrorKind::launch_failed,
                        "scorer executable not found or not executable: " + executable.string());
  }
  std::string exe = executable.string();
  std::string arg = job_dir.string();
  char* argv[] = {exe.data(), arg.data(), nullptr};
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, exe.c_str(), nullptr, nullptr, argv, environ);
  if (rc != 0) {
    throw ProtocolError(ProtocolErrorKind::launch_failed,
                        "cannot launch " + exe + ": " + std::strerror(rc));
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      throw ProtocolError(ProtocolErrorKind::launch_failed,
                          "waitpid failed for " + exe + ": " + std::strerror(errno));
    }
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

/// Reads done.json; returns the error message when status is "error".
std::optional<std::string> read_status(const fs::path& job_dir) {
  const fs::path path = job_dir / "done.json";
  if (!fs::exists(path)) {
    throw ProtocolError(ProtocolErrorKind::missing_status, "scorer wrote no done.json");
  }
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ProtocolError(ProtocolErrorKind::malformed_status, std::string("done.json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("status") || !doc["status"].is_string()) {
    throw ProtocolError(ProtocolErrorKind::malformed_status, "done.json has no string status");
  }
  const auto status = doc["status"].get<std::string>();
  if (status == "ok") return std::nullopt;
  if (status == "error") {
    return doc.contains("message") && doc["message"].is_string()
               ? doc["message"].get<std::string>()
               : std::string("(no message)");
  }
  throw ProtocolError(ProtocolErrorKind::malformed_status, "done.json status '" + status + "'");
}

class JobDirectory {
public:
  JobDirectory(fs::path path, bool keep) : path_(std::move(path)), keep_(keep) {
    std::error_code ec;
    fs::remove_all(path_, ec);
    fs::create_directories(path_ / "out", ec);
    if (ec) throw IoError(path_, "cannot create job directory: " + ec.message());
  }
  ~JobDirectory() {
    if (!keep_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  JobDirectory(const JobDirectory&) = delete;
  JobDirectory& operator=(const JobDirectory&) = delete;

  const fs::path& path() const noexcept { return path_; }

private:
  fs::path path_;
  bool keep_;
};

}  // namespace

bool is_valid_sample_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (const char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                    c == '-' || c == '@';
    if (!ok) return false;
  }
  return true;
}

ExternalScorer::ExternalScorer(ExternalScorerConfig config) : config_(std::move(config)) {
  if (config_.executable.empty()) throw ValidationError("external scorer: no executable given");
}

ScorerCapabilities ExternalScorer::capabilities() const {
  return {.deterministic = true,
          .stochastic = config_.stochastic,
          .multi_image = config_.multi_image,
          .concurrent = false};
}

ScoreMap ExternalScorer::score(const Sample& sample) const {
  const ScoreRequest r{&sample, std::nullopt};
  return std::move(score_batch(std::span(&r, 1), 1).front());
}

ScoreMap ExternalScorer::sample_stochastic(const Sample& sample, std::uint64_t seed) const {
  const ScoreRequest r{&sample, seed};
  return std::move(score_batch(std::span(&r, 1), 1).front());
}

std::vector<ScoreMap> ExternalScorer::score_batch(std::span<const ScoreRequest> requests,
                                                  std::size_t) const {
  for (const auto& r : requests) {
    if (r.seed && !config_.stochastic) {
      throw CapabilityError("external scorer is not stochastic; seeded request for " +
                            r.sample->id());
    }
    if (!is_valid_sample_id(r.sample->id())) {
      throw ValidationError("sample id '" + r.sample->id() + "' cannot be used as a file name");
    }
  }

  // First-fit split into jobs with unique ids, preserving order within each job.
  std::vector<std::vector<std::size_t>> jobs;
  std::vector<std::set<std::string>> ids;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& id = requests[i].sample->id();
    std::size_t j = 0;
    while (j < jobs.size() && ids[j].count(id)) ++j;
    if (j == jobs.size()) {
      jobs.emplace_back();
      ids.emplace_back();
    }
    jobs[j].push_back(i);
    ids[j].insert(id);
  }

  std::vector<std::optional<ScoreMap>> slots(requests.size());
  for (const auto& job : jobs) {
    std::vector<ScoreRequest> subset;
    subset.reserve(job.size());
    for (const auto i : job) subset.push_back(requests[i]);
    auto maps = run_job(subset);
    for (std::size_t k = 0; k < job.size(); ++k) slots[job[k]] = std::move(maps[k]);
  }
  std::vector<ScoreMap> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<ScoreMap> ExternalScorer::run_job(std::span<const ScoreRequest> requests) const {
  std::lock_guard lock(mutex_);
  const fs::path root = config_.work_root.empty() ? fs::temp_directory_path() : config_.work_root;
  const JobDirectory dir(root / ("segconf-job-" + std::to_string(::getpid()) + "-" +
                                 std::to_string(job_counter_++)),
                         config_.keep_jobs);

  const bool multi = std::any_of(requests.begin(), requests.end(),
                                 [](const ScoreRequest& r) { return r.sample->is_multi_image(); });
  json samples = json::array();
  for (std::size_t k = 0; k < requests.size(); ++k) {
    const Sample& s = *requests[k].sample;
    const fs::path rel = fs::path("in") / std::to_string(k);
    fs::create_directories(dir.path() / rel);
    json entry = {{"id", s.id()}, {"post_pfm", write_planes(s.post_image(), dir.path(), rel, "post")}};
    if (s.pre_image()) entry["pre_pfm"] = write_planes(*s.pre_image(), dir.path(), rel, "pre");
    entry["seed"] = requests[k].seed ? json(*requests[k].seed) : json(nullptr);
    samples.push_back(std::move(entry));
  }
  const json job = {{"task", multi ? "multi" : "single"}, {"samples", std::move(samples)}};
  write_file(dir.path() / "job.json", job.dump(2) + "\n");

  const int exit_code = run_process(config_.executable, dir.path());
  if (exit_code != 0) {
    std::string message = "scorer exited with code " + std::to_string(exit_code);
    try {
      if (const auto err = read_status(dir.path())) message += ": " + *err;
    } catch (const ProtocolError&) {
    }
    throw ProtocolError(ProtocolErrorKind::nonzero_exit, message);
  }
  if (const auto err = read_status(dir.path())) {
    throw ProtocolError(ProtocolErrorKind::status_error, "scorer reported error: " + *err);
  }

  std::vector<ScoreMap> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    const Sample& s = *r.sample;
    const fs::path path = dir.path() / "out" / (s.id() + ".pfm");
    if (!fs::exists(path)) {
      throw ProtocolError(ProtocolErrorKind::missing_output, "no output for sample " + s.id());
    }
    try {
      auto map = read_pfm(path);
      if (map.height() != s.height() || map.width() != s.width()) {
        throw ProtocolError(ProtocolErrorKind::dimension_mismatch,
                            "output for " + s.id() + " is " + std::to_string(map.height()) + "x" +
                                std::to_string(map.width()) + ", sample is " +
                                std::to_string(s.height()) + "x" + std::to_string(s.width()));
      }
      out.push_back(std::move(map));
    } catch (const FormatError& e) {
      const auto kind = e.kind() == FormatErrorKind::out_of_range_value ||
                                e.kind() == FormatErrorKind::non_finite_value
                            ? ProtocolErrorKind::out_of_range_value
                            : ProtocolErrorKind::malformed_output;
      throw ProtocolError(kind, "output for " + s.id() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace segconf
