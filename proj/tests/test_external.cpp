#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "segconf/confmap.hpp"
#include "segconf/error.hpp"
#include "segconf/external_scorer.hpp"
#include "segconf/netpbm.hpp"
#include "segconf/pipeline.hpp"
#include "segconf/synthetic.hpp"
#include "support.hpp"

using namespace segconf;
namespace fs = std::filesystem;

namespace {

struct Mode {
  explicit Mode(const char* name) { ::setenv("SEGCONF_FAKE_MODE", name, 1); }
  ~Mode() { ::unsetenv("SEGCONF_FAKE_MODE"); }
};

ExternalScorer make(const testing::TempDir& work) {
  ExternalScorerConfig cfg;
  cfg.executable = SEGCONF_FAKE_SCORER;
  cfg.work_root = work.path();
  return ExternalScorer(cfg);
}

Sample sample(std::size_t size = 16, Task task = Task::single) {
  SyntheticSpec spec;
  spec.height = spec.width = size;
  spec.task = task;
  return generate_synthetic_sample(spec, 0);
}

ProtocolErrorKind kind_of(const char* mode) {
  testing::TempDir work;
  const Mode m(mode);
  const auto scorer = make(work);
  try {
    scorer.score(sample());
  } catch (const ProtocolError& e) {
    return e.kind();
  }
  FAIL("expected ProtocolError for mode " << mode);
  return ProtocolErrorKind::launch_failed;
}

}  // namespace

TEST_CASE("external: echo scorer returns the red channel") {
  testing::TempDir work;
  const Mode m("echo");
  const auto scorer = make(work);
  const auto s = sample();
  CHECK(scorer.score(s) == extract_channel(s.post_image(), 0));
  // job directories are cleaned up
  CHECK(fs::is_empty(work.path()));
}

TEST_CASE("external: synthetic process is bit-equal to the in-process scorer") {
  testing::TempDir work;
  const Mode m("synthetic");
  const auto scorer = make(work);
  for (const auto task : {Task::single, Task::multi}) {
    const auto s = sample(24, task);
    CHECK(scorer.score(s) == synthetic_score(s));
    CHECK(scorer.sample_stochastic(s, 9) == synthetic_score(s, 9));
  }
}

TEST_CASE("external: batches with repeated ids are split into several jobs") {
  testing::TempDir work;
  const Mode m("synthetic");
  const auto log = work.path() / "log.txt";
  ::setenv("SEGCONF_FAKE_LOG", log.c_str(), 1);
  ExternalScorerConfig cfg;
  cfg.executable = SEGCONF_FAKE_SCORER;
  cfg.work_root = work.path() / "jobs";
  fs::create_directories(cfg.work_root);
  const ExternalScorer scorer(cfg);
  const auto s = sample();
  const auto other = s.with_id("other");
  const std::vector<ScoreRequest> reqs{{&s, 1}, {&s, 2}, {&other, 3}, {&s, 4}};
  const auto maps = scorer.score_batch(reqs, 4);
  ::unsetenv("SEGCONF_FAKE_LOG");
  REQUIRE(maps.size() == 4);
  CHECK(maps[0] == synthetic_score(s, 1));
  CHECK(maps[1] == synthetic_score(s, 2));
  CHECK(maps[2] == synthetic_score(other, 3));
  CHECK(maps[3] == synthetic_score(s, 4));
  std::ifstream in(log);
  std::string line;
  std::size_t jobs = 0;
  std::string text;
  while (std::getline(in, line)) text += line + "\n";
  // job.json is pretty-printed; count top-level documents by their task key
  for (std::size_t p = text.find("\"task\""); p != std::string::npos; p = text.find("\"task\"", p + 1)) {
    ++jobs;
  }
  CHECK(jobs == 3);
}

TEST_CASE("external: mc dropout through the protocol") {
  testing::TempDir work;
  const Mode m("synthetic");
  const auto scorer = make(work);
  const SyntheticScorer local;
  const auto s = sample();
  McDropoutOptions opt;
  opt.trials = 5;
  CHECK(mc_dropout_map(scorer, s, opt).to_score_map() ==
        mc_dropout_map(local, s, opt).to_score_map());
}

TEST_CASE("external: tta uses distinct ids per catalog entry") {
  testing::TempDir work;
  const Mode m("synthetic");
  const auto scorer = make(work);
  const SyntheticScorer local;
  const auto s = sample(16);
  const auto cat = build_catalog();
  const Catalog part(cat.begin() + 230, cat.begin() + 260);
  CHECK(tta_map(scorer, s, part).to_score_map() == tta_map(local, s, part).to_score_map());
}

TEST_CASE("external: protocol failures are distinct errors") {
  CHECK(kind_of("wrong_dims") == ProtocolErrorKind::dimension_mismatch);
  CHECK(kind_of("no_output") == ProtocolErrorKind::missing_output);
  CHECK(kind_of("fail") == ProtocolErrorKind::nonzero_exit);
  CHECK(kind_of("error_ok") == ProtocolErrorKind::status_error);
  CHECK(kind_of("no_status") == ProtocolErrorKind::missing_status);
  CHECK(kind_of("bad_status") == ProtocolErrorKind::malformed_status);
  CHECK(kind_of("bad_range") == ProtocolErrorKind::out_of_range_value);
  CHECK(kind_of("garbage") == ProtocolErrorKind::malformed_output);
}

TEST_CASE("external: failure message carries the scorer's reason") {
  testing::TempDir work;
  const Mode m("fail");
  const auto scorer = make(work);
  try {
    scorer.score(sample());
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(std::string(e.what()).find("model exploded") != std::string::npos);
  }
}

TEST_CASE("external: missing executable") {
  testing::TempDir work;
  ExternalScorerConfig cfg;
  cfg.executable = work.path() / "nope";
  const ExternalScorer scorer(cfg);
  try {
    scorer.score(sample());
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(e.kind() == ProtocolErrorKind::launch_failed);
  }
}

TEST_CASE("external: tta errors name the entry range") {
  testing::TempDir work;
  const Mode m("wrong_dims");
  const auto scorer = make(work);
  try {
    tta_map(scorer, sample(16), build_catalog());
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(e.kind() == ProtocolErrorKind::dimension_mismatch);
    CHECK(std::string(e.what()).find("entries 0..15") != std::string::npos);
  }
}

TEST_CASE("external: capabilities and ids") {
  testing::TempDir work;
  ExternalScorerConfig cfg;
  cfg.executable = SEGCONF_FAKE_SCORER;
  cfg.stochastic = false;
  const ExternalScorer scorer(cfg);
  CHECK_FALSE(scorer.capabilities().concurrent);
  CHECK_THROWS_AS(scorer.sample_stochastic(sample(), 1), CapabilityError);
  CHECK(is_valid_sample_id("s0001@17"));
  CHECK_FALSE(is_valid_sample_id(".."));
  CHECK_FALSE(is_valid_sample_id("a/b"));
  CHECK_FALSE(is_valid_sample_id(""));
}

TEST_CASE("external: confmap through an external scorer matches the in-process run") {
  testing::TempDir dir;
  const Mode m("synthetic");
  SyntheticSpec spec;
  spec.count = 2;
  spec.height = spec.width = 16;
  spec.task = Task::multi;
  cmd_synth(spec, dir / "data");
  RunConfig cfg;
  cfg.method = Method::mc_dropout;
  cfg.trials = 6;
  cfg.data_dir = dir / "data";
  cfg.out_dir = dir / "local";
  cmd_confmap(cfg);
  cfg.out_dir = dir / "remote";
  cfg.scorer = std::string("external:") + SEGCONF_FAKE_SCORER;
  cfg.workers = 2;
  cmd_confmap(cfg);
  for (const auto* id : {"s0000.pfm", "s0001.pfm"}) {
    CHECK(read_file(dir / "local" / "mcdropout" / id) == read_file(dir / "remote" / "mcdropout" / id));
  }
}
