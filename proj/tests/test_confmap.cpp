#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>

#include "doctest.h"
#include "segconf/confmap.hpp"
#include "segconf/error.hpp"
#include "segconf/netpbm.hpp"
#include "segconf/synthetic.hpp"
#include "support.hpp"

using namespace segconf;

namespace {

Sample small_sample(std::size_t size = 32, Task task = Task::single) {
  SyntheticSpec spec;
  spec.height = spec.width = size;
  spec.task = task;
  return generate_synthetic_sample(spec, 0);
}

/// Scores the red channel of the post image.
testing::FnScorer red_scorer() {
  return testing::FnScorer([](const Sample& s) { return extract_channel(s.post_image(), 0); });
}

}  // namespace

TEST_CASE("prethresh: constant scorer gives a uniform map") {
  const auto scorer = testing::constant_scorer(0.5f);
  const auto map = pre_threshold_map(scorer, small_sample(16));
  for (const double v : map.values()) CHECK(v == 0.5);
  CHECK(map.method() == Method::pre_threshold);
}

TEST_CASE("prethresh: repeated calls are bit-equal") {
  const SyntheticScorer scorer;
  const auto s = small_sample();
  CHECK(pre_threshold_map(scorer, s).to_score_map() == pre_threshold_map(scorer, s).to_score_map());
}

TEST_CASE("prethresh: golden map for s0 of seed 42 at 128x128") {
  SyntheticSpec spec;
  spec.seed = 42;
  spec.height = spec.width = 128;
  const SyntheticScorer scorer;
  const auto map = pre_threshold_map(scorer, generate_synthetic_sample(spec, 0)).to_score_map();
  const auto golden = read_pfm(std::filesystem::path(SEGCONF_TEST_DATA) / "s0_prethresh_128.pfm");
  CHECK(map == golden);
}

TEST_CASE("mcdropout: constant scorer above tau gives all ones") {
  const auto scorer = testing::constant_scorer(0.9f);
  McDropoutOptions opt;
  opt.trials = 7;
  const auto map = mc_dropout_map(scorer, small_sample(16), opt);
  for (const double v : map.values()) CHECK(v == 1.0);
  const auto low = testing::constant_scorer(0.2f);
  const auto zero = mc_dropout_map(low, small_sample(16), opt);
  for (const double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("mcdropout: pixel above tau in k of T trials is exactly k/T") {
  // pixel i passes in trials whose seed is below i % (T + 1)
  const std::size_t trials = 5;
  const testing::FnScorer scorer(
      [](const Sample& s) { return ScoreMap::filled(s.height(), s.width(), 0.0f); },
      [&](const Sample& s, std::uint64_t seed) {
        std::vector<float> v(s.height() * s.width());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = seed < i % (trials + 1) ? 0.7f : 0.3f;
        return ScoreMap(s.height(), s.width(), std::move(v));
      });
  McDropoutOptions opt;
  opt.trials = trials;
  const auto map = mc_dropout_map(scorer, small_sample(16), opt);
  for (std::size_t i = 0; i < map.values().size(); ++i) {
    CHECK(map.values()[i] == double(i % (trials + 1)) / double(trials));
  }
}

TEST_CASE("mcdropout: score equal to tau counts as a hit") {
  const auto scorer = testing::constant_scorer(0.5f);
  McDropoutOptions opt;
  opt.trials = 3;
  const auto map = mc_dropout_map(scorer, small_sample(16), opt);
  for (const double v : map.values()) CHECK(v == 1.0);
}

TEST_CASE("mcdropout: trial t uses seed first_seed + t") {
  std::vector<std::uint64_t> seen;
  std::mutex m;
  const testing::FnScorer scorer(
      [](const Sample& s) { return ScoreMap::filled(s.height(), s.width(), 0.0f); },
      [&](const Sample& s, std::uint64_t seed) {
        std::lock_guard lock(m);
        seen.push_back(seed);
        return ScoreMap::filled(s.height(), s.width(), 0.0f);
      });
  McDropoutOptions opt;
  opt.trials = 20;
  opt.first_seed = 100;
  mc_dropout_map(scorer, small_sample(16), opt);
  std::sort(seen.begin(), seen.end());
  REQUIRE(seen.size() == 20);
  for (std::size_t t = 0; t < 20; ++t) CHECK(seen[t] == 100 + t);
}

TEST_CASE("mcdropout: count-fraction oracle with the synthetic scorer") {
  const SyntheticScorer scorer;
  const auto s = small_sample(24);
  for (const std::size_t trials : {1u, 7u, 40u}) {
    McDropoutOptions opt;
    opt.trials = trials;
    opt.first_seed = 3;
    const auto map = mc_dropout_map(scorer, s, opt);
    std::vector<std::size_t> hits(s.height() * s.width(), 0);
    for (std::size_t t = 0; t < trials; ++t) {
      const auto m = synthetic_score(s, 3 + t);
      for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += m.data()[i] >= 0.5f;
    }
    for (std::size_t i = 0; i < hits.size(); ++i) {
      CHECK(std::abs(map.values()[i] - double(hits[i]) / double(trials)) <= 1e-12);
    }
  }
}

TEST_CASE("mcdropout: workers do not change the result") {
  const SyntheticScorer scorer;
  const auto s = small_sample(24);
  McDropoutOptions a;
  a.trials = 37;
  auto b = a;
  b.workers = 4;
  CHECK(mc_dropout_map(scorer, s, a).to_score_map() == mc_dropout_map(scorer, s, b).to_score_map());
}

TEST_CASE("mcdropout: needs a stochastic scorer and valid options") {
  const auto scorer = red_scorer();
  CHECK_THROWS_AS(mc_dropout_map(scorer, small_sample(16)), CapabilityError);
  const SyntheticScorer syn;
  McDropoutOptions opt;
  opt.trials = 0;
  CHECK_THROWS_AS(mc_dropout_map(syn, small_sample(16), opt), ValidationError);
  opt.trials = 2;
  opt.tau = 1.0;
  CHECK_THROWS_AS(mc_dropout_map(syn, small_sample(16), opt), ValidationError);
}

TEST_CASE("tta: invariant scorer reproduces the pre-threshold map") {
  const auto scorer = testing::constant_scorer(0.25f);
  const auto s = small_sample(16);
  const auto tta = tta_map(scorer, s, build_catalog());
  const auto pre = pre_threshold_map(scorer, s);
  for (std::size_t i = 0; i < tta.values().size(); ++i) {
    CHECK(std::abs(tta.values()[i] - pre.values()[i]) <= 1e-6);
  }
}

TEST_CASE("tta: pointwise scorer commutes with a flip") {
  const auto scorer = red_scorer();
  const auto s = small_sample(16);
  const Catalog one{AugmentationSpec(GeometricKind::horizontal_flip, VisualTransform::identity())};
  const auto tta = tta_map(scorer, s, one).to_score_map();
  CHECK(tta == extract_channel(s.post_image(), 0));
}

TEST_CASE("tta: equals a naive loop over the catalog") {
  const SyntheticScorer scorer;
  const auto s = small_sample(24, Task::multi);
  const auto catalog = build_catalog();
  const auto map = tta_map(scorer, s, catalog);
  std::vector<double> sum(s.height() * s.width(), 0.0);
  for (const auto& spec : catalog) {
    const auto out = apply_geometric(invert_geometric(spec.geometric()),
                                     synthetic_score(apply_spec(spec, s).with_id(s.id())));
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += out.data()[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    CHECK(std::abs(map.values()[i] - sum[i] / double(catalog.size())) <= 1e-12);
  }
}

TEST_CASE("tta: workers and catalog order") {
  const SyntheticScorer scorer;
  const auto s = small_sample(24);
  auto catalog = build_catalog();
  TtaOptions par;
  par.workers = 3;
  const auto a = tta_map(scorer, s, catalog);
  CHECK(a.to_score_map() == tta_map(scorer, s, catalog, par).to_score_map());
  std::reverse(catalog.begin(), catalog.end());
  const auto b = tta_map(scorer, s, catalog);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    CHECK(std::abs(a.values()[i] - b.values()[i]) <= 1e-9);
  }
}

TEST_CASE("tta: failures name the catalog entry") {
  const testing::FnScorer scorer([](const Sample& s) {
    if (s.id() == "s0000@17") throw std::runtime_error("boom");
    return ScoreMap::filled(s.height(), s.width(), 0.5f);
  });
  try {
    tta_map(scorer, small_sample(16), build_catalog());
    FAIL("expected ScorerError");
  } catch (const ScorerError& e) {
    CHECK(e.entry() == 17);
    CHECK(e.detail() == "boom");
  }
}

TEST_CASE("tta: wrong-shaped scorer output is a ScorerError") {
  const testing::FnScorer scorer([](const Sample&) { return ScoreMap::filled(2, 2, 0.5f); });
  CHECK_THROWS_AS(tta_map(scorer, small_sample(16), build_catalog()), ScorerError);
  CHECK_THROWS_AS(pre_threshold_map(scorer, small_sample(16)), ScorerError);
}

TEST_CASE("method names") {
  CHECK(method_from_string("prethresh") == Method::pre_threshold);
  CHECK(to_string(Method::mc_dropout) == "mcdropout");
  CHECK_THROWS_AS(method_from_string("ensemble"), ValidationError);
}
