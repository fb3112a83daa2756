#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <span>
#include <vector>

#include "segconf/scorer.hpp"

namespace segconf {

/// How to reach an out-of-process scorer.
struct ExternalScorerConfig {
  std::filesystem::path executable;
  /// Whether the process honours per-sample seeds.
  bool stochastic = true;
  bool multi_image = true;
  /// Parent of the per-call job directories; empty means the system temp dir.
  std::filesystem::path work_root;
  /// Leave job directories on disk (debugging).
  bool keep_jobs = false;
};

/// Scorer that exchanges samples with a separate process through a job
/// directory:
///
///   job.json   {"task": "single"|"multi",
///               "samples": [{"id": ..., "post_pfm": {"r": ..., "g": ..., "b": ...},
///                            "pre_pfm": {...} (multi only), "seed": int|null}]}
///   in/<n>/post.{r,g,b}.pfm, in/<n>/pre.{r,g,b}.pfm   grayscale PFM planes
///
/// The executable gets the job directory as its only argument and must exit
/// 0 after writing out/<id>.pfm for every sample plus done.json containing
/// {"status": "ok"} or {"status": "error", "message": ...}. Paths inside
/// job.json are relative to the job directory. Ids within one job are unique;
/// a batch that repeats an id is split over several jobs.
class ExternalScorer final : public Scorer {
public:
  explicit ExternalScorer(ExternalScorerConfig config);

  ScorerCapabilities capabilities() const override;
  ScoreMap score(const Sample& sample) const override;
  ScoreMap sample_stochastic(const Sample& sample, std::uint64_t seed) const override;
  std::vector<ScoreMap> score_batch(std::span<const ScoreRequest> requests,
                                    std::size_t workers) const override;

  const ExternalScorerConfig& config() const noexcept { return config_; }

private:
  std::vector<ScoreMap> run_job(std::span<const ScoreRequest> requests) const;

  ExternalScorerConfig config_;
  mutable std::mutex mutex_;
  mutable std::uint64_t job_counter_ = 0;
};

/// Ids travel as file names; letters, digits and ". _ - @" only.
bool is_valid_sample_id(std::string_view id);

}  // namespace segconf
