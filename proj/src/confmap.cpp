#include "segconf/confmap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "segconf/error.hpp"
#include "segconf/parallel.hpp"

namespace segconf {

namespace {

void check_shape(const ScoreMap& map, const Sample& sample, std::size_t entry) {
  if (map.height() != sample.height() || map.width() != sample.width()) {
    throw ScorerError(entry, "scorer returned " + std::to_string(map.height()) + "x" +
                                 std::to_string(map.width()) + " map for " +
                                 std::to_string(sample.height()) + "x" +
                                 std::to_string(sample.width()) + " sample " + sample.id());
  }
}

void check_multi_image(const ScorerCapabilities& caps, const Sample& sample) {
  if (sample.is_multi_image() && !caps.multi_image) {
    throw CapabilityError("scorer does not accept multi-image samples (" + sample.id() + ")");
  }
}

/// Requests are scored in chunks so that only a bounded number of augmented
/// samples are alive at once.
std::size_t chunk_size(std::size_t workers) { return std::max<std::size_t>(16, workers * 4); }

/// Scores `requests`, reporting failures against `first_entry + i`.
std::vector<ScoreMap> score_chunk(const Scorer& scorer, std::span<const ScoreRequest> requests,
                                  std::size_t workers, std::size_t first_entry) {
  try {
    return scorer.score_batch(requests, workers);
  } catch (const ProtocolError& e) {
    throw ProtocolError(e.kind(), "entries " + std::to_string(first_entry) + ".." +
                                      std::to_string(first_entry + requests.size() - 1) + ": " +
                                      e.what());
  } catch (const CapabilityError&) {
    throw;
  } catch (const ScorerError& e) {
    throw ScorerError(first_entry + e.entry(), e.detail());
  } catch (const std::exception& e) {
    throw ScorerError(first_entry, e.what());
  }
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::pre_threshold: return "prethresh";
    case Method::mc_dropout: return "mcdropout";
    case Method::tta: return "tta";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "prethresh") return Method::pre_threshold;
  if (name == "mcdropout") return Method::mc_dropout;
  if (name == "tta") return Method::tta;
  throw ValidationError("unknown method '" + std::string(name) +
                        "', expected prethresh, mcdropout or tta");
}

ConfidenceMap::ConfidenceMap(Method method, std::size_t height, std::size_t width,
                             std::vector<double> values)
    : method_(method), height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != height * width) {
    throw ValidationError("ConfidenceMap: data length does not match shape");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw ValidationError("ConfidenceMap: value at index " + std::to_string(i) +
                            " outside [0,1]");
    }
  }
}

ScoreMap ConfidenceMap::to_score_map() const {
  std::vector<float> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [](double v) { return static_cast<float>(v); });
  return ScoreMap(height_, width_, std::move(out));
}

ConfidenceMap pre_threshold_map(const Scorer& scorer, const Sample& sample) {
  const auto caps = scorer.capabilities();
  if (!caps.deterministic) {
    throw CapabilityError("pre-threshold maps need a deterministic scorer");
  }
  check_multi_image(caps, sample);
  const ScoreRequest request{&sample, std::nullopt};
  auto maps = score_chunk(scorer, std::span(&request, 1), 1, 0);
  check_shape(maps.front(), sample, 0);
  const auto data = maps.front().data();
  return ConfidenceMap(Method::pre_threshold, sample.height(), sample.width(),
                       std::vector<double>(data.begin(), data.end()));
}

ConfidenceMap mc_dropout_map(const Scorer& scorer, const Sample& sample,
                             const McDropoutOptions& options) {
  const auto caps = scorer.capabilities();
  if (!caps.stochastic) {
    throw CapabilityError("Monte-Carlo dropout needs a stochastic scorer");
  }
  check_multi_image(caps, sample);
  if (options.trials < 1) throw ValidationError("mc dropout: trials must be >= 1");
  if (!(options.tau > 0.0 && options.tau < 1.0)) {
    throw ValidationError("mc dropout: tau must be in (0,1)");
  }

  const std::size_t n = sample.height() * sample.width();
  std::vector<std::uint32_t> hits(n, 0);
  const std::size_t chunk = chunk_size(options.workers);
  for (std::size_t begin = 0; begin < options.trials; begin += chunk) {
    const std::size_t end = std::min(options.trials, begin + chunk);
    std::vector<ScoreRequest> requests;
    for (std::size_t t = begin; t < end; ++t) {
      requests.push_back({&sample, options.first_seed + t});
    }
    const auto maps = score_chunk(scorer, requests, options.workers, begin);
    for (std::size_t k = 0; k < maps.size(); ++k) {
      check_shape(maps[k], sample, begin + k);
      const auto data = maps[k].data();
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<double>(data[i]) >= options.tau) ++hits[i];
      }
    }
  }

  std::vector<double> values(n);
  const auto trials = static_cast<double>(options.trials);
  for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(hits[i]) / trials;
  return ConfidenceMap(Method::mc_dropout, sample.height(), sample.width(), std::move(values));
}

ConfidenceMap tta_map(const Scorer& scorer, const Sample& sample, const Catalog& catalog,
                      const TtaOptions& options) {
  if (catalog.empty()) throw ValidationError("tta: catalog is empty");
  if (sample.height() != sample.width()) {
    throw ValidationError("tta: sample " + sample.id() + " is not square");
  }
  const auto caps = scorer.capabilities();
  if (!caps.deterministic) throw CapabilityError("tta needs a deterministic scorer");
  check_multi_image(caps, sample);

  const std::size_t n = sample.height() * sample.width();
  std::vector<double> sum(n, 0.0);
  const std::size_t chunk = chunk_size(options.workers);
  for (std::size_t begin = 0; begin < catalog.size(); begin += chunk) {
    const std::size_t end = std::min(catalog.size(), begin + chunk);
    const std::size_t len = end - begin;

    // Augmented copies get distinct ids so a batch never repeats one.
    std::vector<std::optional<Sample>> augmented(len);
    parallel_for(len, options.workers, [&](std::size_t k) {
      augmented[k] = apply_spec(catalog[begin + k], sample)
                         .with_id(sample.id() + "@" + std::to_string(begin + k));
    });
    std::vector<ScoreRequest> requests(len);
    for (std::size_t k = 0; k < len; ++k) requests[k] = {&*augmented[k], std::nullopt};

    const auto maps = score_chunk(scorer, requests, options.workers, begin);
    std::vector<std::optional<ScoreMap>> aligned(len);
    parallel_for(len, options.workers, [&](std::size_t k) {
      check_shape(maps[k], sample, begin + k);
      aligned[k] = apply_geometric(invert_geometric(catalog[begin + k].geometric()), maps[k]);
    });

    for (std::size_t k = 0; k < len; ++k) {
      const auto data = aligned[k]->data();
      for (std::size_t i = 0; i < n; ++i) sum[i] += static_cast<double>(data[i]);
    }
  }

  const auto count = static_cast<double>(catalog.size());
  for (auto& v : sum) v /= count;
  return ConfidenceMap(Method::tta, sample.height(), sample.width(), std::move(sum));
}

}  // namespace segconf
