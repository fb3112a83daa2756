#include "segconf/scorer.hpp"

#include "segconf/error.hpp"
#include "segconf/parallel.hpp"

namespace segconf {

ScoreMap Scorer::sample_stochastic(const Sample& sample, std::uint64_t) const {
  throw CapabilityError("scorer is not stochastic; cannot score sample " + sample.id() +
                        " under a dropout seed");
}

std::vector<ScoreMap> Scorer::score_batch(std::span<const ScoreRequest> requests,
                                          std::size_t workers) const {
  const auto caps = capabilities();
  for (const auto& r : requests) {
    if (r.seed && !caps.stochastic) {
      throw CapabilityError("scorer is not stochastic; seeded request for " + r.sample->id());
    }
  }
  std::vector<std::optional<ScoreMap>> slots(requests.size());
  parallel_for(requests.size(), caps.concurrent ? workers : 1, [&](std::size_t i) {
    const auto& r = requests[i];
    try {
      slots[i] = r.seed ? sample_stochastic(*r.sample, *r.seed) : score(*r.sample);
    } catch (const CapabilityError&) {
      throw;
    } catch (const ProtocolError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScorerError(i, e.what());
    }
  });
  std::vector<ScoreMap> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace segconf
