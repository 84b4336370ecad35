#include "tlm/chscore.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tlm/error.h"

namespace tlm {

void CHScoreConfig::Validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in (0, 1]");
  }
  if (!(epsilon > 0.0 && std::isfinite(epsilon))) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
}

MissingSeries ComputeMissingSeries(const VisibilityMatrix& vis) {
  std::vector<double> missing(vis.frames());
  const double n = static_cast<double>(vis.points());
  for (std::size_t f = 0; f < vis.frames(); ++f) {
    missing[f] = static_cast<double>(vis.hidden_count(f)) / n;
  }
  return MissingSeries(std::move(missing));
}

CoherenceComponents ComputeCoherenceComponents(const MissingSeries& series,
                                               const CHScoreConfig& config) {
  config.Validate();
  const auto& m = series.missing();
  const auto& dm = series.deltas();
  const double frames = static_cast<double>(m.size());

  CoherenceComponents c;
  c.threshold = config.threshold;
  c.r_missed = std::accumulate(m.begin(), m.end(), 0.0) / frames;
  if (dm.empty()) return c;

  // Population deviation over the F-1 deltas.
  if (dm.size() >= 2) {
    const double count = static_cast<double>(dm.size());
    const double mean = std::accumulate(dm.begin(), dm.end(), 0.0) / count;
    double ss = 0.0;
    for (double d : dm) ss += (d - mean) * (d - mean);
    c.v_missed = std::sqrt(ss / count);
  }

  std::size_t cuts = 0;
  for (double d : dm) {
    if (d > config.threshold) {
      ++cuts;
      c.c_missed += d;
    }
  }
  // Denominator is the frame count, not the delta count.
  c.r_cut = static_cast<double>(cuts) / frames;

  const double peak = *std::max_element(dm.begin(), dm.end());
  c.m_missed = config.clamp_negative_max ? std::max(peak, 0.0) : peak;
  return c;
}

double CHScore(const CoherenceComponents& components,
               const CHScoreConfig& config) {
  config.Validate();
  return 1.0 / (components.sum() + config.epsilon);
}

CHScoreResult CHScoreFromVisibility(const VisibilityMatrix& vis,
                                    const CHScoreConfig& config) {
  MissingSeries series = ComputeMissingSeries(vis);
  CoherenceComponents components = ComputeCoherenceComponents(series, config);
  const double score = CHScore(components, config);
  return {score, components, std::move(series)};
}

}  // namespace tlm
