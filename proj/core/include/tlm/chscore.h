#ifndef TLM_CHSCORE_H_
#define TLM_CHSCORE_H_

#include "tlm/types.h"

namespace tlm {

// Temporal coherence score computed from point-tracker visibility.
//
// The score is the reciprocal of five penalties derived from the per-frame
// missed-point fraction m[i] and its forward differences dm[i]:
//   r_missed  mean of m
//   v_missed  population standard deviation of dm
//   r_cut     |{i : dm[i] > T}| / F
//   c_missed  sum of dm[i] over the same set
//   m_missed  max of dm (clamped at zero unless raw mode is requested)
// An epsilon keeps the reciprocal finite for a perfectly tracked video.

struct CHScoreConfig {
  static constexpr double kDefaultThreshold = 0.1;
  static constexpr double kDefaultEpsilon = 1e-6;
  static constexpr int kDefaultGridSize = 10;

  double threshold = kDefaultThreshold;
  double epsilon = kDefaultEpsilon;
  bool clamp_negative_max = true;

  // Throws Error(kInvalidArgument) unless 0 < threshold <= 1 and epsilon > 0.
  void Validate() const;
};

struct CHScoreResult {
  double score = 0.0;
  CoherenceComponents components;
  MissingSeries series;
};

MissingSeries ComputeMissingSeries(const VisibilityMatrix& vis);

CoherenceComponents ComputeCoherenceComponents(const MissingSeries& series,
                                               const CHScoreConfig& config);

double CHScore(const CoherenceComponents& components,
               const CHScoreConfig& config);

CHScoreResult CHScoreFromVisibility(const VisibilityMatrix& vis,
                                    const CHScoreConfig& config);

}  // namespace tlm

#endif  // TLM_CHSCORE_H_
