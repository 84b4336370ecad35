#ifndef TLM_MTSCORE_H_
#define TLM_MTSCORE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlm/protocol.h"
#include "tlm/types.h"

namespace tlm {

// Coarse metamorphic score: share of retrieval mass on the time-lapse
// sentences. Throws Error(kDegenerate) when both halves sum to zero.
double MTScoreCoarse(const RetrievalProfile& profile);

enum class VideoClass { kGeneral, kMetamorphic };

std::string_view VideoClassName(VideoClass c);

// General iff the general-sentence mass exceeds 0.5. Requires a normalized
// profile; throws Error(kNotNormalized) otherwise, since the 0.5 cut and the
// general-vs-metamorphic comparison only agree when the mass sums to one.
VideoClass ClassifyVideo(const RetrievalProfile& profile);

// `count` indices spread evenly over [0, frame_count): round(k (F-1)/(T-1)),
// half rounded up. When frame_count <= count every frame is returned once.
// Throws Error(kInvalidArgument) for frame_count == 0 or count < 2.
std::vector<std::size_t> SampleFramesUniform(std::size_t frame_count,
                                             int count);

struct GPTScoreConfig {
  static constexpr int kDefaultSampleCount = 8;
  static constexpr int kDefaultMaxRetries = 2;

  int sample_count = kDefaultSampleCount;
  int max_retries = kDefaultMaxRetries;
  Deadline deadline = kDefaultDeadline;

  void Validate() const;
};

// First integer token of the reply. Throws Error(kUnparseableReply) when
// the reply carries no integer, Error(kRubricViolation) when the first
// integer lies outside [1, 5].
int ParseRubricReply(std::string_view reply);

// Samples frames, asks the rubric backend for a score, and parses it.
// Unparseable replies and timeouts are retried up to max_retries times; a
// rubric violation is returned immediately.
int GptMtScore(Backend& backend, const std::string& video,
               std::size_t frame_count, const GPTScoreConfig& config);

struct GptScoreJob {
  std::string video;
  std::size_t frame_count = 0;
};

struct GptScoreOutcome {
  std::optional<int> score;
  std::string error;
};

// Runs GptMtScore over the jobs with at most `max_in_flight` concurrent
// requests. Outcomes are returned in job order.
std::vector<GptScoreOutcome> GptMtScoreBatch(Backend& backend,
                                             std::span<const GptScoreJob> jobs,
                                             const GPTScoreConfig& config,
                                             int max_in_flight);

// Per-prompt aggregate over seeds.
double MeanOverSeeds(std::span<const int> scores);

}  // namespace tlm

#endif  // TLM_MTSCORE_H_
