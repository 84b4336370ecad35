#include "tlm/mtscore.h"

#include <atomic>
#include <cctype>
#include <numeric>
#include <thread>

#include "tlm/canonical.h"
#include "tlm/error.h"

namespace tlm {

double MTScoreCoarse(const RetrievalProfile& profile) {
  const double meta = profile.meta_sum();
  const double total = meta + profile.gen_sum();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "degenerate retrieval profile");
  }
  return meta / total;
}

std::string_view VideoClassName(VideoClass c) {
  return c == VideoClass::kGeneral ? "general" : "metamorphic";
}

VideoClass ClassifyVideo(const RetrievalProfile& profile) {
  if (!profile.normalized()) {
    throw Error(ErrorCode::kNotNormalized,
                "retrieval profile is not normalized; softmax the ten "
                "sentence scores so they sum to 1 before classifying");
  }
  return profile.gen_sum() > 0.5 ? VideoClass::kGeneral
                                 : VideoClass::kMetamorphic;
}

std::vector<std::size_t> SampleFramesUniform(std::size_t frame_count,
                                             int count) {
  if (frame_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot sample from zero frames");
  }
  if (count < 2) {
    throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 2");
  }
  const auto t = static_cast<std::size_t>(count);
  std::vector<std::size_t> out;
  if (frame_count <= t) {
    out.resize(frame_count);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  // round(k * (F - 1) / (T - 1)) in integer arithmetic, halves rounded up.
  const std::size_t span = frame_count - 1;
  const std::size_t steps = t - 1;
  out.reserve(t);
  for (std::size_t k = 0; k < t; ++k) {
    out.push_back((2 * k * span + steps) / (2 * steps));
  }
  return out;
}

void GPTScoreConfig::Validate() const {
  if (sample_count < 2) {
    throw Error(ErrorCode::kInvalidArgument, "sample_count must be >= 2");
  }
  if (max_retries < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
  }
}

int ParseRubricReply(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size()) {
    if (!std::isdigit(static_cast<unsigned char>(reply[i]))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < reply.size() && std::isdigit(static_cast<unsigned char>(reply[i]))) {
      ++i;
    }
    // Skip decimals such as "3.5"; they are not integer tokens.
    if (i + 1 < reply.size() && reply[i] == '.' &&
        std::isdigit(static_cast<unsigned char>(reply[i + 1]))) {
      ++i;
      while (i < reply.size() &&
             std::isdigit(static_cast<unsigned char>(reply[i]))) {
        ++i;
      }
      continue;
    }
    const std::string_view digits = reply.substr(begin, i - begin);
    if (digits.size() > 1 ||
        digits[0] < '0' + kRubricMinScore || digits[0] > '0' + kRubricMaxScore) {
      throw Error(ErrorCode::kRubricViolation,
                  "rubric violation: score " + std::string(digits) +
                      " outside [1, 5]");
    }
    return digits[0] - '0';
  }
  throw Error(ErrorCode::kUnparseableReply,
              "no integer score in reply \"" + std::string(reply) + "\"");
}

int GptMtScore(Backend& backend, const std::string& video,
               std::size_t frame_count, const GPTScoreConfig& config) {
  config.Validate();
  const auto indices = SampleFramesUniform(frame_count, config.sample_count);
  for (int attempt = 0;; ++attempt) {
    try {
      return ParseRubricReply(
          RubricReply(backend, video, indices, config.deadline));
    } catch (const Error& e) {
      const bool retryable = e.code() == ErrorCode::kUnparseableReply ||
                             e.code() == ErrorCode::kTimeout;
      if (!retryable || attempt >= config.max_retries) throw;
    }
  }
}

std::vector<GptScoreOutcome> GptMtScoreBatch(Backend& backend,
                                             std::span<const GptScoreJob> jobs,
                                             const GPTScoreConfig& config,
                                             int max_in_flight) {
  config.Validate();
  if (max_in_flight < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  }
  std::vector<GptScoreOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        outcomes[i].score =
            GptMtScore(backend, jobs[i].video, jobs[i].frame_count, config);
      } catch (const Error& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), jobs.size());
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return outcomes;
}

double MeanOverSeeds(std::span<const int> scores) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no seed scores to average");
  }
  return static_cast<double>(std::accumulate(scores.begin(), scores.end(), 0)) /
         static_cast<double>(scores.size());
}

}  // namespace tlm
