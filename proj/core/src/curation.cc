#include "tlm/curation.h"

#include <cmath>
#include <cstdlib>
#include <map>
#include <utility>

#include "tlm/error.h"
#include "tlm/mtscore.h"

namespace tlm {

ClipBoundary ClipBoundary::Create(std::vector<Clip> clips,
                                  std::size_t total_frames) {
  if (clips.empty() || total_frames == 0) {
    throw Error(ErrorCode::kInvalidArgument, "clip boundary is empty");
  }
  std::size_t cursor = 0;
  for (const Clip& c : clips) {
    if (c.start != cursor || c.end <= c.start) {
      throw Error(ErrorCode::kInvalidArgument,
                  "clips must be nonempty, ordered and contiguous");
    }
    cursor = c.end;
  }
  if (cursor != total_frames) {
    throw Error(ErrorCode::kInvalidArgument,
                "clips do not cover all " + std::to_string(total_frames) +
                    " frames");
  }
  ClipBoundary b;
  b.clips_ = std::move(clips);
  b.total_frames_ = total_frames;
  return b;
}

ClipBoundary ClipBoundary::Single(std::size_t total_frames) {
  return Create({Clip{0, total_frames}}, total_frames);
}

std::vector<double> FrameDiffSeries(const FrameSequence& frames) {
  if (frames.frame_count() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame differences need at least two frames");
  }
  std::vector<double> diffs;
  diffs.reserve(frames.frame_count() - 1);
  for (std::size_t t = 0; t + 1 < frames.frame_count(); ++t) {
    const auto a = frames.frame(t);
    const auto b = frames.frame(t + 1);
    std::uint64_t sum = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      sum += static_cast<std::uint64_t>(std::abs(int{a[k]} - int{b[k]}));
    }
    diffs.push_back(static_cast<double>(sum));
  }
  return diffs;
}

double TransitionThreshold(double tau_per_pixel, int height, int width,
                           int channels) {
  if (!(tau_per_pixel > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  }
  return tau_per_pixel * height * width * channels;
}

ClipBoundary SplitOnTransitions(std::span<const double> diffs, double tau) {
  const std::size_t frames = diffs.size() + 1;
  std::vector<Clip> clips;
  std::size_t start = 0;
  for (std::size_t t = 0; t < diffs.size(); ++t) {
    if (diffs[t] > tau) {
      clips.push_back({start, t + 1});
      start = t + 1;
    }
  }
  clips.push_back({start, frames});
  return ClipBoundary::Create(std::move(clips), frames);
}

namespace {

double EuclideanDistance(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "boundary embeddings differ in length");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss);
}

}  // namespace

ClipBoundary MergeSimilarClips(const ClipBoundary& boundary,
                               std::span<const ClipFeature> features,
                               double eta) {
  if (!(eta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eta must be positive");
  }
  std::map<std::pair<std::size_t, BoundaryPosition>, const std::vector<double>*>
      lookup;
  for (const ClipFeature& f : features) {
    if (f.embedding.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty boundary embedding");
    }
    for (double v : f.embedding) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "non-finite boundary embedding");
      }
    }
    lookup[{f.clip_index, f.position}] = &f.embedding;
  }
  auto feature = [&](std::size_t clip, BoundaryPosition pos)
      -> const std::vector<double>& {
    auto it = lookup.find({clip, pos});
    if (it == lookup.end()) {
      throw Error(ErrorCode::kNotFound,
                  "missing " +
                      std::string(pos == BoundaryPosition::kFirst ? "first"
                                                                  : "last") +
                      "-frame feature for clip " + std::to_string(clip));
    }
    return *it->second;
  };

  const auto& clips = boundary.clips();
  std::vector<Clip> merged;
  Clip current = clips.front();
  std::size_t tail = 0;  // clip whose last frame ends `current`
  for (std::size_t i = 1; i < clips.size(); ++i) {
    const double distance = EuclideanDistance(
        feature(tail, BoundaryPosition::kLast),
        feature(i, BoundaryPosition::kFirst));
    if (distance < eta) {
      current.end = clips[i].end;
    } else {
      merged.push_back(current);
      current = clips[i];
    }
    tail = i;
  }
  merged.push_back(current);
  return ClipBoundary::Create(std::move(merged), boundary.total_frames());
}

std::vector<Clip> FilterMetamorphic(std::span<const Clip> clips,
                                    std::span<const RetrievalProfile> profiles) {
  if (clips.size() != profiles.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "need exactly one retrieval profile per clip");
  }
  std::vector<Clip> kept;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (ClassifyVideo(profiles[i]) == VideoClass::kMetamorphic) {
      kept.push_back(clips[i]);
    }
  }
  return kept;
}

namespace {

template <typename Call>
std::string WithRetries(int max_retries, Call&& call) {
  for (int attempt = 0;; ++attempt) {
    try {
      return call();
    } catch (const Error& e) {
      const bool retryable = e.code() == ErrorCode::kTimeout ||
                             e.code() == ErrorCode::kBackend;
      if (!retryable || attempt >= max_retries) throw;
    }
  }
}

}  // namespace

std::string CaptionClip(Backend& captioner, Backend& summarizer,
                        const std::string& video, Clip clip,
                        const CaptionOptions& options) {
  if (options.frame_count < 2) {
    throw Error(ErrorCode::kInvalidArgument, "caption frame count must be >= 2");
  }
  if (clip.end <= clip.start) {
    throw Error(ErrorCode::kInvalidArgument, "cannot caption an empty clip");
  }
  std::vector<PositionedCaption> captions;
  for (std::size_t offset :
       SampleFramesUniform(clip.length(), options.frame_count)) {
    const std::size_t position = clip.start + offset;
    std::string text = WithRetries(options.max_retries, [&] {
      return CaptionFrame(captioner, video, position, options.deadline);
    });
    if (text.empty()) {
      throw Error(ErrorCode::kEmptyCaption,
                  "empty caption for frame " + std::to_string(position));
    }
    captions.push_back({position, std::move(text)});
  }
  std::string summary = WithRetries(options.max_retries, [&] {
    return SummarizeCaptions(summarizer, captions, options.deadline);
  });
  if (summary.empty()) throw Error(ErrorCode::kEmptyCaption, "empty caption");
  return summary;
}

}  // namespace tlm
