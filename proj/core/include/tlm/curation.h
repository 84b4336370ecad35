#ifndef TLM_CURATION_H_
#define TLM_CURATION_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tlm/frames.h"
#include "tlm/protocol.h"
#include "tlm/types.h"

namespace tlm {

// Time-lapse curation: cut raw footage at transitions, re-join clips that
// were split inside one scene, keep only metamorphic clips, and caption
// them from per-frame descriptions.

struct Clip {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive

  std::size_t length() const { return end - start; }
  bool operator==(const Clip&) const = default;
};

// Ordered clips that partition [0, total_frames).
class ClipBoundary {
 public:
  // Throws Error(kInvalidArgument) unless the clips are nonempty, in order,
  // contiguous, start at 0 and end at total_frames.
  static ClipBoundary Create(std::vector<Clip> clips, std::size_t total_frames);
  static ClipBoundary Single(std::size_t total_frames);

  const std::vector<Clip>& clips() const { return clips_; }
  std::size_t size() const { return clips_.size(); }
  std::size_t total_frames() const { return total_frames_; }

  bool operator==(const ClipBoundary&) const = default;

 private:
  ClipBoundary() = default;

  std::vector<Clip> clips_;
  std::size_t total_frames_ = 0;
};

struct CurationConfig {
  // Mean absolute difference per sample (pixel x channel), 0-255 scale.
  static constexpr double kDefaultTauPerPixel = 30.0;
  // Euclidean distance between unit-normalized boundary embeddings.
  static constexpr double kDefaultEta = 0.5;
  static constexpr int kDefaultCaptionFrames = 8;

  double tau_per_pixel = kDefaultTauPerPixel;
  double eta = kDefaultEta;
  int caption_frames = kDefaultCaptionFrames;
};

// D_t = sum over rows, columns and channels of |I_t - I_{t+1}|, t in [0, F-1).
// Throws Error(kInvalidArgument) when fewer than two frames are given.
std::vector<double> FrameDiffSeries(const FrameSequence& frames);

// Raw threshold on D_t equivalent to a per-sample mean difference.
double TransitionThreshold(double tau_per_pixel, int height, int width,
                           int channels);

// Cuts between t and t+1 wherever diffs[t] > tau. diffs spans
// diffs.size() + 1 frames.
ClipBoundary SplitOnTransitions(std::span<const double> diffs, double tau);

enum class BoundaryPosition { kFirst, kLast };

struct ClipFeature {
  std::size_t clip_index = 0;
  BoundaryPosition position = BoundaryPosition::kFirst;
  std::vector<double> embedding;
};

// Joins adjacent clips whose boundary embeddings are closer than eta,
// scanning left to right. After a merge the running clip's trailing
// embedding is that of its rightmost member. Throws Error(kNotFound) when an
// adjacency lacks a feature, Error(kInvalidArgument) on empty, non-finite or
// mismatched-length embeddings.
ClipBoundary MergeSimilarClips(const ClipBoundary& boundary,
                               std::span<const ClipFeature> features,
                               double eta);

// Keeps the clips classified metamorphic, in order. Throws
// Error(kInvalidArgument) if the counts differ; classification errors
// propagate.
std::vector<Clip> FilterMetamorphic(std::span<const Clip> clips,
                                    std::span<const RetrievalProfile> profiles);

struct CaptionOptions {
  int frame_count = CurationConfig::kDefaultCaptionFrames;
  int max_retries = 2;
  Deadline deadline = kDefaultDeadline;
};

// Samples frames uniformly inside the clip, captions each one through
// `captioner`, then asks `summarizer` for one caption given the
// (frame position, caption) pairs. Positions are absolute frame indices in
// the source video. Throws Error(kEmptyCaption) if any caption or the
// summary comes back empty.
std::string CaptionClip(Backend& captioner, Backend& summarizer,
                        const std::string& video, Clip clip,
                        const CaptionOptions& options);

}  // namespace tlm

#endif  // TLM_CURATION_H_
