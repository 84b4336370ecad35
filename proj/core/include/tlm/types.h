#ifndef TLM_TYPES_H_
#define TLM_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tlm {

// Per-frame, per-point visibility flags produced by a point tracker.
// Row-major: frame f occupies [f * points, (f + 1) * points).
class VisibilityMatrix {
 public:
  // Throws Error(kDimensionMismatch) when flags.size() != frames * points,
  // Error(kGridMismatch) when grid_size is set and grid_size^2 != points.
  static VisibilityMatrix Create(std::size_t frames, std::size_t points,
                                 std::optional<int> grid_size,
                                 std::vector<std::uint8_t> flags);

  std::size_t frames() const { return frames_; }
  std::size_t points() const { return points_; }
  std::optional<int> grid_size() const { return grid_size_; }

  bool visible(std::size_t frame, std::size_t point) const {
    return flags_[frame * points_ + point] != 0;
  }
  std::span<const std::uint8_t> row(std::size_t frame) const {
    return {flags_.data() + frame * points_, points_};
  }
  std::size_t hidden_count(std::size_t frame) const;

  bool operator==(const VisibilityMatrix&) const = default;

 private:
  VisibilityMatrix() = default;

  std::size_t frames_ = 0;
  std::size_t points_ = 0;
  std::optional<int> grid_size_;
  std::vector<std::uint8_t> flags_;
};

// m[i] is the fraction of points missed in frame i; deltas[i] = m[i+1] - m[i].
class MissingSeries {
 public:
  // Throws Error(kInvalidArgument) on an empty series or a value outside [0,1].
  explicit MissingSeries(std::vector<double> missing);

  const std::vector<double>& missing() const { return missing_; }
  const std::vector<double>& deltas() const { return deltas_; }
  std::size_t frames() const { return missing_.size(); }

 private:
  std::vector<double> missing_;
  std::vector<double> deltas_;
};

struct CoherenceComponents {
  double r_missed = 0.0;
  double v_missed = 0.0;
  double r_cut = 0.0;
  double c_missed = 0.0;
  double m_missed = 0.0;
  double threshold = 0.0;

  double sum() const { return r_missed + v_missed + r_cut + c_missed + m_missed; }
};

// Relevance probabilities for one video against the canonical sentences,
// split into the general and metamorphic halves.
class RetrievalProfile {
 public:
  static constexpr double kNormalizationTolerance = 1e-6;

  // Throws Error(kInvalidArgument) for empty halves, negative or non-finite
  // entries.
  static RetrievalProfile Create(std::vector<double> meta_probs,
                                 std::vector<double> gen_probs);
  // Splits the ten canonical-order probabilities: indices 0-4 general,
  // 5-9 metamorphic.
  static RetrievalProfile FromSentenceProbs(std::span<const double> probs);

  const std::vector<double>& meta_probs() const { return meta_; }
  const std::vector<double>& gen_probs() const { return gen_; }
  double meta_sum() const;
  double gen_sum() const;
  bool normalized() const { return normalized_; }

 private:
  RetrievalProfile() = default;

  std::vector<double> meta_;
  std::vector<double> gen_;
  bool normalized_ = false;
};

enum class MajorCategory { kBiological, kHumanCreated, kMeteorological, kPhysical };

inline constexpr std::size_t kMajorCategoryCount = 4;

std::string_view MajorCategoryName(MajorCategory c);
// Throws Error(kInvalidArgument) for anything but the four canonical names.
MajorCategory ParseMajorCategory(std::string_view name);

inline constexpr std::size_t kMaxPromptWords = 77;

struct BenchmarkEntry {
  std::string prompt_id;
  std::string prompt;
  std::string reference_video;
  std::string sub_category;
  MajorCategory major_category = MajorCategory::kBiological;

  bool operator==(const BenchmarkEntry&) const = default;
};

// Throws Error(kInvalidArgument) on an empty id, empty prompt, prompt over
// kMaxPromptWords whitespace-separated words, or empty sub-category.
void ValidateEntry(const BenchmarkEntry& entry);

// "<major>-<sub>-<index>" with the sub-category lowercased and spaces
// replaced by '-'.
std::string MakePromptId(MajorCategory major, std::string_view sub_category,
                         int index);

inline constexpr int kSeedsPerPrompt = 3;

struct EvaluationRecord {
  std::string model_id;
  std::string prompt_id;
  int seed_index = 0;
  std::optional<double> chscore;
  std::optional<double> mtscore;
  std::optional<double> gpt4o_mtscore;
  std::map<std::string, double> external;

  bool operator==(const EvaluationRecord&) const = default;
};

// Throws Error(kInvalidArgument) when a metric falls outside its range or the
// seed index is outside [0, kSeedsPerPrompt).
void ValidateRecord(const EvaluationRecord& record);

}  // namespace tlm

#endif  // TLM_TYPES_H_
