#include "tlm/types.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "tlm/error.h"

namespace tlm {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kGridMismatch: return "grid_mismatch";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kNotNormalized: return "not_normalized";
    case ErrorCode::kRubricViolation: return "rubric_violation";
    case ErrorCode::kUnparseableReply: return "unparseable_reply";
    case ErrorCode::kEmptyCaption: return "empty_caption";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kChecksumMismatch: return "checksum_mismatch";
    case ErrorCode::kProtocol: return "protocol_error";
    case ErrorCode::kBackend: return "backend_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kNotFound: return "not_found";
  }
  return "unknown";
}

VisibilityMatrix VisibilityMatrix::Create(std::size_t frames,
                                          std::size_t points,
                                          std::optional<int> grid_size,
                                          std::vector<std::uint8_t> flags) {
  if (frames == 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension mismatch: visibility has no frames");
  }
  if (points == 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension mismatch: visibility has no points");
  }
  if (flags.size() != frames * points) {
    std::ostringstream msg;
    msg << "dimension mismatch: expected " << frames << "x" << points
        << " flags, got " << flags.size();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  if (grid_size.has_value()) {
    const long long g = *grid_size;
    if (g <= 0 || static_cast<unsigned long long>(g * g) != points) {
      std::ostringstream msg;
      msg << "grid mismatch: grid_size " << g << " squared != " << points
          << " points";
      throw Error(ErrorCode::kGridMismatch, msg.str());
    }
  }
  for (auto& f : flags) f = f ? 1 : 0;

  VisibilityMatrix m;
  m.frames_ = frames;
  m.points_ = points;
  m.grid_size_ = grid_size;
  m.flags_ = std::move(flags);
  return m;
}

std::size_t VisibilityMatrix::hidden_count(std::size_t frame) const {
  const auto r = row(frame);
  return static_cast<std::size_t>(std::count(r.begin(), r.end(), 0));
}

MissingSeries::MissingSeries(std::vector<double> missing)
    : missing_(std::move(missing)) {
  if (missing_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "missing series is empty");
  }
  for (double v : missing_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "missing fraction outside [0, 1]");
    }
  }
  deltas_.reserve(missing_.size() - 1);
  for (std::size_t i = 0; i + 1 < missing_.size(); ++i) {
    deltas_.push_back(missing_[i + 1] - missing_[i]);
  }
}

RetrievalProfile RetrievalProfile::Create(std::vector<double> meta_probs,
                                          std::vector<double> gen_probs) {
  if (meta_probs.empty() || gen_probs.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "retrieval profile needs at least one probability per side");
  }
  auto check = [](const std::vector<double>& v) {
    for (double p : v) {
      if (!std::isfinite(p) || p < 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "retrieval probabilities must be finite and >= 0");
      }
    }
  };
  check(meta_probs);
  check(gen_probs);

  RetrievalProfile p;
  p.meta_ = std::move(meta_probs);
  p.gen_ = std::move(gen_probs);
  p.normalized_ =
      std::abs(p.meta_sum() + p.gen_sum() - 1.0) <= kNormalizationTolerance;
  return p;
}

RetrievalProfile RetrievalProfile::FromSentenceProbs(
    std::span<const double> probs) {
  if (probs.size() != 10) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected 10 sentence probabilities, got " +
                    std::to_string(probs.size()));
  }
  return Create({probs.begin() + 5, probs.end()},
                {probs.begin(), probs.begin() + 5});
}

double RetrievalProfile::meta_sum() const {
  return std::accumulate(meta_.begin(), meta_.end(), 0.0);
}

double RetrievalProfile::gen_sum() const {
  return std::accumulate(gen_.begin(), gen_.end(), 0.0);
}

std::string_view MajorCategoryName(MajorCategory c) {
  switch (c) {
    case MajorCategory::kBiological: return "biological";
    case MajorCategory::kHumanCreated: return "human-created";
    case MajorCategory::kMeteorological: return "meteorological";
    case MajorCategory::kPhysical: return "physical";
  }
  return "";
}

MajorCategory ParseMajorCategory(std::string_view name) {
  for (auto c : {MajorCategory::kBiological, MajorCategory::kHumanCreated,
                 MajorCategory::kMeteorological, MajorCategory::kPhysical}) {
    if (MajorCategoryName(c) == name) return c;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown major_category \"" + std::string(name) + "\"");
}

namespace {

std::size_t CountWords(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (unsigned char ch : text) {
    const bool space = std::isspace(ch) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

}  // namespace

void ValidateEntry(const BenchmarkEntry& entry) {
  if (entry.prompt_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "prompt_id is empty");
  }
  const std::size_t words = CountWords(entry.prompt);
  if (words == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "prompt is empty for " + entry.prompt_id);
  }
  if (words > kMaxPromptWords) {
    throw Error(ErrorCode::kInvalidArgument,
                "prompt exceeds " + std::to_string(kMaxPromptWords) +
                    " words for " + entry.prompt_id);
  }
  if (entry.sub_category.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sub_category is empty for " + entry.prompt_id);
  }
}

std::string MakePromptId(MajorCategory major, std::string_view sub_category,
                         int index) {
  std::string slug;
  for (unsigned char ch : sub_category) {
    if (std::isspace(ch)) {
      if (!slug.empty() && slug.back() != '-') slug.push_back('-');
    } else {
      slug.push_back(static_cast<char>(std::tolower(ch)));
    }
  }
  while (!slug.empty() && slug.back() == '-') slug.pop_back();
  return std::string(MajorCategoryName(major)) + "-" + slug + "-" +
         std::to_string(index);
}

void ValidateRecord(const EvaluationRecord& record) {
  if (record.seed_index < 0 || record.seed_index >= kSeedsPerPrompt) {
    throw Error(ErrorCode::kInvalidArgument,
                "seed_index out of range for " + record.prompt_id);
  }
  if (record.mtscore && !(*record.mtscore >= 0.0 && *record.mtscore <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mtscore outside [0, 1]");
  }
  if (record.gpt4o_mtscore &&
      !(*record.gpt4o_mtscore >= 1.0 && *record.gpt4o_mtscore <= 5.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gpt4o_mtscore outside [1, 5]");
  }
  if (record.chscore &&
      !(*record.chscore > 0.0 && std::isfinite(*record.chscore))) {
    throw Error(ErrorCode::kInvalidArgument, "chscore must be positive");
  }
}

}  // namespace tlm
