#ifndef TLM_CANONICAL_H_
#define TLM_CANONICAL_H_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace tlm {

// Retrieval sentences scored by the video-text retrieval backend. Order is
// part of the wire contract: the first five describe general footage, the
// last five describe time-lapse footage. Any byte change alters the
// checksum that travels with every retrieve request.
inline constexpr std::array<std::string_view, 5> kGeneralSentences = {
    "A conventional video, not a time-condensed video.",
    "A usual video, not an accelerated video sequence.",
    "A normal video, not a time-lapse video.",
    "A standard video, not a time-lapse.",
    "An ordinary video, different from a fast-motion video.",
};

inline constexpr std::array<std::string_view, 5> kMetamorphicSentences = {
    "A time-lapse video, distinct from a regular recording.",
    "A time-lapse footage, not your typical video.",
    "A fast-motion video, unlike a standard video.",
    "A time-condensed video, not a conventional video.",
    "An accelerated video sequence, not a usual video.",
};

inline constexpr std::size_t kSentenceCount =
    kGeneralSentences.size() + kMetamorphicSentences.size();

// Five-level rubric for the LLM-judged metamorphic score, level k at [k-1].
inline constexpr std::array<std::string_view, 5> kRubricLevels = {
    "Minimal change. The scene appears almost like a still image, with static "
    "elements remaining motionless and only minor changes in lighting or "
    "subtle movements of elements. No significant activity is noticeable.",
    "Slight change. There is a small amount of movement or change in the "
    "elements of the scene, such as a few people or vehicles moving and minor "
    "changes in light or shadows. The overall variation is still minimal, "
    "with changes mostly being quantitative.",
    "Moderate change. Multiple elements in the scene undergo changes, but the "
    "overall pace is slow. This includes gradual changes in daylight, moving "
    "clouds, growing plants, or occasional vehicle and pedestrian movements. "
    "The scene begins to show a transition from quantitative to qualitative "
    "change.",
    "Significant change. The elements in the scene show obvious dynamic "
    "changes with a higher speed and frequency of variation. This includes "
    "noticeable changes in city traffic, crowd activities, or significant "
    "weather transitions. The scene displays a mix of quantitative and "
    "qualitative changes.",
    "Dramatic change. Elements in the scene undergo continuous and rapid "
    "significant changes, creating a very rich visual effect. This includes "
    "events like sunrise and sunset, construction of buildings, and seasonal "
    "changes, making the variation process vivid and impactful. The scene "
    "exhibits clear qualitative change.",
};

inline constexpr int kRubricMinScore = 1;
inline constexpr int kRubricMaxScore = 5;

// Sentence at canonical position [0, kSentenceCount).
std::string_view CanonicalSentence(std::size_t index);

// Text of rubric level k in [1, 5]; throws Error(kInvalidArgument) otherwise.
std::string_view RubricLevel(int level);

// Sentences joined by '\n', no trailing newline.
std::string CanonicalSentenceBytes();
// "<k>\t<text>" lines joined by '\n', no trailing newline.
std::string CanonicalRubricBytes();

// Full instruction sent to the rubric backend alongside the sampled frames.
std::string RubricPrompt();

std::string Sha256Hex(std::string_view bytes);
std::string SentencesChecksum();
std::string RubricChecksum();

}  // namespace tlm

#endif  // TLM_CANONICAL_H_
