#include "tlm/canonical.h"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "tlm/error.h"

namespace tlm {

std::string_view CanonicalSentence(std::size_t index) {
  if (index < kGeneralSentences.size()) return kGeneralSentences[index];
  index -= kGeneralSentences.size();
  if (index < kMetamorphicSentences.size()) return kMetamorphicSentences[index];
  throw Error(ErrorCode::kInvalidArgument, "sentence index out of range");
}

std::string_view RubricLevel(int level) {
  if (level < kRubricMinScore || level > kRubricMaxScore) {
    throw Error(ErrorCode::kInvalidArgument,
                "rubric level must be in [1, 5], got " + std::to_string(level));
  }
  return kRubricLevels[static_cast<std::size_t>(level - 1)];
}

std::string CanonicalSentenceBytes() {
  std::string out;
  for (std::size_t i = 0; i < kSentenceCount; ++i) {
    if (i) out.push_back('\n');
    out.append(CanonicalSentence(i));
  }
  return out;
}

std::string CanonicalRubricBytes() {
  std::string out;
  for (int k = kRubricMinScore; k <= kRubricMaxScore; ++k) {
    if (k > kRubricMinScore) out.push_back('\n');
    out.append(std::to_string(k));
    out.push_back('\t');
    out.append(RubricLevel(k));
  }
  return out;
}

std::string RubricPrompt() {
  std::string out =
      "The images are frames sampled uniformly, in temporal order, from one "
      "video. Rate how much the scene changes over the course of the video "
      "on a 1-5 scale using these criteria:\n";
  out += CanonicalRubricBytes();
  out += "\nAnswer with a single integer from 1 to 5.";
  return out;
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string SentencesChecksum() {
  static const std::string checksum = Sha256Hex(CanonicalSentenceBytes());
  return checksum;
}

std::string RubricChecksum() {
  static const std::string checksum = Sha256Hex(CanonicalRubricBytes());
  return checksum;
}

}  // namespace tlm
