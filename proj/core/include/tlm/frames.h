#ifndef TLM_FRAMES_H_
#define TLM_FRAMES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tlm {

// Decoded video frames, 8-bit, channel-interleaved, row-major.
// Pixel (t, y, x, c) lives at ((t * height + y) * width + x) * channels + c.
class FrameSequence {
 public:
  // Throws Error(kInvalidArgument) for zero dimensions, channels not in
  // {1, 3}, zero frames, or a data size that disagrees with the dimensions.
  static FrameSequence Create(int height, int width, int channels,
                              std::size_t frame_count,
                              std::vector<std::uint8_t> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t frame_count() const { return frame_count_; }
  std::size_t frame_bytes() const {
    return static_cast<std::size_t>(height_) * width_ * channels_;
  }

  std::span<const std::uint8_t> frame(std::size_t t) const {
    return {data_.data() + t * frame_bytes(), frame_bytes()};
  }
  const std::vector<std::uint8_t>& data() const { return data_; }

  // Frames [start, end) as a new sequence.
  FrameSequence Slice(std::size_t start, std::size_t end) const;

 private:
  FrameSequence() = default;

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::size_t frame_count_ = 0;
  std::vector<std::uint8_t> data_;
};

// Raw frame file: four little-endian uint32 (H, W, C, F) followed by
// F * H * W * C bytes laid out as described on FrameSequence.
struct FrameHeader {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  std::uint32_t frame_count = 0;
};

inline constexpr std::size_t kFrameHeaderBytes = 16;

// Reads only the header and checks the file length against it.
// Directories of numbered images are also accepted (see ReadFrames).
FrameHeader ReadFrameHeader(const std::string& path);

// Loads a raw frame file, or a directory of numbered image files
// (sorted by the integer in their stem; any format OpenCV decodes).
// Throws Error(kIo) on unreadable or inconsistent input.
FrameSequence ReadFrames(const std::string& path);

void WriteFrames(const std::string& path, const FrameSequence& frames);

}  // namespace tlm

#endif  // TLM_FRAMES_H_
