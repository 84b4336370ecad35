#include "tlm/frames.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <utility>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "tlm/error.h"

namespace tlm {
namespace fs = std::filesystem;

namespace {

std::uint32_t ReadU32Le(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

void PutU32Le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Numbered image files in a directory, ordered by the integer in the stem.
std::vector<fs::path> ListNumberedImages(const fs::path& dir) {
  std::vector<std::pair<unsigned long long, fs::path>> found;
  std::error_code ec;
  for (const auto& ent : fs::directory_iterator(dir, ec)) {
    if (!ent.is_regular_file()) continue;
    const std::string stem = ent.path().stem().string();
    std::string digits;
    for (char c : stem) {
      if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
    }
    if (digits.empty()) continue;
    found.emplace_back(std::stoull(digits), ent.path());
  }
  if (ec) throw Error(ErrorCode::kIo, "cannot list " + dir.string());
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [n, p] : found) out.push_back(std::move(p));
  if (out.empty()) {
    throw Error(ErrorCode::kIo, "no numbered images in " + dir.string());
  }
  return out;
}

cv::Mat LoadImage(const fs::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw Error(ErrorCode::kIo, "cannot decode " + path.string());
  if (img.depth() != CV_8U) {
    throw Error(ErrorCode::kIo, "only 8-bit images are supported: " + path.string());
  }
  cv::Mat out;
  switch (img.channels()) {
    case 1: out = img; break;
    case 3: cv::cvtColor(img, out, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(img, out, cv::COLOR_BGRA2RGB); break;
    default:
      throw Error(ErrorCode::kIo, "unsupported channel count in " + path.string());
  }
  return out.isContinuous() ? out : out.clone();
}

}  // namespace

FrameSequence FrameSequence::Create(int height, int width, int channels,
                                    std::size_t frame_count,
                                    std::vector<std::uint8_t> data) {
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "channels must be 1 or 3");
  }
  if (frame_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame sequence is empty");
  }
  const std::size_t expected =
      static_cast<std::size_t>(height) * width * channels * frame_count;
  if (data.size() != expected) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame data has " + std::to_string(data.size()) +
                    " bytes, expected " + std::to_string(expected));
  }
  FrameSequence s;
  s.height_ = height;
  s.width_ = width;
  s.channels_ = channels;
  s.frame_count_ = frame_count;
  s.data_ = std::move(data);
  return s;
}

FrameSequence FrameSequence::Slice(std::size_t start, std::size_t end) const {
  if (start >= end || end > frame_count_) {
    throw Error(ErrorCode::kInvalidArgument, "invalid frame slice");
  }
  std::vector<std::uint8_t> data(data_.begin() + start * frame_bytes(),
                                 data_.begin() + end * frame_bytes());
  return Create(height_, width_, channels_, end - start, std::move(data));
}

FrameHeader ReadFrameHeader(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    const auto files = ListNumberedImages(path);
    const cv::Mat first = LoadImage(files.front());
    return {static_cast<std::uint32_t>(first.rows),
            static_cast<std::uint32_t>(first.cols),
            static_cast<std::uint32_t>(first.channels()),
            static_cast<std::uint32_t>(files.size())};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  unsigned char raw[kFrameHeaderBytes];
  if (!in.read(reinterpret_cast<char*>(raw), sizeof(raw))) {
    throw Error(ErrorCode::kIo, "truncated frame header in " + path);
  }
  FrameHeader h{ReadU32Le(raw), ReadU32Le(raw + 4), ReadU32Le(raw + 8),
                ReadU32Le(raw + 12)};
  if (h.height == 0 || h.width == 0 || h.frame_count == 0 ||
      (h.channels != 1 && h.channels != 3)) {
    throw Error(ErrorCode::kIo, "invalid frame header in " + path);
  }
  const auto size = fs::file_size(path, ec);
  const auto expected = kFrameHeaderBytes + std::uintmax_t{h.height} * h.width *
                                                h.channels * h.frame_count;
  if (ec || size != expected) {
    throw Error(ErrorCode::kIo, "frame file size disagrees with header: " + path);
  }
  return h;
}

FrameSequence ReadFrames(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    const auto files = ListNumberedImages(path);
    std::vector<std::uint8_t> data;
    int h = 0, w = 0, c = 0;
    for (const auto& f : files) {
      const cv::Mat img = LoadImage(f);
      if (data.empty()) {
        h = img.rows;
        w = img.cols;
        c = img.channels();
      } else if (img.rows != h || img.cols != w || img.channels() != c) {
        throw Error(ErrorCode::kIo, "frame size changes at " + f.string());
      }
      data.insert(data.end(), img.data, img.data + img.total() * img.elemSize());
    }
    return FrameSequence::Create(h, w, c, files.size(), std::move(data));
  }
  const FrameHeader h = ReadFrameHeader(path);
  std::ifstream in(path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(kFrameHeaderBytes));
  std::vector<std::uint8_t> data(std::size_t{h.height} * h.width * h.channels *
                                 h.frame_count);
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size()))) {
    throw Error(ErrorCode::kIo, "truncated frame data in " + path);
  }
  return FrameSequence::Create(static_cast<int>(h.height),
                               static_cast<int>(h.width),
                               static_cast<int>(h.channels), h.frame_count,
                               std::move(data));
}

void WriteFrames(const std::string& path, const FrameSequence& frames) {
  std::string out;
  out.reserve(kFrameHeaderBytes + frames.data().size());
  PutU32Le(out, static_cast<std::uint32_t>(frames.height()));
  PutU32Le(out, static_cast<std::uint32_t>(frames.width()));
  PutU32Le(out, static_cast<std::uint32_t>(frames.channels()));
  PutU32Le(out, static_cast<std::uint32_t>(frames.frame_count()));
  out.append(reinterpret_cast<const char*>(frames.data().data()),
             frames.data().size());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !f.write(out.data(), static_cast<std::streamsize>(out.size()))) {
    throw Error(ErrorCode::kIo, "cannot write " + path);
  }
}

}  // namespace tlm
