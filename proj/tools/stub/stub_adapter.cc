#include "stub_adapter.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

#include "tlm/canonical.h"
#include "tlm/error.h"
#include "tlm/frames.h"

namespace tlm::stub {
namespace {

constexpr int kOccludedLevel = 250;

Json ErrorResponse(const std::string& id, std::string_view code,
                   const std::string& message) {
  BackendResponse r;
  r.request_id = id;
  r.ok = false;
  r.error_code = std::string(code);
  r.error_message = message;
  return ResponseToJson(r);
}

Json OkResponse(const std::string& id, Json body) {
  BackendResponse r;
  r.request_id = id;
  r.ok = true;
  r.body = std::move(body);
  return ResponseToJson(r);
}

// Mean absolute difference per sample between consecutive listed frames.
double MeanMotion(const FrameSequence& seq, const std::vector<std::size_t>& idx) {
  if (idx.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const auto a = seq.frame(idx[k]);
    const auto b = seq.frame(idx[k + 1]);
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      sum += static_cast<std::uint64_t>(std::abs(int{a[i]} - int{b[i]}));
    }
    total += static_cast<double>(sum) / static_cast<double>(a.size());
  }
  return total / static_cast<double>(idx.size() - 1);
}

std::vector<std::size_t> AllFrames(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> v;
  for (std::size_t i = begin; i < end; ++i) v.push_back(i);
  return v;
}

Json Track(const Json& payload) {
  const FrameSequence seq = ReadFrames(payload.at("video").get<std::string>());
  const int g = payload.at("grid_size").get<int>();
  const auto points = static_cast<std::size_t>(g) * static_cast<std::size_t>(g);
  std::vector<std::uint8_t> flags;
  flags.reserve(seq.frame_count() * points);
  for (std::size_t t = 0; t < seq.frame_count(); ++t) {
    const auto frame = seq.frame(t);
    for (int gy = 0; gy < g; ++gy) {
      const int y = static_cast<int>((gy + 0.5) * seq.height() / g);
      for (int gx = 0; gx < g; ++gx) {
        const int x = static_cast<int>((gx + 0.5) * seq.width() / g);
        const std::size_t base =
            (static_cast<std::size_t>(y) * seq.width() + x) * seq.channels();
        int sum = 0;
        for (int c = 0; c < seq.channels(); ++c) sum += frame[base + c];
        flags.push_back(sum < kOccludedLevel * seq.channels() ? 1 : 0);
      }
    }
  }
  return VisibilityToJson(
      VisibilityMatrix::Create(seq.frame_count(), points, g, std::move(flags)));
}

Json Retrieve(const Json& payload, const std::string& sentences_sha) {
  const FrameSequence seq = ReadFrames(payload.at("video").get<std::string>());
  std::size_t begin = 0, end = seq.frame_count();
  if (payload.contains("start_frame")) {
    begin = payload["start_frame"].get<std::size_t>();
    end = std::min(payload["end_frame"].get<std::size_t>(), seq.frame_count());
    if (begin >= end) throw Error(ErrorCode::kInvalidArgument, "empty frame range");
  }
  const double motion = MeanMotion(seq, AllFrames(begin, end));
  const double tilt = motion / 16.0 - 1.0;
  std::vector<double> logits;
  for (std::size_t i = 0; i < kSentenceCount; ++i) {
    const bool meta = i >= kGeneralSentences.size();
    logits.push_back((meta ? tilt : -tilt) + 0.01 * static_cast<double>(i % 5));
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - peak);
    z += l;
  }
  Json probs = Json::array();
  for (double l : logits) probs.push_back(l / z);
  return Json{{"sentence_probs", probs}, {"sentences_sha256", sentences_sha}};
}

Json Caption(const Json& payload, const StubOptions& options) {
  if (payload.at("task") == "frame") {
    const auto header = ReadFrameHeader(payload.at("video").get<std::string>());
    const auto k = payload.at("frame_index").get<std::size_t>();
    if (k >= header.frame_count) {
      throw Error(ErrorCode::kInvalidArgument, "frame_index out of range");
    }
    return Json{{"text", options.empty_captions ? "" : "frame " + std::to_string(k)}};
  }
  std::string text;
  if (!options.empty_captions) {
    text = "summary of " + std::to_string(payload.at("frames").size()) + " frames:";
    for (const Json& f : payload["frames"]) {
      text += " [" + std::to_string(f.at("position").get<std::size_t>()) + "] " +
              f.at("caption").get<std::string>() + ";";
    }
  }
  return Json{{"text", text}};
}

Json Rubric(const Json& payload, const StubOptions& options) {
  if (options.rubric_reply) return Json{{"text", *options.rubric_reply}};
  const FrameSequence seq = ReadFrames(payload.at("video").get<std::string>());
  std::vector<std::size_t> idx;
  for (const Json& i : payload.at("frame_indices")) {
    const auto k = i.get<std::size_t>();
    if (k >= seq.frame_count()) {
      throw Error(ErrorCode::kInvalidArgument, "frame index out of range");
    }
    idx.push_back(k);
  }
  const int score = 1 + std::min(4, static_cast<int>(MeanMotion(seq, idx) / 8.0));
  return Json{{"text", "Score: " + std::to_string(score)}};
}

}  // namespace

Json HandleRequest(const Json& request, const StubOptions& options) {
  std::string id;
  if (request.is_object()) {
    if (auto it = request.find("request_id"); it != request.end() && it->is_string()) {
      id = it->get<std::string>();
    }
  }
  const std::string reply_id = options.corrupt_request_id ? id + "-x" : id;

  BackendRequest req;
  try {
    req = RequestFromJson(request);
  } catch (const Error& e) {
    return ErrorResponse(reply_id, kWireBadRequest, e.what());
  }

  const std::string sentences_sha =
      options.drift_sentences
          ? Sha256Hex(CanonicalSentenceBytes() + " ")
          : SentencesChecksum();
  if (req.kind == RequestKind::kRetrieve &&
      req.payload.at("sentences_sha256") != sentences_sha) {
    return ErrorResponse(reply_id, kWireChecksumMismatch,
                         "adapter sentences " + sentences_sha +
                             " != request " +
                             req.payload["sentences_sha256"].get<std::string>());
  }
  if (req.kind == RequestKind::kRubric &&
      req.payload.at("rubric_sha256") != RubricChecksum()) {
    return ErrorResponse(reply_id, kWireChecksumMismatch,
                         "adapter rubric " + RubricChecksum() + " != request " +
                             req.payload["rubric_sha256"].get<std::string>());
  }

  try {
    switch (req.kind) {
      case RequestKind::kTrack: return OkResponse(reply_id, Track(req.payload));
      case RequestKind::kRetrieve:
        return OkResponse(reply_id, Retrieve(req.payload, sentences_sha));
      case RequestKind::kCaption:
        return OkResponse(reply_id, Caption(req.payload, options));
      case RequestKind::kRubric:
        return OkResponse(reply_id, Rubric(req.payload, options));
    }
  } catch (const std::exception& e) {
    return ErrorResponse(reply_id, kWireInference, e.what());
  }
  return ErrorResponse(reply_id, kWireBadRequest, "unhandled kind");
}

std::string HandleMessage(std::string_view bytes, const StubOptions& options) {
  Json request;
  try {
    request = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    return EncodeMessage(ErrorResponse("", kWireBadRequest, e.what()));
  }
  return EncodeMessage(HandleRequest(request, options));
}

BackendResponse StubBackend::Send(const BackendRequest& request,
                                  Deadline deadline) {
  if (options_.delay > deadline) {
    std::this_thread::sleep_for(deadline);
    throw Error(ErrorCode::kTimeout,
                "timeout after " + std::to_string(deadline.count()) +
                    " ms waiting for " + request.request_id);
  }
  std::this_thread::sleep_for(options_.delay);
  return ResponseFromJson(HandleRequest(RequestToJson(request), options_));
}

}  // namespace tlm::stub
