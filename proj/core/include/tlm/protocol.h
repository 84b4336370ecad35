#ifndef TLM_PROTOCOL_H_
#define TLM_PROTOCOL_H_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tlm/json_io.h"
#include "tlm/types.h"

namespace tlm {

// Wire contract between the toolkit and a model-hosting adapter.
//
// Request:  {"request_id": str, "kind": "track"|"retrieve"|"caption"|"rubric",
//            "payload": {...}}
// Response: {"request_id": str, "status": "ok"|"error",
//            "body": {...}, "error_code": str, "error_message": str}
//
// Over stdio every message is framed as a 4-byte big-endian length followed
// by that many bytes of UTF-8 JSON. Over HTTP the same JSON is POSTed and
// returned as the response body.

enum class RequestKind { kTrack, kRetrieve, kCaption, kRubric };

std::string_view RequestKindName(RequestKind kind);
RequestKind ParseRequestKind(std::string_view name);

struct BackendRequest {
  RequestKind kind = RequestKind::kTrack;
  std::string request_id;
  Json payload;
};

struct BackendResponse {
  std::string request_id;
  bool ok = false;
  Json body;
  std::string error_code;
  std::string error_message;
};

// Error codes an adapter may put in "error_code".
inline constexpr std::string_view kWireChecksumMismatch = "checksum_mismatch";
inline constexpr std::string_view kWireBadRequest = "bad_request";
inline constexpr std::string_view kWireInference = "inference_failed";

Json RequestToJson(const BackendRequest& request);
// Throws Error(kProtocol) when the envelope or kind-specific payload schema
// does not validate.
BackendRequest RequestFromJson(const Json& j);
Json ResponseToJson(const BackendResponse& response);
BackendResponse ResponseFromJson(const Json& j);

// Compact JSON with sorted keys; the exact bytes that go on the wire.
std::string EncodeMessage(const Json& j);

// Kind-specific payload checks, shared by the core and adapters.
//   track:    {"video": str, "grid_size": int >= 1}
//   retrieve: {"video": str, "sentences_sha256": hex,
//              optional "start_frame"/"end_frame"}
//   caption:  {"task": "frame", "video": str, "frame_index": int}
//          |  {"task": "summarize", "frames": [{"position": int,
//                                               "caption": str}, ...]}
//   rubric:   {"video": str, "frame_indices": [int...], "rubric_sha256": hex,
//              "prompt": str}
void ValidateRequestPayload(RequestKind kind, const Json& payload);

// Checks an ok response body against the schema for the request's kind.
//   track:    visibility payload
//   retrieve: {"sentence_probs": [10 numbers], "sentences_sha256": hex}
//   caption / rubric: {"text": str}
void ValidateResponseBody(RequestKind kind, const Json& body);

// 4-byte big-endian length prefix + payload.
std::string FrameMessage(std::string_view payload);

// Incremental decoder for length-prefixed frames.
class FrameDecoder {
 public:
  static constexpr std::uint32_t kMaxFrameBytes = 256u << 20;

  void Append(std::string_view bytes);
  // Next complete frame, if any. Throws Error(kProtocol) on an oversized
  // length prefix.
  std::optional<std::string> Next();
  std::size_t buffered() const { return buffer_.size() - offset_; }

 private:
  std::string buffer_;
  std::size_t offset_ = 0;
};

using Deadline = std::chrono::milliseconds;
inline constexpr Deadline kDefaultDeadline{30000};

// A transport to one adapter endpoint. Implementations are safe to call from
// several threads; the number of simultaneously outstanding requests is
// capped per endpoint.
class Backend {
 public:
  virtual ~Backend() = default;

  // Sends the request and waits at most `deadline` for the matching
  // response. Throws Error(kTimeout) when the deadline passes,
  // Error(kProtocol) on framing or correlation failures, Error(kBackend)
  // when the transport itself fails.
  virtual BackendResponse Send(const BackendRequest& request,
                               Deadline deadline) = 0;

  std::string NextRequestId();

 private:
  std::atomic<std::uint64_t> next_id_{1};
};

// Validates the request, sends it, and checks the response. An "error"
// status is mapped to Error(kChecksumMismatch) for checksum_mismatch and
// Error(kBackend) otherwise; a request_id mismatch or schema violation in an
// ok body raises Error(kProtocol).
BackendResponse Roundtrip(Backend& backend, const BackendRequest& request,
                          Deadline deadline = kDefaultDeadline);

// Adapter launched as a subprocess speaking framed JSON over stdin/stdout.
class StdioBackend : public Backend {
 public:
  StdioBackend(std::vector<std::string> argv, int max_in_flight = 4);
  ~StdioBackend() override;

  StdioBackend(const StdioBackend&) = delete;
  StdioBackend& operator=(const StdioBackend&) = delete;

  BackendResponse Send(const BackendRequest& request,
                       Deadline deadline) override;

  // Raw exchange of one already-encoded message; returns the exact response
  // bytes. Used for transcript replay.
  std::string SendRaw(std::string_view request_bytes,
                      std::string_view request_id, Deadline deadline);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// Adapter reached over HTTP: POST <url> with the request JSON.
class HttpBackend : public Backend {
 public:
  // url: http://host[:port][/path]; path defaults to "/v1/infer".
  explicit HttpBackend(std::string url, std::string bearer_token = {},
                       int max_in_flight = 4);
  ~HttpBackend() override;

  BackendResponse Send(const BackendRequest& request,
                       Deadline deadline) override;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// "stdio:<command> [args...]" (whitespace-split) or "http://...".
std::unique_ptr<Backend> ConnectBackend(std::string_view endpoint,
                                        std::string bearer_token = {},
                                        int max_in_flight = 4);

// Typed calls built on Roundtrip.
VisibilityMatrix TrackVideo(Backend& backend, const std::string& video,
                            int grid_size, Deadline deadline = kDefaultDeadline);

struct FrameRange {
  std::size_t start = 0;
  std::size_t end = 0;
};

RetrievalProfile RetrieveVideo(Backend& backend, const std::string& video,
                               std::optional<FrameRange> range = std::nullopt,
                               Deadline deadline = kDefaultDeadline);

std::string CaptionFrame(Backend& backend, const std::string& video,
                         std::size_t frame_index,
                         Deadline deadline = kDefaultDeadline);

struct PositionedCaption {
  std::size_t position = 0;
  std::string caption;
};

std::string SummarizeCaptions(Backend& backend,
                              const std::vector<PositionedCaption>& captions,
                              Deadline deadline = kDefaultDeadline);

std::string RubricReply(Backend& backend, const std::string& video,
                        const std::vector<std::size_t>& frame_indices,
                        Deadline deadline = kDefaultDeadline);

}  // namespace tlm

#endif  // TLM_PROTOCOL_H_
