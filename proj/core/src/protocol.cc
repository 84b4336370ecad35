#include "tlm/protocol.h"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>
#include <semaphore>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "tlm/canonical.h"
#include "tlm/error.h"

extern char** environ;

namespace tlm {
namespace {

constexpr std::ptrdiff_t kMaxInFlightCap = 256;

[[noreturn]] void ProtocolError(const std::string& message) {
  throw Error(ErrorCode::kProtocol, "protocol error: " + message);
}

const Json& Field(const Json& obj, const char* key, const char* what) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    ProtocolError(std::string(what) + " missing \"" + key + "\"");
  }
  return *it;
}

const std::string& StringField(const Json& obj, const char* key,
                               const char* what) {
  const Json& v = Field(obj, key, what);
  if (!v.is_string()) {
    ProtocolError(std::string(what) + " \"" + key + "\" must be a string");
  }
  return v.get_ref<const std::string&>();
}

long long IntField(const Json& obj, const char* key, const char* what,
                   long long min_value) {
  const Json& v = Field(obj, key, what);
  if (!v.is_number_integer() || v.get<long long>() < min_value) {
    ProtocolError(std::string(what) + " \"" + key + "\" must be an integer >= " +
                  std::to_string(min_value));
  }
  return v.get<long long>();
}

void CheckSha256Hex(const std::string& hex, const char* what) {
  bool ok = hex.size() == 64;
  for (char c : hex) {
    ok = ok && ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'));
  }
  if (!ok) ProtocolError(std::string(what) + " is not a sha256 hex digest");
}

int ClampInFlight(int max_in_flight) {
  if (max_in_flight < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  }
  return static_cast<int>(
      std::min<std::ptrdiff_t>(max_in_flight, kMaxInFlightCap));
}

// Releases a semaphore slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<kMaxInFlightCap>& sem)
      : sem_(sem) {}
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<kMaxInFlightCap>& sem_;
};

}  // namespace

std::string_view RequestKindName(RequestKind kind) {
  switch (kind) {
    case RequestKind::kTrack: return "track";
    case RequestKind::kRetrieve: return "retrieve";
    case RequestKind::kCaption: return "caption";
    case RequestKind::kRubric: return "rubric";
  }
  return "";
}

RequestKind ParseRequestKind(std::string_view name) {
  for (auto k : {RequestKind::kTrack, RequestKind::kRetrieve,
                 RequestKind::kCaption, RequestKind::kRubric}) {
    if (RequestKindName(k) == name) return k;
  }
  ProtocolError("unknown request kind \"" + std::string(name) + "\"");
}

void ValidateRequestPayload(RequestKind kind, const Json& payload) {
  if (!payload.is_object()) ProtocolError("payload must be an object");
  switch (kind) {
    case RequestKind::kTrack:
      StringField(payload, "video", "track payload");
      IntField(payload, "grid_size", "track payload", 1);
      return;
    case RequestKind::kRetrieve: {
      StringField(payload, "video", "retrieve payload");
      CheckSha256Hex(StringField(payload, "sentences_sha256", "retrieve payload"),
                     "sentences_sha256");
      const bool has_start = payload.contains("start_frame");
      const bool has_end = payload.contains("end_frame");
      if (has_start != has_end) {
        ProtocolError("retrieve payload needs both start_frame and end_frame");
      }
      if (has_start) {
        const auto start = IntField(payload, "start_frame", "retrieve payload", 0);
        const auto end = IntField(payload, "end_frame", "retrieve payload", 1);
        if (end <= start) ProtocolError("retrieve payload has an empty range");
      }
      return;
    }
    case RequestKind::kCaption: {
      const std::string& task = StringField(payload, "task", "caption payload");
      if (task == "frame") {
        StringField(payload, "video", "caption payload");
        IntField(payload, "frame_index", "caption payload", 0);
      } else if (task == "summarize") {
        const Json& frames = Field(payload, "frames", "caption payload");
        if (!frames.is_array() || frames.empty()) {
          ProtocolError("summarize payload needs a nonempty \"frames\" array");
        }
        for (const Json& f : frames) {
          if (!f.is_object()) ProtocolError("summarize frame must be an object");
          IntField(f, "position", "summarize frame", 0);
          StringField(f, "caption", "summarize frame");
        }
      } else {
        ProtocolError("caption task must be \"frame\" or \"summarize\"");
      }
      return;
    }
    case RequestKind::kRubric: {
      StringField(payload, "video", "rubric payload");
      CheckSha256Hex(StringField(payload, "rubric_sha256", "rubric payload"),
                     "rubric_sha256");
      StringField(payload, "prompt", "rubric payload");
      const Json& idx = Field(payload, "frame_indices", "rubric payload");
      if (!idx.is_array() || idx.empty()) {
        ProtocolError("rubric payload needs a nonempty \"frame_indices\" array");
      }
      for (const Json& i : idx) {
        if (!i.is_number_integer() || i.get<long long>() < 0) {
          ProtocolError("frame_indices must be non-negative integers");
        }
      }
      return;
    }
  }
}

void ValidateResponseBody(RequestKind kind, const Json& body) {
  if (!body.is_object()) ProtocolError("response body must be an object");
  try {
    switch (kind) {
      case RequestKind::kTrack:
        ValidateVisibility(body);
        return;
      case RequestKind::kRetrieve:
        ValidateRetrievalPayload(body);
        CheckSha256Hex(StringField(body, "sentences_sha256", "retrieve body"),
                       "sentences_sha256");
        return;
      case RequestKind::kCaption:
      case RequestKind::kRubric:
        StringField(body, "text", "text body");
        return;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kProtocol) throw;
    ProtocolError(std::string("schema violation in ") +
                  std::string(RequestKindName(kind)) + " body: " + e.what());
  }
}

Json RequestToJson(const BackendRequest& request) {
  return Json{{"request_id", request.request_id},
              {"kind", RequestKindName(request.kind)},
              {"payload", request.payload}};
}

BackendRequest RequestFromJson(const Json& j) {
  if (!j.is_object()) ProtocolError("request must be an object");
  BackendRequest r;
  r.request_id = StringField(j, "request_id", "request");
  if (r.request_id.empty()) ProtocolError("request_id is empty");
  r.kind = ParseRequestKind(StringField(j, "kind", "request"));
  r.payload = Field(j, "payload", "request");
  ValidateRequestPayload(r.kind, r.payload);
  return r;
}

Json ResponseToJson(const BackendResponse& response) {
  Json j{{"request_id", response.request_id},
         {"status", response.ok ? "ok" : "error"}};
  if (response.ok) {
    j["body"] = response.body;
  } else {
    j["error_code"] = response.error_code;
    j["error_message"] = response.error_message;
  }
  return j;
}

BackendResponse ResponseFromJson(const Json& j) {
  if (!j.is_object()) ProtocolError("response must be an object");
  BackendResponse r;
  r.request_id = StringField(j, "request_id", "response");
  const std::string& status = StringField(j, "status", "response");
  if (status == "ok") {
    r.ok = true;
    r.body = Field(j, "body", "response");
  } else if (status == "error") {
    r.ok = false;
    if (auto it = j.find("error_code"); it != j.end() && it->is_string()) {
      r.error_code = it->get<std::string>();
    }
    if (auto it = j.find("error_message"); it != j.end() && it->is_string()) {
      r.error_message = it->get<std::string>();
    }
  } else {
    ProtocolError("status must be \"ok\" or \"error\"");
  }
  return r;
}

std::string EncodeMessage(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::string FrameMessage(std::string_view payload) {
  if (payload.size() > FrameDecoder::kMaxFrameBytes) {
    ProtocolError("message exceeds frame size limit");
  }
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

void FrameDecoder::Append(std::string_view bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.append(bytes);
}

std::optional<std::string> FrameDecoder::Next() {
  if (buffered() < 4) return std::nullopt;
  const auto* p =
      reinterpret_cast<const unsigned char*>(buffer_.data() + offset_);
  const std::uint32_t n = (std::uint32_t{p[0]} << 24) |
                          (std::uint32_t{p[1]} << 16) |
                          (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  if (n > kMaxFrameBytes) ProtocolError("frame length exceeds limit");
  if (buffered() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  std::string frame = buffer_.substr(offset_ + 4, n);
  offset_ += 4 + n;
  if (offset_ > (1u << 20) && offset_ * 2 > buffer_.size()) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  return frame;
}

std::string Backend::NextRequestId() {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "req-%06llu",
                static_cast<unsigned long long>(next_id_.fetch_add(1)));
  return buf;
}

BackendResponse Roundtrip(Backend& backend, const BackendRequest& request,
                          Deadline deadline) {
  if (request.request_id.empty()) ProtocolError("request_id is empty");
  ValidateRequestPayload(request.kind, request.payload);
  BackendResponse response = backend.Send(request, deadline);
  if (response.request_id != request.request_id) {
    ProtocolError("response request_id \"" + response.request_id +
                  "\" does not match \"" + request.request_id + "\"");
  }
  if (!response.ok) {
    if (response.error_code == kWireChecksumMismatch) {
      throw Error(ErrorCode::kChecksumMismatch,
                  "checksum mismatch: " + response.error_message);
    }
    if (response.error_code == kWireBadRequest) {
      ProtocolError("adapter rejected request: " + response.error_message);
    }
    throw Error(ErrorCode::kBackend,
                "backend error (" + response.error_code +
                    "): " + response.error_message);
  }
  ValidateResponseBody(request.kind, response.body);
  return response;
}

// ---------------------------------------------------------------------------
// StdioBackend

struct StdioBackend::State {
  struct Slot {
    std::optional<std::string> response;
    std::optional<Error> error;
  };

  explicit State(int max_in_flight) : slots(max_in_flight) {}

  pid_t pid = -1;
  int fd = -1;
  std::thread reader;

  std::counting_semaphore<kMaxInFlightCap> slots;
  std::mutex write_mu;

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, Slot> pending;
  std::set<std::string> expired;
  std::optional<Error> fatal;

  void FailAll(const Error& error) {
    for (auto& [id, slot] : pending) {
      if (!slot.response && !slot.error) slot.error = error;
    }
  }

  void Dispatch(std::string frame) {
    std::string id;
    try {
      const Json j = Json::parse(frame);
      if (j.is_object()) {
        if (auto it = j.find("request_id"); it != j.end() && it->is_string()) {
          id = it->get<std::string>();
        }
      }
    } catch (const Json::parse_error&) {
    }
    std::lock_guard lock(mu);
    if (auto it = pending.find(id);
        !id.empty() && it != pending.end() && !it->second.response) {
      it->second.response = std::move(frame);
    } else if (expired.erase(id) == 0) {
      FailAll(Error(ErrorCode::kProtocol,
                    "protocol error: response request_id \"" + id +
                        "\" matches no pending request"));
    }
    cv.notify_all();
  }

  void ReadLoop() {
    FrameDecoder decoder;
    char buf[65536];
    for (;;) {
      const ssize_t n = ::read(fd, buf, sizeof(buf));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      decoder.Append(std::string_view(buf, static_cast<std::size_t>(n)));
      try {
        while (auto frame = decoder.Next()) Dispatch(std::move(*frame));
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        fatal = e;
        FailAll(e);
        cv.notify_all();
        return;
      }
    }
    std::lock_guard lock(mu);
    Error e(ErrorCode::kBackend, "adapter process closed its output");
    if (!fatal) fatal = e;
    FailAll(e);
    cv.notify_all();
  }
};

StdioBackend::StdioBackend(std::vector<std::string> argv, int max_in_flight)
    : state_(std::make_unique<State>(ClampInFlight(max_in_flight))) {
  if (argv.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "adapter command is empty");
  }
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(ErrorCode::kBackend,
                std::string("socketpair failed: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (auto& a : argv) args.push_back(a.data());
  args.push_back(nullptr);

  pid_t pid = -1;
  const int rc =
      ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw Error(ErrorCode::kBackend, "cannot launch adapter \"" + argv[0] +
                                         "\": " + std::strerror(rc));
  }
  state_->pid = pid;
  state_->fd = fds[0];
  state_->reader = std::thread([s = state_.get()] { s->ReadLoop(); });
}

StdioBackend::~StdioBackend() {
  if (!state_) return;
  ::shutdown(state_->fd, SHUT_WR);
  int status = 0;
  bool exited = false;
  for (int i = 0; i < 200 && !exited; ++i) {
    exited = ::waitpid(state_->pid, &status, WNOHANG) == state_->pid;
    if (!exited) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (!exited) {
    ::kill(state_->pid, SIGKILL);
    ::waitpid(state_->pid, &status, 0);
  }
  ::shutdown(state_->fd, SHUT_RDWR);
  if (state_->reader.joinable()) state_->reader.join();
  ::close(state_->fd);
}

std::string StdioBackend::SendRaw(std::string_view request_bytes,
                                  std::string_view request_id,
                                  Deadline deadline) {
  State& s = *state_;
  const auto until = std::chrono::steady_clock::now() + deadline;
  if (!s.slots.try_acquire_until(until)) {
    throw Error(ErrorCode::kTimeout,
                "timeout waiting for an in-flight slot for " +
                    std::string(request_id));
  }
  SlotGuard guard(s.slots);
  const std::string id(request_id);
  {
    std::lock_guard lock(s.mu);
    if (s.fatal) throw *s.fatal;
    if (!s.pending.emplace(id, State::Slot{}).second) {
      ProtocolError("duplicate in-flight request_id \"" + id + "\"");
    }
  }

  const std::string framed = FrameMessage(request_bytes);
  {
    std::lock_guard lock(s.write_mu);
    std::size_t sent = 0;
    while (sent < framed.size()) {
      const ssize_t n = ::send(s.fd, framed.data() + sent, framed.size() - sent,
                               MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        std::lock_guard state_lock(s.mu);
        s.pending.erase(id);
        throw Error(ErrorCode::kBackend,
                    std::string("write to adapter failed: ") +
                        std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::unique_lock lock(s.mu);
  auto& slot = s.pending.at(id);
  const bool done = s.cv.wait_until(
      lock, until, [&] { return slot.response || slot.error; });
  if (!done) {
    s.pending.erase(id);
    s.expired.insert(id);
    throw Error(ErrorCode::kTimeout,
                "timeout after " + std::to_string(deadline.count()) +
                    " ms waiting for " + id);
  }
  State::Slot result = std::move(slot);
  s.pending.erase(id);
  if (result.error) throw *result.error;
  return std::move(*result.response);
}

BackendResponse StdioBackend::Send(const BackendRequest& request,
                                   Deadline deadline) {
  const std::string bytes =
      SendRaw(EncodeMessage(RequestToJson(request)), request.request_id,
              deadline);
  try {
    return ResponseFromJson(Json::parse(bytes));
  } catch (const Json::parse_error& e) {
    ProtocolError(std::string("malformed response JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// HttpBackend

struct HttpBackend::State {
  explicit State(int max_in_flight) : slots(max_in_flight) {}

  std::string origin;
  std::string path;
  std::string bearer_token;
  std::counting_semaphore<kMaxInFlightCap> slots;
};

HttpBackend::HttpBackend(std::string url, std::string bearer_token,
                         int max_in_flight)
    : state_(std::make_unique<State>(ClampInFlight(max_in_flight))) {
  constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "only http:// endpoints are supported: " + url);
  }
  const auto slash = url.find('/', kScheme.size());
  state_->origin = url.substr(0, slash);
  state_->path = slash == std::string::npos ? "/v1/infer" : url.substr(slash);
  state_->bearer_token = std::move(bearer_token);
}

HttpBackend::~HttpBackend() = default;

BackendResponse HttpBackend::Send(const BackendRequest& request,
                                  Deadline deadline) {
  State& s = *state_;
  const auto until = std::chrono::steady_clock::now() + deadline;
  if (!s.slots.try_acquire_until(until)) {
    throw Error(ErrorCode::kTimeout, "timeout waiting for an in-flight slot");
  }
  SlotGuard guard(s.slots);

  httplib::Client client(s.origin);
  const auto remaining = std::max<std::chrono::microseconds>(
      std::chrono::duration_cast<std::chrono::microseconds>(
          until - std::chrono::steady_clock::now()),
      std::chrono::microseconds(1000));
  client.set_connection_timeout(remaining);
  client.set_read_timeout(remaining);
  client.set_write_timeout(remaining);
  httplib::Headers headers;
  if (!s.bearer_token.empty()) {
    headers.emplace("Authorization", "Bearer " + s.bearer_token);
  }
  auto res = client.Post(s.path, headers, EncodeMessage(RequestToJson(request)),
                         "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::kTimeout,
                  "timeout after " + std::to_string(deadline.count()) +
                      " ms waiting for " + request.request_id);
    }
    throw Error(ErrorCode::kBackend,
                "http request failed: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackend,
                "http status " + std::to_string(res->status));
  }
  try {
    return ResponseFromJson(Json::parse(res->body));
  } catch (const Json::parse_error& e) {
    ProtocolError(std::string("malformed response JSON: ") + e.what());
  }
}

std::unique_ptr<Backend> ConnectBackend(std::string_view endpoint,
                                        std::string bearer_token,
                                        int max_in_flight) {
  constexpr std::string_view kStdio = "stdio:";
  if (endpoint.rfind(kStdio, 0) == 0) {
    std::istringstream in{std::string(endpoint.substr(kStdio.size()))};
    std::vector<std::string> argv;
    for (std::string tok; in >> tok;) argv.push_back(tok);
    return std::make_unique<StdioBackend>(std::move(argv), max_in_flight);
  }
  if (endpoint.rfind("http://", 0) == 0) {
    return std::make_unique<HttpBackend>(std::string(endpoint),
                                         std::move(bearer_token),
                                         max_in_flight);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "endpoint must start with stdio: or http://, got \"" +
                  std::string(endpoint) + "\"");
}

// ---------------------------------------------------------------------------
// Typed calls

VisibilityMatrix TrackVideo(Backend& backend, const std::string& video,
                            int grid_size, Deadline deadline) {
  BackendRequest req{RequestKind::kTrack, backend.NextRequestId(),
                     Json{{"video", video}, {"grid_size", grid_size}}};
  BackendResponse res = Roundtrip(backend, req, deadline);
  VisibilityMatrix vis = ValidateVisibility(res.body);
  if (vis.grid_size() && *vis.grid_size() != grid_size) {
    ProtocolError("track response grid_size " +
                  std::to_string(*vis.grid_size()) + " != requested " +
                  std::to_string(grid_size));
  }
  return vis;
}

RetrievalProfile RetrieveVideo(Backend& backend, const std::string& video,
                               std::optional<FrameRange> range,
                               Deadline deadline) {
  Json payload{{"video", video}, {"sentences_sha256", SentencesChecksum()}};
  if (range) {
    payload["start_frame"] = range->start;
    payload["end_frame"] = range->end;
  }
  BackendRequest req{RequestKind::kRetrieve, backend.NextRequestId(),
                     std::move(payload)};
  BackendResponse res = Roundtrip(backend, req, deadline);
  const std::string& echoed = res.body.at("sentences_sha256").get_ref<const std::string&>();
  if (echoed != SentencesChecksum()) {
    throw Error(ErrorCode::kChecksumMismatch,
                "checksum mismatch: adapter scored sentences " + echoed +
                    ", expected " + SentencesChecksum());
  }
  return ValidateRetrievalPayload(res.body);
}

std::string CaptionFrame(Backend& backend, const std::string& video,
                         std::size_t frame_index, Deadline deadline) {
  BackendRequest req{
      RequestKind::kCaption, backend.NextRequestId(),
      Json{{"task", "frame"}, {"video", video}, {"frame_index", frame_index}}};
  return Roundtrip(backend, req, deadline).body.at("text").get<std::string>();
}

std::string SummarizeCaptions(Backend& backend,
                              const std::vector<PositionedCaption>& captions,
                              Deadline deadline) {
  Json frames = Json::array();
  for (const auto& c : captions) {
    frames.push_back(Json{{"position", c.position}, {"caption", c.caption}});
  }
  BackendRequest req{RequestKind::kCaption, backend.NextRequestId(),
                     Json{{"task", "summarize"}, {"frames", std::move(frames)}}};
  return Roundtrip(backend, req, deadline).body.at("text").get<std::string>();
}

std::string RubricReply(Backend& backend, const std::string& video,
                        const std::vector<std::size_t>& frame_indices,
                        Deadline deadline) {
  BackendRequest req{RequestKind::kRubric, backend.NextRequestId(),
                     Json{{"video", video},
                          {"frame_indices", frame_indices},
                          {"rubric_sha256", RubricChecksum()},
                          {"prompt", RubricPrompt()}}};
  return Roundtrip(backend, req, deadline).body.at("text").get<std::string>();
}

}  // namespace tlm
