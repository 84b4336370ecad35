#ifndef TLM_TOOLS_STUB_STUB_ADAPTER_H_
#define TLM_TOOLS_STUB_STUB_ADAPTER_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "tlm/json_io.h"
#include "tlm/protocol.h"

namespace tlm::stub {

// Deterministic stand-in for the model adapter. Every backend kind is
// answered from the decoded frames alone, so integration tests need no
// model weights:
//   track     a grid point is visible unless its pixel is saturated white
//             (channel mean >= 250)
//   retrieve  softmax over the ten sentences, tilted toward the time-lapse
//             half by the mean absolute frame difference
//   caption   "frame <k>" per frame; summaries list "[position] caption"
//   rubric    "Score: <n>" with n rising with motion, unless overridden
struct StubOptions {
  std::chrono::milliseconds delay{0};
  std::optional<std::string> rubric_reply;
  bool corrupt_request_id = false;
  bool drift_sentences = false;
  bool empty_captions = false;
};

// Handles one decoded request envelope and returns the response envelope.
// Never throws: malformed input becomes an error response.
Json HandleRequest(const Json& request, const StubOptions& options);

// Same, on raw message bytes (no length prefix).
std::string HandleMessage(std::string_view bytes, const StubOptions& options);

// In-process Backend backed by HandleRequest.
class StubBackend : public Backend {
 public:
  explicit StubBackend(StubOptions options = {}) : options_(std::move(options)) {}

  BackendResponse Send(const BackendRequest& request,
                       Deadline deadline) override;

 private:
  StubOptions options_;
};

}  // namespace tlm::stub

#endif  // TLM_TOOLS_STUB_STUB_ADAPTER_H_
