#ifndef TLM_ERROR_H_
#define TLM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlm {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kGridMismatch,
  kParse,
  kDegenerate,
  kNotNormalized,
  kRubricViolation,
  kUnparseableReply,
  kEmptyCaption,
  kTimeout,
  kChecksumMismatch,
  kProtocol,
  kBackend,
  kIo,
  kDuplicate,
  kNotFound,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so
// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tlm

#endif  // TLM_ERROR_H_
