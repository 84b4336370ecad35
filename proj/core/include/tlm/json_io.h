#ifndef TLM_JSON_IO_H_
#define TLM_JSON_IO_H_

#include <string>
#include <string_view>

#include <json.hpp>

#include "tlm/types.h"

namespace tlm {

using Json = nlohmann::json;

// Parses text into JSON, mapping syntax errors to Error(kParse).
Json ParseJson(std::string_view text);

// Visibility payload:
//   {"frames": F, "points": N, "grid_size": G|null, "vis": [[bool,...],...]}
VisibilityMatrix ValidateVisibility(const Json& payload);
VisibilityMatrix ValidateVisibility(std::string_view bytes);
inline VisibilityMatrix ValidateVisibility(const std::string& bytes) {
  return ValidateVisibility(std::string_view(bytes));
}
Json VisibilityToJson(const VisibilityMatrix& vis);
// Canonical serialization: compact, keys sorted.
std::string SerializeVisibility(const VisibilityMatrix& vis);

// Retrieval payload: {"sentence_probs": [p1..p10]} in canonical sentence order.
RetrievalProfile ValidateRetrievalPayload(const Json& payload);
Json RetrievalToJson(const RetrievalProfile& profile);

BenchmarkEntry EntryFromJson(const Json& j);
Json EntryToJson(const BenchmarkEntry& entry);

EvaluationRecord RecordFromJson(const Json& j);
Json RecordToJson(const EvaluationRecord& record);

// Reads a whole file; throws Error(kIo).
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace tlm

#endif  // TLM_JSON_IO_H_
