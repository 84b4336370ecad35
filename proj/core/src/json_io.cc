#include "tlm/json_io.h"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "tlm/error.h"

namespace tlm {
namespace {

const Json& Require(const Json& obj, const char* key, const char* what) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kParse,
                std::string(what) + ": missing key \"" + key + "\"");
  }
  return *it;
}

std::size_t RequireCount(const Json& obj, const char* key, const char* what) {
  const Json& v = Require(obj, key, what);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::kParse, std::string(what) + ": \"" + key +
                                       "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string RequireString(const Json& obj, const char* key, const char* what) {
  const Json& v = Require(obj, key, what);
  if (!v.is_string()) {
    throw Error(ErrorCode::kParse,
                std::string(what) + ": \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::optional<double> OptionalNumber(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw Error(ErrorCode::kParse,
                std::string("record: \"") + key + "\" must be a number");
  }
  return it->get<double>();
}

Json OptionalToJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

VisibilityMatrix ValidateVisibility(const Json& payload) {
  constexpr const char* kWhat = "visibility payload";
  if (!payload.is_object()) {
    throw Error(ErrorCode::kParse, "visibility payload must be an object");
  }
  const std::size_t frames = RequireCount(payload, "frames", kWhat);
  const std::size_t points = RequireCount(payload, "points", kWhat);
  if (frames == 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension mismatch: empty frames");
  }

  std::optional<int> grid_size;
  if (auto it = payload.find("grid_size");
      it != payload.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      throw Error(ErrorCode::kParse, "grid_size must be an integer or null");
    }
    grid_size = it->get<int>();
  }

  const Json& rows = Require(payload, "vis", kWhat);
  if (!rows.is_array()) {
    throw Error(ErrorCode::kParse, "\"vis\" must be an array of rows");
  }
  if (rows.size() != frames) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension mismatch: frames=" + std::to_string(frames) +
                    " but " + std::to_string(rows.size()) + " rows present");
  }

  std::vector<std::uint8_t> flags;
  flags.reserve(frames * points);
  for (std::size_t f = 0; f < frames; ++f) {
    const Json& row = rows[f];
    if (!row.is_array()) {
      throw Error(ErrorCode::kParse, "visibility row must be an array");
    }
    if (row.size() != points) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "dimension mismatch: row " + std::to_string(f) + " has " +
                      std::to_string(row.size()) + " entries, expected " +
                      std::to_string(points));
    }
    for (const Json& cell : row) {
      if (!cell.is_boolean()) {
        throw Error(ErrorCode::kParse,
                    "non-boolean visibility entry in row " + std::to_string(f));
      }
      flags.push_back(cell.get<bool>() ? 1 : 0);
    }
  }
  return VisibilityMatrix::Create(frames, points, grid_size, std::move(flags));
}

VisibilityMatrix ValidateVisibility(std::string_view bytes) {
  return ValidateVisibility(ParseJson(bytes));
}

Json VisibilityToJson(const VisibilityMatrix& vis) {
  Json rows = Json::array();
  for (std::size_t f = 0; f < vis.frames(); ++f) {
    Json row = Json::array();
    for (auto flag : vis.row(f)) row.push_back(flag != 0);
    rows.push_back(std::move(row));
  }
  Json j;
  j["frames"] = vis.frames();
  j["points"] = vis.points();
  j["grid_size"] = vis.grid_size() ? Json(*vis.grid_size()) : Json(nullptr);
  j["vis"] = std::move(rows);
  return j;
}

std::string SerializeVisibility(const VisibilityMatrix& vis) {
  return VisibilityToJson(vis).dump();
}

RetrievalProfile ValidateRetrievalPayload(const Json& payload) {
  if (!payload.is_object()) {
    throw Error(ErrorCode::kParse, "retrieval payload must be an object");
  }
  const Json& probs = Require(payload, "sentence_probs", "retrieval payload");
  if (!probs.is_array()) {
    throw Error(ErrorCode::kParse, "\"sentence_probs\" must be an array");
  }
  std::vector<double> values;
  for (const Json& p : probs) {
    if (!p.is_number()) {
      throw Error(ErrorCode::kParse, "sentence probabilities must be numbers");
    }
    values.push_back(p.get<double>());
  }
  return RetrievalProfile::FromSentenceProbs(values);
}

Json RetrievalToJson(const RetrievalProfile& profile) {
  Json probs = Json::array();
  for (double p : profile.gen_probs()) probs.push_back(p);
  for (double p : profile.meta_probs()) probs.push_back(p);
  return Json{{"sentence_probs", probs}};
}

BenchmarkEntry EntryFromJson(const Json& j) {
  constexpr const char* kWhat = "benchmark entry";
  if (!j.is_object()) {
    throw Error(ErrorCode::kParse, "benchmark entry must be an object");
  }
  BenchmarkEntry e;
  e.prompt_id = RequireString(j, "prompt_id", kWhat);
  e.prompt = RequireString(j, "prompt", kWhat);
  e.reference_video = RequireString(j, "reference_video", kWhat);
  e.sub_category = RequireString(j, "sub_category", kWhat);
  e.major_category =
      ParseMajorCategory(RequireString(j, "major_category", kWhat));
  ValidateEntry(e);
  return e;
}

Json EntryToJson(const BenchmarkEntry& entry) {
  return Json{{"prompt_id", entry.prompt_id},
              {"prompt", entry.prompt},
              {"reference_video", entry.reference_video},
              {"sub_category", entry.sub_category},
              {"major_category", MajorCategoryName(entry.major_category)}};
}

EvaluationRecord RecordFromJson(const Json& j) {
  constexpr const char* kWhat = "record";
  if (!j.is_object()) throw Error(ErrorCode::kParse, "record must be an object");
  EvaluationRecord r;
  r.model_id = RequireString(j, "model_id", kWhat);
  r.prompt_id = RequireString(j, "prompt_id", kWhat);
  const Json& seed = Require(j, "seed_index", kWhat);
  if (!seed.is_number_integer()) {
    throw Error(ErrorCode::kParse, "record: seed_index must be an integer");
  }
  r.seed_index = seed.get<int>();
  r.chscore = OptionalNumber(j, "chscore");
  r.mtscore = OptionalNumber(j, "mtscore");
  r.gpt4o_mtscore = OptionalNumber(j, "gpt4o_mtscore");
  if (auto it = j.find("external"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw Error(ErrorCode::kParse, "record: external must be an object");
    }
    for (const auto& [name, value] : it->items()) {
      if (!value.is_number()) {
        throw Error(ErrorCode::kParse,
                    "record: external value \"" + name + "\" must be a number");
      }
      r.external[name] = value.get<double>();
    }
  }
  ValidateRecord(r);
  return r;
}

Json RecordToJson(const EvaluationRecord& record) {
  Json ext = Json::object();
  for (const auto& [name, value] : record.external) ext[name] = value;
  return Json{{"model_id", record.model_id},
              {"prompt_id", record.prompt_id},
              {"seed_index", record.seed_index},
              {"chscore", OptionalToJson(record.chscore)},
              {"mtscore", OptionalToJson(record.mtscore)},
              {"gpt4o_mtscore", OptionalToJson(record.gpt4o_mtscore)},
              {"external", ext}};
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path);
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace tlm
