#include "tlm/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "tlm/canonical.h"
#include "tlm/error.h"
#include "tlm/frames.h"
#include "tlm/stats.h"

namespace tlm {
namespace fs = std::filesystem;

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> SplitCsvRow(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> ParseNumber(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Benchmark manifest

std::vector<BenchmarkEntry> ParseBenchmark(std::string_view jsonl) {
  std::vector<BenchmarkEntry> entries;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(jsonl)) {
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    BenchmarkEntry e;
    try {
      e = EntryFromJson(ParseJson(line));
    } catch (const Error& err) {
      throw Error(err.code(),
                  "line " + std::to_string(line_no) + ": " + err.what());
    }
    if (!seen.insert(e.prompt_id).second) {
      throw Error(ErrorCode::kDuplicate, "line " + std::to_string(line_no) +
                                             ": duplicate prompt_id " +
                                             e.prompt_id);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<BenchmarkEntry> LoadBenchmark(const std::string& path) {
  return ParseBenchmark(ReadFile(path));
}

std::string BenchmarkToJsonl(std::span<const BenchmarkEntry> entries) {
  std::string out;
  for (const auto& e : entries) {
    out += EncodeMessage(EntryToJson(e));
    out.push_back('\n');
  }
  return out;
}

std::vector<std::string> ParseSelection(std::string_view text) {
  std::vector<std::string> ids;
  for (std::string_view line : SplitLines(text)) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (!line.empty()) ids.emplace_back(line);
  }
  return ids;
}

std::vector<BenchmarkEntry> SubsetBench150(
    std::span<const BenchmarkEntry> entries,
    std::span<const std::string> selection) {
  if (selection.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "selection is empty");
  }
  std::map<std::string, const BenchmarkEntry*> by_id;
  std::map<std::string, std::size_t> per_sub;
  for (const auto& e : entries) {
    by_id[e.prompt_id] = &e;
    per_sub.emplace(e.sub_category, 0);
  }
  std::set<std::string> chosen;
  for (const auto& id : selection) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kNotFound,
                  "selected prompt_id " + id + " is not in the manifest");
    }
    if (!chosen.insert(id).second) {
      throw Error(ErrorCode::kInvalidArgument, "prompt_id " + id +
                                                   " selected twice");
    }
    ++per_sub[it->second->sub_category];
  }
  for (const auto& [sub, count] : per_sub) {
    if (count != kHardPromptsPerSubCategory) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sub-category \"" + sub + "\" has " + std::to_string(count) +
                      " selected prompts, expected " +
                      std::to_string(kHardPromptsPerSubCategory));
    }
  }
  std::vector<BenchmarkEntry> subset;
  for (const auto& e : entries) {
    if (chosen.count(e.prompt_id)) subset.push_back(e);
  }
  return subset;
}

// ---------------------------------------------------------------------------
// Run manifests

namespace {

// seed_<k> or seed_<k>.<ext>
std::optional<int> SeedFromName(const std::string& name) {
  constexpr std::string_view kPrefix = "seed_";
  if (name.rfind(kPrefix, 0) != 0) return std::nullopt;
  const auto dot = name.find('.', kPrefix.size());
  const std::string digits = name.substr(kPrefix.size(), dot - kPrefix.size());
  if (digits.empty() || digits.size() > 2 ||
      !std::all_of(digits.begin(), digits.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  return std::stoi(digits);
}

}  // namespace

RunManifest DiscoverRun(const std::string& run_root, std::string model_id,
                        std::span<const BenchmarkEntry> bench) {
  std::error_code ec;
  if (!fs::is_directory(run_root, ec)) {
    throw Error(ErrorCode::kIo, "run root is not a directory: " + run_root);
  }
  RunManifest run;
  run.model_id = std::move(model_id);
  for (const auto& e : bench) {
    const fs::path dir = fs::path(run_root) / e.prompt_id;
    if (!fs::is_directory(dir, ec)) continue;
    std::map<int, std::string> seeds;
    for (const auto& ent : fs::directory_iterator(dir, ec)) {
      const auto seed = SeedFromName(ent.path().filename().string());
      if (!seed) continue;
      if (!seeds.emplace(*seed, ent.path().string()).second) {
        throw Error(ErrorCode::kDuplicate,
                    "two videos for seed " + std::to_string(*seed) + " in " +
                        dir.string());
      }
    }
    if (seeds.empty()) continue;
    auto& videos = run.videos[e.prompt_id];
    for (int k = 0; k < kSeedsPerPrompt; ++k) {
      auto it = seeds.find(k);
      if (it == seeds.end()) break;
      videos.push_back(it->second);
    }
    if (videos.size() != seeds.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "seeds in " + dir.string() +
                      " must be contiguous from seed_0 and at most " +
                      std::to_string(kSeedsPerPrompt));
    }
  }
  return run;
}

RunManifest LoadRunManifest(const std::string& path) {
  const Json j = ParseJson(ReadFile(path));
  if (!j.is_object() || !j.contains("model_id") || !j["model_id"].is_string() ||
      !j.contains("videos") || !j["videos"].is_object()) {
    throw Error(ErrorCode::kParse,
                "run manifest needs \"model_id\" and a \"videos\" object");
  }
  const fs::path base = fs::path(path).parent_path();
  RunManifest run;
  run.model_id = j["model_id"].get<std::string>();
  for (const auto& [prompt_id, list] : j["videos"].items()) {
    if (!list.is_array()) {
      throw Error(ErrorCode::kParse, "videos of " + prompt_id + " must be a list");
    }
    auto& videos = run.videos[prompt_id];
    for (const Json& v : list) {
      if (!v.is_string()) {
        throw Error(ErrorCode::kParse, "video paths must be strings");
      }
      fs::path p(v.get<std::string>());
      videos.push_back(p.is_absolute() ? p.string() : (base / p).string());
    }
  }
  return run;
}

void ValidateRunManifest(const RunManifest& run,
                         std::span<const BenchmarkEntry> bench) {
  if (run.model_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "run manifest has no model_id");
  }
  std::set<std::string> known;
  for (const auto& e : bench) known.insert(e.prompt_id);
  for (const auto& [prompt_id, videos] : run.videos) {
    if (!known.count(prompt_id)) {
      throw Error(ErrorCode::kNotFound,
                  "run manifest prompt_id " + prompt_id +
                      " is not in the benchmark");
    }
    if (videos.empty() || videos.size() > kSeedsPerPrompt) {
      throw Error(ErrorCode::kInvalidArgument,
                  prompt_id + " needs 1-" + std::to_string(kSeedsPerPrompt) +
                      " videos, has " + std::to_string(videos.size()));
    }
  }
}

void ParseMetricList(std::string_view list, EvaluationConfig& config) {
  config.chscore = config.mtscore = config.gptscore = false;
  std::size_t start = 0;
  bool any = false;
  for (;;) {
    const auto comma = list.find(',', start);
    const std::string_view name = Trim(list.substr(start, comma - start));
    if (name == "chscore") {
      config.chscore = true;
    } else if (name == "mtscore") {
      config.mtscore = true;
    } else if (name == "gptscore") {
      config.gptscore = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown metric \"" + std::string(name) + "\"");
    }
    any = true;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (!any) throw Error(ErrorCode::kInvalidArgument, "no metrics selected");
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Job {
  std::string prompt_id;
  int seed_index = 0;
  std::string video;
};

struct JobResult {
  std::optional<EvaluationRecord> record;
  std::vector<EvaluationFailure> failures;
};

bool HasFrameHeader(const std::string& path) {
  std::error_code ec;
  return fs::is_directory(path, ec) || fs::path(path).extension() == ".tlf";
}

JobResult EvaluateVideo(const Job& job, const std::string& model_id,
                        const EvaluationConfig& config, Backend& backend) {
  JobResult out;
  auto fail = [&](std::string metric, std::string message) {
    out.failures.push_back(
        {job.prompt_id, job.seed_index, job.video, std::move(metric),
         std::move(message)});
  };

  std::error_code ec;
  if (!fs::exists(job.video, ec)) {
    fail("read", "video not found");
    return out;
  }
  std::optional<std::size_t> frame_count;
  if (HasFrameHeader(job.video)) {
    try {
      frame_count = ReadFrameHeader(job.video).frame_count;
    } catch (const Error& e) {
      fail("read", e.what());
      return out;
    }
  }

  EvaluationRecord rec;
  rec.model_id = model_id;
  rec.prompt_id = job.prompt_id;
  rec.seed_index = job.seed_index;
  bool any = false;

  if (config.chscore) {
    try {
      const auto vis =
          TrackVideo(backend, job.video, config.grid_size, config.deadline);
      rec.chscore = CHScoreFromVisibility(vis, config.chscore_config).score;
      any = true;
    } catch (const Error& e) {
      fail("chscore", e.what());
    }
  }
  if (config.mtscore) {
    try {
      rec.mtscore = MTScoreCoarse(
          RetrieveVideo(backend, job.video, std::nullopt, config.deadline));
      any = true;
    } catch (const Error& e) {
      fail("mtscore", e.what());
    }
  }
  if (config.gptscore) {
    if (!frame_count) {
      fail("gptscore", "frame count unavailable; decode to a .tlf file or an "
                       "image directory first");
    } else {
      try {
        rec.gpt4o_mtscore = static_cast<double>(
            GptMtScore(backend, job.video, *frame_count, config.gpt_config));
        any = true;
      } catch (const Error& e) {
        fail("gptscore", e.what());
      }
    }
  }
  if (any) out.record = std::move(rec);
  return out;
}

Json ConfigToJson(const EvaluationConfig& config) {
  Json metrics = Json::array();
  if (config.chscore) metrics.push_back("chscore");
  if (config.mtscore) metrics.push_back("mtscore");
  if (config.gptscore) metrics.push_back("gptscore");
  return Json{
      {"metrics", metrics},
      {"chscore",
       {{"threshold", config.chscore_config.threshold},
        {"epsilon", config.chscore_config.epsilon},
        {"clamp_negative_max", config.chscore_config.clamp_negative_max},
        {"grid_size", config.grid_size}}},
      {"gptscore",
       {{"sample_count", config.gpt_config.sample_count},
        {"max_retries", config.gpt_config.max_retries},
        {"rubric_sha256", RubricChecksum()}}},
      {"mtscore", {{"sentences_sha256", SentencesChecksum()}}},
  };
}

}  // namespace

RunReport EvaluateRun(const RunManifest& run,
                      std::span<const BenchmarkEntry> bench,
                      const EvaluationConfig& config, Backend& backend) {
  if (run.videos.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "run manifest is empty");
  }
  if (!config.chscore && !config.mtscore && !config.gptscore) {
    throw Error(ErrorCode::kInvalidArgument, "no metrics enabled");
  }
  if (config.workers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "workers must be >= 1");
  }
  ValidateRunManifest(run, bench);
  config.chscore_config.Validate();
  config.gpt_config.Validate();

  std::vector<Job> jobs;
  for (const auto& e : bench) {
    auto it = run.videos.find(e.prompt_id);
    if (it == run.videos.end()) continue;
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      jobs.push_back({e.prompt_id, static_cast<int>(k), it->second[k]});
    }
  }

  std::vector<JobResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = EvaluateVideo(jobs[i], run.model_id, config, backend);
    }
  };
  {
    const auto workers =
        std::min<std::size_t>(static_cast<std::size_t>(config.workers), jobs.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  RunReport report;
  report.model_id = run.model_id;
  report.config = ConfigToJson(config);
  for (auto& r : results) {
    if (r.record) report.records.push_back(std::move(*r.record));
    for (auto& f : r.failures) report.failures.push_back(std::move(f));
  }
  if (report.records.empty()) {
    throw Error(ErrorCode::kBackend,
                "no evaluable videos: all " + std::to_string(jobs.size()) +
                    " videos failed");
  }
  return report;
}

Json ReportToJson(const RunReport& report, std::string_view generated_at) {
  Json records = Json::array();
  for (const auto& r : report.records) records.push_back(RecordToJson(r));
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    failures.push_back(Json{{"prompt_id", f.prompt_id},
                            {"seed_index", f.seed_index},
                            {"video", f.video},
                            {"metric", f.metric},
                            {"message", f.message}});
  }
  Json j{{"model_id", report.model_id},
         {"config", report.config},
         {"records", records},
         {"failures", failures}};
  if (!generated_at.empty()) j["generated_at"] = generated_at;
  return j;
}

RunReport ReportFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("model_id") || !j.contains("records")) {
    throw Error(ErrorCode::kParse, "report needs model_id and records");
  }
  RunReport report;
  report.model_id = j["model_id"].get<std::string>();
  if (j.contains("config")) report.config = j["config"];
  for (const Json& r : j["records"]) report.records.push_back(RecordFromJson(r));
  if (j.contains("failures")) {
    for (const Json& f : j["failures"]) {
      report.failures.push_back({f.value("prompt_id", ""), f.value("seed_index", 0),
                                 f.value("video", ""), f.value("metric", ""),
                                 f.value("message", "")});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Leaderboard

Aggregation ParseAggregation(std::string_view name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "median") return Aggregation::kMedian;
  throw Error(ErrorCode::kInvalidArgument,
              "aggregation must be mean or median, got \"" + std::string(name) +
                  "\"");
}

const LeaderboardRow* Leaderboard::Find(
    std::string_view model_id, std::optional<MajorCategory> category) const {
  for (const auto& row : rows) {
    if (row.model_id == model_id && row.category == category) return &row;
  }
  return nullptr;
}

ExternalScores ParseExternalCsv(std::string_view csv) {
  ExternalScores out;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(csv)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto cells = SplitCsvRow(line);
    if (header.empty()) {
      if (cells.empty() || cells[0] != "model_id") {
        throw Error(ErrorCode::kParse,
                    "external CSV header must start with model_id");
      }
      header = std::move(cells);
      continue;
    }
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kParse,
                  "external CSV line " + std::to_string(line_no) +
                      " has the wrong number of cells");
    }
    auto& row = out[cells[0]];
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i].empty()) continue;
      const auto v = ParseNumber(cells[i]);
      if (!v) {
        throw Error(ErrorCode::kParse, "external CSV line " +
                                           std::to_string(line_no) +
                                           ": not a number: " + cells[i]);
      }
      row[header[i]] = *v;
    }
  }
  return out;
}

namespace {

double Reduce(std::vector<double> values, Aggregation aggregation) {
  if (aggregation == Aggregation::kMedian) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

using ColumnValuesMap = std::map<std::string, std::vector<double>>;

void Collect(const EvaluationRecord& r, ColumnValuesMap& into) {
  if (r.chscore) into[std::string(kColumnChscore)].push_back(*r.chscore);
  if (r.mtscore) into[std::string(kColumnMtscore)].push_back(*r.mtscore);
  if (r.gpt4o_mtscore) {
    into[std::string(kColumnGptscore)].push_back(*r.gpt4o_mtscore);
  }
  for (const auto& [name, v] : r.external) into[name].push_back(v);
}

bool LowerIsBetter(std::string_view column) { return column == "UMT-FVD"; }

std::string FormatNumber(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

// Shortest text that parses back to the same double.
std::string FormatExact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Leaderboard Aggregate(std::span<const EvaluationRecord> records,
                      std::span<const BenchmarkEntry> bench,
                      const ExternalScores& external, Aggregation aggregation) {
  std::map<std::string, MajorCategory> category_of;
  for (const auto& e : bench) category_of[e.prompt_id] = e.major_category;

  struct Group {
    ColumnValuesMap values;
    std::size_t videos = 0;
  };
  // model -> (overall, per category)
  std::map<std::string, std::pair<Group, std::map<MajorCategory, Group>>> groups;
  std::set<std::string> external_columns;

  for (const auto& r : records) {
    auto cat = category_of.find(r.prompt_id);
    if (cat == category_of.end()) {
      throw Error(ErrorCode::kNotFound,
                  "record prompt_id " + r.prompt_id + " is not in the benchmark");
    }
    auto& [overall, per_cat] = groups[r.model_id];
    Collect(r, overall.values);
    ++overall.videos;
    Group& g = per_cat[cat->second];
    Collect(r, g.values);
    ++g.videos;
    for (const auto& [name, v] : r.external) external_columns.insert(name);
  }
  for (const auto& [model, cols] : external) {
    groups[model];
    for (const auto& [name, v] : cols) external_columns.insert(name);
  }

  Leaderboard board;
  board.aggregation = aggregation;
  for (const char* preferred : {"UMT-FVD", "UMTScore"}) {
    if (external_columns.erase(preferred)) board.columns.emplace_back(preferred);
  }
  for (const auto& name : external_columns) {
    if (name != kColumnChscore && name != kColumnMtscore &&
        name != kColumnGptscore) {
      board.columns.push_back(name);
    }
  }
  board.columns.emplace_back(kColumnMtscore);
  board.columns.emplace_back(kColumnChscore);
  board.columns.emplace_back(kColumnGptscore);

  auto make_row = [&](const std::string& model,
                      std::optional<MajorCategory> category, const Group& g) {
    LeaderboardRow row;
    row.model_id = model;
    row.category = category;
    row.videos = g.videos;
    for (const auto& column : board.columns) {
      LeaderboardCell cell;
      if (auto it = g.values.find(column); it != g.values.end()) {
        cell.count = it->second.size();
        cell.value = Reduce(it->second, aggregation);
      }
      row.cells[column] = cell;
    }
    return row;
  };

  for (const auto& [model, pair] : groups) {
    const auto& [overall, per_cat] = pair;
    LeaderboardRow row = make_row(model, std::nullopt, overall);
    if (auto ext = external.find(model); ext != external.end()) {
      for (const auto& [name, v] : ext->second) row.cells[name] = {v, 0};
    }
    board.rows.push_back(std::move(row));
    for (const auto& [cat, g] : per_cat) {
      board.rows.push_back(make_row(model, cat, g));
    }
  }
  return board;
}

Json LeaderboardToJson(const Leaderboard& board) {
  Json rows = Json::array();
  for (const auto& row : board.rows) {
    Json cells = Json::object();
    for (const auto& [name, cell] : row.cells) {
      cells[name] = Json{{"value", cell.value ? Json(*cell.value) : Json(nullptr)},
                         {"count", cell.count}};
    }
    rows.push_back(Json{
        {"model_id", row.model_id},
        {"category", row.category ? Json(MajorCategoryName(*row.category))
                                  : Json(nullptr)},
        {"videos", row.videos},
        {"cells", cells}});
  }
  return Json{{"aggregation",
               board.aggregation == Aggregation::kMean ? "mean" : "median"},
              {"columns", board.columns},
              {"rows", rows}};
}

Leaderboard LeaderboardFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("columns") || !j.contains("rows")) {
    throw Error(ErrorCode::kParse, "leaderboard needs columns and rows");
  }
  Leaderboard board;
  board.aggregation = ParseAggregation(j.value("aggregation", "mean"));
  board.columns = j["columns"].get<std::vector<std::string>>();
  for (const Json& r : j["rows"]) {
    LeaderboardRow row;
    row.model_id = r.at("model_id").get<std::string>();
    if (!r.at("category").is_null()) {
      row.category = ParseMajorCategory(r["category"].get<std::string>());
    }
    row.videos = r.value("videos", std::size_t{0});
    for (const auto& [name, cell] : r.at("cells").items()) {
      LeaderboardCell c;
      if (!cell.at("value").is_null()) c.value = cell["value"].get<double>();
      c.count = cell.value("count", std::size_t{0});
      row.cells[name] = c;
    }
    board.rows.push_back(std::move(row));
  }
  return board;
}

std::string LeaderboardToCsv(const Leaderboard& board) {
  std::ostringstream out;
  out << "model_id,category,videos";
  for (const auto& c : board.columns) out << ',' << c;
  out << '\n';
  for (const auto& row : board.rows) {
    out << row.model_id << ','
        << (row.category ? MajorCategoryName(*row.category) : "overall") << ','
        << row.videos;
    for (const auto& c : board.columns) {
      out << ',';
      auto it = row.cells.find(c);
      if (it != row.cells.end() && it->second.value) {
        out << FormatExact(*it->second.value);
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string LeaderboardToMarkdown(const Leaderboard& board) {
  std::ostringstream out;
  out << "| Method | Category | Videos |";
  for (const auto& c : board.columns) {
    out << ' ' << c << (LowerIsBetter(c) ? " (lower better)" : "") << " |";
  }
  out << "\n|---|---|---:|";
  for (std::size_t i = 0; i < board.columns.size(); ++i) out << "---:|";
  out << '\n';
  for (const auto& row : board.rows) {
    out << "| " << row.model_id << " | "
        << (row.category ? MajorCategoryName(*row.category) : "overall")
        << " | " << row.videos << " |";
    for (const auto& c : board.columns) {
      auto it = row.cells.find(c);
      out << ' ';
      if (it != row.cells.end() && it->second.value) {
        out << FormatNumber(*it->second.value, 4);
      }
      out << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::map<std::string, double> ColumnValues(const Leaderboard& board,
                                           std::string_view column) {
  std::map<std::string, double> out;
  for (const auto& row : board.rows) {
    if (row.category) continue;
    auto it = row.cells.find(std::string(column));
    if (it != row.cells.end() && it->second.value) {
      out[row.model_id] = *it->second.value;
    }
  }
  return out;
}

std::vector<std::string> RankModels(const Leaderboard& board,
                                    std::string_view column) {
  const auto values = ColumnValues(board, column);
  std::vector<std::pair<std::string, double>> ranked(values.begin(),
                                                     values.end());
  const bool ascending = LowerIsBetter(column);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const auto& a, const auto& b) {
                     return ascending ? a.second < b.second
                                      : a.second > b.second;
                   });
  std::vector<std::string> out;
  for (auto& [model, v] : ranked) out.push_back(model);
  return out;
}

Correlation Correlate(const std::map<std::string, double>& metric,
                      const std::map<std::string, double>& human) {
  std::vector<double> x, y;
  for (const auto& [model, v] : metric) {
    if (auto it = human.find(model); it != human.end()) {
      x.push_back(v);
      y.push_back(it->second);
    }
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least two models with both metric and human scores, "
                "have " + std::to_string(x.size()));
  }
  const std::size_t n = x.size();
  const PairedSample sample = PairedSample::Create(std::move(x), std::move(y));
  return {KendallTau(sample), SpearmanRho(sample), n};
}

std::map<std::string, double> ParseHumanCsv(std::string_view csv) {
  std::map<std::string, double> out;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(csv)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto cells = SplitCsvRow(line);
    if (cells.size() != 2) {
      throw Error(ErrorCode::kParse, "human CSV line " + std::to_string(line_no) +
                                         " must have model_id,score");
    }
    const auto v = ParseNumber(cells[1]);
    if (!v) {
      if (out.empty() && line_no == 1) continue;  // header
      throw Error(ErrorCode::kParse, "human CSV line " +
                                         std::to_string(line_no) +
                                         ": not a number: " + cells[1]);
    }
    out[cells[0]] = *v;
  }
  return out;
}

}  // namespace tlm
