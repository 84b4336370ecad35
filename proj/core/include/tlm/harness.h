#ifndef TLM_HARNESS_H_
#define TLM_HARNESS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlm/chscore.h"
#include "tlm/json_io.h"
#include "tlm/mtscore.h"
#include "tlm/protocol.h"
#include "tlm/types.h"

namespace tlm {

// ---------------------------------------------------------------------------
// Benchmark manifest

// JSON lines, one entry per line with keys prompt_id, prompt,
// reference_video, sub_category, major_category. Blank lines are skipped.
// Throws Error(kParse) with the line number, Error(kDuplicate) on a repeated
// prompt_id, Error(kInvalidArgument) on an invalid entry.
std::vector<BenchmarkEntry> ParseBenchmark(std::string_view jsonl);
std::vector<BenchmarkEntry> LoadBenchmark(const std::string& path);
std::string BenchmarkToJsonl(std::span<const BenchmarkEntry> entries);

inline constexpr std::size_t kHardPromptsPerSubCategory = 2;

// One prompt_id per line; '#' starts a comment.
std::vector<std::string> ParseSelection(std::string_view text);

// Order-preserving subset. Every sub-category present in `entries` must be
// selected exactly kHardPromptsPerSubCategory times. Throws
// Error(kInvalidArgument) for an empty or invalid selection,
// Error(kNotFound) for an id missing from the manifest.
std::vector<BenchmarkEntry> SubsetBench150(
    std::span<const BenchmarkEntry> entries,
    std::span<const std::string> selection);

// ---------------------------------------------------------------------------
// Evaluation

struct RunManifest {
  std::string model_id;
  // prompt_id -> generated videos, index = seed.
  std::map<std::string, std::vector<std::string>> videos;
};

// Scans <run_root>/<prompt_id>/seed_<k>.<ext> for every benchmark prompt.
RunManifest DiscoverRun(const std::string& run_root, std::string model_id,
                        std::span<const BenchmarkEntry> bench);

// {"model_id": str, "videos": {prompt_id: [path, ...]}}; relative paths
// resolve against the manifest's directory.
RunManifest LoadRunManifest(const std::string& path);

// Throws Error(kNotFound) for unknown prompt ids and Error(kInvalidArgument)
// for prompts with no or more than kSeedsPerPrompt videos.
void ValidateRunManifest(const RunManifest& run,
                         std::span<const BenchmarkEntry> bench);

struct EvaluationConfig {
  bool chscore = true;
  bool mtscore = false;
  bool gptscore = false;
  CHScoreConfig chscore_config;
  GPTScoreConfig gpt_config;
  int grid_size = CHScoreConfig::kDefaultGridSize;
  int workers = 1;
  Deadline deadline = kDefaultDeadline;
};

// Parses "chscore,mtscore,gptscore" into the toggles of `config`.
void ParseMetricList(std::string_view list, EvaluationConfig& config);

struct EvaluationFailure {
  std::string prompt_id;
  int seed_index = 0;
  std::string video;
  std::string metric;  // "read", "chscore", "mtscore" or "gptscore"
  std::string message;

  bool operator==(const EvaluationFailure&) const = default;
};

struct RunReport {
  std::string model_id;
  std::vector<EvaluationRecord> records;
  std::vector<EvaluationFailure> failures;
  Json config;
};

// Evaluates every video of the run. Per-video failures are recorded and do
// not abort the run. Records are ordered by benchmark order, then seed.
// Throws Error(kInvalidArgument) for an empty run and Error(kBackend) when
// no video could be evaluated.
RunReport EvaluateRun(const RunManifest& run,
                      std::span<const BenchmarkEntry> bench,
                      const EvaluationConfig& config, Backend& backend);

// `generated_at` is the only nondeterministic field and is omitted when
// empty.
Json ReportToJson(const RunReport& report, std::string_view generated_at = {});
RunReport ReportFromJson(const Json& j);

// ---------------------------------------------------------------------------
// Leaderboard

inline constexpr std::string_view kColumnChscore = "CHScore";
inline constexpr std::string_view kColumnMtscore = "MTScore";
inline constexpr std::string_view kColumnGptscore = "GPT4o-MTScore";

enum class Aggregation { kMean, kMedian };

Aggregation ParseAggregation(std::string_view name);

struct LeaderboardCell {
  std::optional<double> value;
  std::size_t count = 0;
};

struct LeaderboardRow {
  std::string model_id;
  std::optional<MajorCategory> category;  // nullopt: overall
  std::map<std::string, LeaderboardCell> cells;
  std::size_t videos = 0;
};

struct Leaderboard {
  Aggregation aggregation = Aggregation::kMean;
  std::vector<std::string> columns;
  std::vector<LeaderboardRow> rows;

  const LeaderboardRow* Find(std::string_view model_id,
                             std::optional<MajorCategory> category) const;
};

// model_id -> column -> value, supplied by external tools.
using ExternalScores = std::map<std::string, std::map<std::string, double>>;

// CSV with header "model_id,<column>,..."; empty cells are skipped.
ExternalScores ParseExternalCsv(std::string_view csv);

// Groups records by model and major category. Record-level external values
// are aggregated like the built-in metrics; model-level external scores are
// placed verbatim in the overall row. Metrics with no values stay empty.
Leaderboard Aggregate(std::span<const EvaluationRecord> records,
                      std::span<const BenchmarkEntry> bench,
                      const ExternalScores& external = {},
                      Aggregation aggregation = Aggregation::kMean);

Json LeaderboardToJson(const Leaderboard& board);
Leaderboard LeaderboardFromJson(const Json& j);
std::string LeaderboardToCsv(const Leaderboard& board);
std::string LeaderboardToMarkdown(const Leaderboard& board);

// Model ids ordered by the overall value in `column`, best first. Models
// with an empty cell are left out. Lower is better for "UMT-FVD".
std::vector<std::string> RankModels(const Leaderboard& board,
                                    std::string_view column);

// Overall value per model for `column`, skipping empty cells.
std::map<std::string, double> ColumnValues(const Leaderboard& board,
                                           std::string_view column);

struct Correlation {
  double kendall_tau = 0.0;
  double spearman_rho = 0.0;
  std::size_t models = 0;
};

// Pairs models present in both maps. Throws Error(kInvalidArgument) with
// fewer than two overlapping models.
Correlation Correlate(const std::map<std::string, double>& metric,
                      const std::map<std::string, double>& human);

// CSV "model_id,score" (header optional).
std::map<std::string, double> ParseHumanCsv(std::string_view csv);

}  // namespace tlm

#endif  // TLM_HARNESS_H_
