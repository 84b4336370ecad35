// bench run|aggregate|correlate|subset
//
//   bench run --manifest bench.jsonl --run-root runs/model-a --model-id model-a
//             --backend "stdio:stub_adapter" --out report.json
//   bench aggregate --manifest bench.jsonl --reports a.json b.json
//             [--external fvd.csv] --out-prefix leaderboard
//   bench correlate --leaderboard leaderboard.json --metric CHScore
//             --human human.csv
//   bench subset --manifest bench.jsonl --selection hard.txt --out bench150.jsonl

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "tlm/error.h"
#include "tlm/harness.h"
#include "tlm/json_io.h"

namespace {

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark runner and leaderboard"};
  app.require_subcommand(1);

  std::string manifest_path, run_root, run_manifest, model_id, endpoint, token;
  std::string out_path, out_prefix, external_path, aggregation = "mean";
  std::string leaderboard_path, metric, human_path, selection_path;
  std::string metrics = "chscore";
  std::vector<std::string> report_paths;
  tlm::EvaluationConfig config;
  long long deadline_ms = tlm::kDefaultDeadline.count();
  bool timestamp = true;

  auto* run = app.add_subcommand("run", "Evaluate one model's generated videos");
  run->add_option("--manifest", manifest_path, "Benchmark JSON lines")->required();
  auto* root_opt = run->add_option("--run-root", run_root,
                                   "<run-root>/<prompt_id>/seed_<k>.<ext>");
  auto* videos_opt = run->add_option("--videos", run_manifest,
                                     "Explicit run manifest JSON");
  root_opt->excludes(videos_opt);
  run->add_option("--model-id", model_id, "Required with --run-root");
  run->add_option("--metrics", metrics, "Comma list of chscore,mtscore,gptscore")
      ->capture_default_str();
  run->add_option("--backend", endpoint, "stdio:<cmd> or http://host:port")
      ->required();
  run->add_option("--token", token, "Bearer token for HTTP backends");
  run->add_option("--out", out_path, "Report JSON")->required();
  run->add_option("--workers", config.workers)->capture_default_str();
  run->add_option("--threshold", config.chscore_config.threshold)
      ->capture_default_str();
  run->add_option("--grid-size", config.grid_size)->capture_default_str();
  run->add_option("--max-retries", config.gpt_config.max_retries)
      ->capture_default_str();
  run->add_option("--deadline-ms", deadline_ms)->capture_default_str();
  run->add_flag("!--no-timestamp", timestamp, "Omit generated_at");

  auto* agg = app.add_subcommand("aggregate", "Build the leaderboard");
  agg->add_option("--manifest", manifest_path)->required();
  agg->add_option("--reports", report_paths)->required();
  agg->add_option("--external", external_path, "CSV model_id,<column>,...");
  agg->add_option("--aggregation", aggregation)
      ->check(CLI::IsMember({"mean", "median"}))
      ->capture_default_str();
  agg->add_option("--out-prefix", out_prefix, "Writes .json, .csv and .md")
      ->required();

  auto* corr = app.add_subcommand("correlate", "Rank agreement with human scores");
  corr->add_option("--leaderboard", leaderboard_path)->required();
  corr->add_option("--metric", metric, "Leaderboard column")->required();
  corr->add_option("--human", human_path, "CSV model_id,score")->required();

  auto* subset = app.add_subcommand("subset", "Select the hard-prompt subset");
  subset->add_option("--manifest", manifest_path)->required();
  subset->add_option("--selection", selection_path)->required();
  subset->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto bench = tlm::LoadBenchmark(manifest_path);
      tlm::RunManifest manifest;
      if (!run_manifest.empty()) {
        manifest = tlm::LoadRunManifest(run_manifest);
        if (!model_id.empty()) manifest.model_id = model_id;
      } else if (!run_root.empty()) {
        if (model_id.empty()) {
          throw tlm::Error(tlm::ErrorCode::kInvalidArgument,
                           "--run-root needs --model-id");
        }
        manifest = tlm::DiscoverRun(run_root, model_id, bench);
      } else {
        throw tlm::Error(tlm::ErrorCode::kInvalidArgument,
                         "run needs --run-root or --videos");
      }
      tlm::ParseMetricList(metrics, config);
      config.deadline = tlm::Deadline(deadline_ms);
      config.gpt_config.deadline = config.deadline;
      auto backend = tlm::ConnectBackend(endpoint, token);
      const auto report = tlm::EvaluateRun(manifest, bench, config, *backend);
      tlm::WriteFile(out_path,
                     tlm::ReportToJson(report, timestamp ? UtcNow() : "").dump(2) +
                         "\n");
      std::fprintf(stderr, "%zu records, %zu failures\n", report.records.size(),
                   report.failures.size());
      for (const auto& f : report.failures) {
        std::fprintf(stderr, "  %s seed %d [%s]: %s\n", f.prompt_id.c_str(),
                     f.seed_index, f.metric.c_str(), f.message.c_str());
      }
    } else if (*agg) {
      const auto bench = tlm::LoadBenchmark(manifest_path);
      std::vector<tlm::EvaluationRecord> records;
      for (const auto& path : report_paths) {
        auto report = tlm::ReportFromJson(tlm::ParseJson(tlm::ReadFile(path)));
        records.insert(records.end(), report.records.begin(), report.records.end());
      }
      tlm::ExternalScores external;
      if (!external_path.empty()) {
        external = tlm::ParseExternalCsv(tlm::ReadFile(external_path));
      }
      const auto board = tlm::Aggregate(records, bench, external,
                                        tlm::ParseAggregation(aggregation));
      tlm::WriteFile(out_prefix + ".json",
                     tlm::LeaderboardToJson(board).dump(2) + "\n");
      tlm::WriteFile(out_prefix + ".csv", tlm::LeaderboardToCsv(board));
      tlm::WriteFile(out_prefix + ".md", tlm::LeaderboardToMarkdown(board));
    } else if (*corr) {
      const auto board =
          tlm::LeaderboardFromJson(tlm::ParseJson(tlm::ReadFile(leaderboard_path)));
      const auto result =
          tlm::Correlate(tlm::ColumnValues(board, metric),
                         tlm::ParseHumanCsv(tlm::ReadFile(human_path)));
      const tlm::Json out{{"metric", metric},
                          {"models", result.models},
                          {"kendall_tau", result.kendall_tau},
                          {"spearman_rho", result.spearman_rho}};
      std::cout << out.dump() << "\n";
    } else if (*subset) {
      const auto bench = tlm::LoadBenchmark(manifest_path);
      const auto selection = tlm::ParseSelection(tlm::ReadFile(selection_path));
      tlm::WriteFile(out_path,
                     tlm::BenchmarkToJsonl(tlm::SubsetBench150(bench, selection)));
    }
  } catch (const tlm::Error& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 1;
  } catch (const tlm::Json::exception& e) {
    std::cerr << "bench: malformed input: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
