#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stub_adapter.h"
#include "test_support.h"
#include "tlm/harness.h"

namespace {

using testing_support::Fixture;
using tlm::ErrorCode;
using tlm::MajorCategory;

std::vector<tlm::BenchmarkEntry> Bench() {
  return tlm::LoadBenchmark(Fixture("bench/manifest.jsonl"));
}

tlm::EvaluationRecord Rec(std::string model, std::string prompt, int seed,
                          std::optional<double> ch, std::optional<double> mt,
                          std::optional<double> gpt = std::nullopt) {
  return {std::move(model), std::move(prompt), seed, ch, mt, gpt, {}};
}

TEST(Benchmark, LoadsFixtureManifest) {
  const auto bench = Bench();
  ASSERT_EQ(bench.size(), 4u);
  EXPECT_EQ(bench[0].prompt_id, "biological-plant-growth-0");
  EXPECT_EQ(bench[3].major_category, MajorCategory::kPhysical);
  EXPECT_EQ(tlm::ParseBenchmark(tlm::BenchmarkToJsonl(bench)), bench);
}

TEST(Benchmark, ErrorsCarryLineNumbers) {
  const std::string good =
      R"({"prompt_id":"a","prompt":"p","reference_video":"r","sub_category":"s","major_category":"physical"})";
  try {
    tlm::ParseBenchmark(good + "\n\n{broken\n");
    FAIL();
  } catch (const tlm::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_TLM_ERROR(tlm::ParseBenchmark(good + "\n" + good + "\n"), ErrorCode::kDuplicate);
}

TEST(Selection, CommentsAndBlankLines) {
  EXPECT_EQ(tlm::ParseSelection("# header\na\n\n  b  # trailing\n"),
            (std::vector<std::string>{"a", "b"}));
}

TEST(Bench150, TwoPerSubCategory) {
  const auto bench = tlm::LoadBenchmark(Fixture("bench150/manifest.jsonl"));
  const auto sel = tlm::ParseSelection(tlm::ReadFile(Fixture("bench150/selection.txt")));
  const auto subset = tlm::SubsetBench150(bench, sel);
  ASSERT_EQ(subset.size(), 150u);
  std::map<std::string, int> per_sub;
  for (const auto& e : subset) ++per_sub[e.sub_category];
  EXPECT_EQ(per_sub.size(), 75u);
  for (const auto& [sub, n] : per_sub) EXPECT_EQ(n, 2) << sub;
  // Benchmark order is preserved.
  EXPECT_EQ(subset[0].prompt_id, bench[0].prompt_id);
  EXPECT_EQ(subset[1].prompt_id, bench[2].prompt_id);
}

TEST(Bench150, RejectsUnevenSelections) {
  const auto bench = tlm::LoadBenchmark(Fixture("bench150/manifest.jsonl"));
  auto sel = tlm::ParseSelection(tlm::ReadFile(Fixture("bench150/selection.txt")));
  auto one_short = sel;
  one_short.pop_back();
  EXPECT_TLM_ERROR(tlm::SubsetBench150(bench, one_short), ErrorCode::kInvalidArgument);
  auto three = sel;
  three.push_back(bench[1].prompt_id);
  EXPECT_TLM_ERROR(tlm::SubsetBench150(bench, three), ErrorCode::kInvalidArgument);
  auto unknown = sel;
  unknown[0] = "nope";
  EXPECT_TLM_ERROR(tlm::SubsetBench150(bench, unknown), ErrorCode::kNotFound);
  EXPECT_TLM_ERROR(tlm::SubsetBench150(bench, {}), ErrorCode::kInvalidArgument);
}

TEST(RunDiscovery, FindsSeedsAndImageDirectories) {
  const auto run = tlm::DiscoverRun(Fixture("runs/model-b"), "model-b", Bench());
  ASSERT_EQ(run.videos.size(), 4u);
  const auto& first = run.videos.at("biological-plant-growth-0");
  ASSERT_EQ(first.size(), 3u);
  EXPECT_NE(first[1].find("seed_1"), std::string::npos);
  EXPECT_TLM_ERROR(tlm::DiscoverRun(Fixture("runs/missing"), "m", Bench()),
                   ErrorCode::kIo);
}

TEST(RunDiscovery, SeedGapIsRejected) {
  testing_support::TempDir dir("gap");
  const auto p = dir.path() / "physical-ice-melting-0";
  std::filesystem::create_directories(p);
  tlm::WriteFile((p / "seed_0.tlf").string(), "");
  tlm::WriteFile((p / "seed_2.tlf").string(), "");
  EXPECT_TLM_ERROR(tlm::DiscoverRun(dir.path().string(), "m", Bench()),
                   ErrorCode::kInvalidArgument);
}

TEST(RunManifest, ExplicitManifestResolvesRelativePaths) {
  const auto run = tlm::LoadRunManifest(Fixture("runs/model-a.json"));
  EXPECT_EQ(run.model_id, "model-a");
  EXPECT_TRUE(std::filesystem::exists(run.videos.at("physical-ice-melting-0")[2]));
  tlm::RunManifest bad = run;
  bad.videos["unknown-0"] = {"x"};
  EXPECT_TLM_ERROR(tlm::ValidateRunManifest(bad, Bench()), ErrorCode::kNotFound);
  bad = run;
  bad.videos["physical-ice-melting-0"].push_back("x");
  EXPECT_TLM_ERROR(tlm::ValidateRunManifest(bad, Bench()), ErrorCode::kInvalidArgument);
}

TEST(MetricList, Parsing) {
  tlm::EvaluationConfig cfg;
  tlm::ParseMetricList("mtscore, gptscore", cfg);
  EXPECT_FALSE(cfg.chscore);
  EXPECT_TRUE(cfg.mtscore);
  EXPECT_TRUE(cfg.gptscore);
  EXPECT_TLM_ERROR(tlm::ParseMetricList("fvd", cfg), ErrorCode::kInvalidArgument);
}

TEST(EvaluateRun, RecordsReadFailuresAndContinues) {
  tlm::stub::StubBackend stub;
  tlm::EvaluationConfig cfg;
  tlm::ParseMetricList("chscore,mtscore,gptscore", cfg);
  const auto run = tlm::DiscoverRun(Fixture("runs/model-b"), "model-b", Bench());
  const auto report = tlm::EvaluateRun(run, Bench(), cfg, stub);
  EXPECT_EQ(report.records.size(), 11u);
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].metric, "read");
  EXPECT_EQ(report.failures[0].prompt_id, "meteorological-sunset-0");
  EXPECT_EQ(report.failures[0].seed_index, 2);
  for (const auto& r : report.records) {
    EXPECT_TRUE(r.chscore && r.mtscore && r.gpt4o_mtscore) << r.prompt_id;
  }
  // Benchmark order, then seed.
  EXPECT_EQ(report.records[0].prompt_id, "biological-plant-growth-0");
  EXPECT_EQ(report.records[1].seed_index, 1);
  EXPECT_EQ(report.config["mtscore"]["sentences_sha256"].get<std::string>().size(), 64u);
}

TEST(EvaluateRun, WorkerCountDoesNotChangeReport) {
  tlm::stub::StubBackend stub;
  tlm::EvaluationConfig cfg;
  tlm::ParseMetricList("chscore,mtscore", cfg);
  const auto run = tlm::LoadRunManifest(Fixture("runs/model-a.json"));
  const auto serial = tlm::ReportToJson(tlm::EvaluateRun(run, Bench(), cfg, stub));
  cfg.workers = 4;
  const auto parallel = tlm::ReportToJson(tlm::EvaluateRun(run, Bench(), cfg, stub));
  EXPECT_EQ(serial.dump(), parallel.dump());
}

TEST(EvaluateRun, AllVideosFailingIsAnError) {
  tlm::stub::StubBackend stub;
  tlm::RunManifest run{"m", {{"physical-ice-melting-0", {"/nonexistent.tlf"}}}};
  EXPECT_TLM_ERROR(tlm::EvaluateRun(run, Bench(), {}, stub), ErrorCode::kBackend);
}

TEST(EvaluateRun, MetricFailuresAreRecordLevel) {
  tlm::stub::StubOptions o;
  o.rubric_reply = "Score: 9";
  tlm::stub::StubBackend stub(o);
  tlm::EvaluationConfig cfg;
  tlm::ParseMetricList("chscore,gptscore", cfg);
  tlm::RunManifest run{"m", {{"physical-ice-melting-0",
                              {Fixture("runs/model-a/physical-ice-melting-0/seed_0.tlf")}}}};
  const auto report = tlm::EvaluateRun(run, Bench(), cfg, stub);
  ASSERT_EQ(report.records.size(), 1u);
  EXPECT_TRUE(report.records[0].chscore.has_value());
  EXPECT_FALSE(report.records[0].gpt4o_mtscore.has_value());
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].metric, "gptscore");
}

TEST(Report, JsonRoundTripAndTimestamp) {
  tlm::RunReport r;
  r.model_id = "m";
  r.records = {Rec("m", "physical-ice-melting-0", 0, 2.5, 0.4)};
  r.failures = {{"physical-ice-melting-0", 1, "v", "read", "gone"}};
  EXPECT_FALSE(tlm::ReportToJson(r).contains("generated_at"));
  const auto j = tlm::ReportToJson(r, "2026-01-01T00:00:00Z");
  EXPECT_EQ(j["generated_at"], "2026-01-01T00:00:00Z");
  const auto back = tlm::ReportFromJson(j);
  EXPECT_EQ(back.records, r.records);
  EXPECT_EQ(back.failures, r.failures);
}

class LeaderboardTest : public ::testing::Test {
 protected:
  std::vector<tlm::EvaluationRecord> records = {
      Rec("a", "biological-plant-growth-0", 0, 2.0, 0.4, 3),
      Rec("a", "biological-plant-growth-0", 1, 4.0, 0.6, 4),
      Rec("a", "physical-ice-melting-0", 0, 9.0, 0.5, 5),
      Rec("b", "sunset-unknown", 0, 1.0, 0.1),
  };
};

TEST_F(LeaderboardTest, UnknownPromptIsRejected) {
  EXPECT_TLM_ERROR(tlm::Aggregate(records, Bench()), ErrorCode::kNotFound);
}

TEST_F(LeaderboardTest, MeansPerCategoryAndOverall) {
  records.pop_back();
  records.push_back(Rec("b", "meteorological-sunset-0", 0, 1.0, std::nullopt));
  tlm::ExternalScores ext = {{"a", {{"UMT-FVD", 200.0}, {"UMTScore", 2.5}}}};
  const auto board = tlm::Aggregate(records, Bench(), ext);
  EXPECT_EQ(board.columns,
            (std::vector<std::string>{"UMT-FVD", "UMTScore", "MTScore", "CHScore",
                                      "GPT4o-MTScore"}));
  const auto* a = board.Find("a", std::nullopt);
  ASSERT_NE(a, nullptr);
  EXPECT_DOUBLE_EQ(*a->cells.at("CHScore").value, 5.0);
  EXPECT_DOUBLE_EQ(*a->cells.at("MTScore").value, 0.5);
  EXPECT_DOUBLE_EQ(*a->cells.at("GPT4o-MTScore").value, 4.0);
  EXPECT_EQ(*a->cells.at("UMT-FVD").value, 200.0);
  EXPECT_EQ(a->videos, 3u);
  const auto* bio = board.Find("a", MajorCategory::kBiological);
  ASSERT_NE(bio, nullptr);
  EXPECT_DOUBLE_EQ(*bio->cells.at("CHScore").value, 3.0);
  EXPECT_FALSE(bio->cells.at("UMT-FVD").value.has_value());
  const auto* b = board.Find("b", std::nullopt);
  ASSERT_NE(b, nullptr);
  EXPECT_FALSE(b->cells.at("MTScore").value.has_value());
  EXPECT_EQ(board.Find("b", MajorCategory::kPhysical), nullptr);

  const auto median = tlm::Aggregate(records, Bench(), {}, tlm::Aggregation::kMedian);
  EXPECT_DOUBLE_EQ(*median.Find("a", std::nullopt)->cells.at("CHScore").value, 4.0);
}

TEST_F(LeaderboardTest, CsvMarkdownAndJson) {
  records.pop_back();
  const auto board = tlm::Aggregate(records, Bench());
  const std::string csv = tlm::LeaderboardToCsv(board);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "model_id,category,videos,MTScore,CHScore,GPT4o-MTScore");
  EXPECT_NE(csv.find("a,overall,3,0.5,5,4\n"), std::string::npos) << csv;
  EXPECT_NE(tlm::LeaderboardToMarkdown(board).find("| a | overall | 3 | 0.5000 | 5.0000 | 4.0000 |"),
            std::string::npos);
  const auto back = tlm::LeaderboardFromJson(tlm::LeaderboardToJson(board));
  EXPECT_EQ(tlm::LeaderboardToCsv(back), csv);
}

TEST(ExternalCsv, ParsesAndValidates) {
  const auto ext = tlm::ParseExternalCsv(tlm::ReadFile(Fixture("bench/external.csv")));
  EXPECT_EQ(ext.at("model-b").at("UMT-FVD"), 265.25);
  EXPECT_TLM_ERROR(tlm::ParseExternalCsv("model,x\na,1\n"), ErrorCode::kParse);
  EXPECT_TLM_ERROR(tlm::ParseExternalCsv("model_id,x\na,zz\n"), ErrorCode::kParse);
  EXPECT_TLM_ERROR(tlm::ParseExternalCsv("model_id,x\na,1,2\n"), ErrorCode::kParse);
  EXPECT_TRUE(tlm::ParseExternalCsv("model_id,x,y\na,,2\n").at("a").count("x") == 0);
}

TEST(Ranking, FvdIsAscendingOthersDescending) {
  std::vector<tlm::EvaluationRecord> none;
  tlm::ExternalScores ext = {{"a", {{"UMT-FVD", 300}, {"UMTScore", 1}}},
                             {"b", {{"UMT-FVD", 100}, {"UMTScore", 3}}},
                             {"c", {{"UMT-FVD", 200}, {"UMTScore", 2}}}};
  const auto board = tlm::Aggregate(none, Bench(), ext);
  EXPECT_EQ(tlm::RankModels(board, "UMT-FVD"), (std::vector<std::string>{"b", "c", "a"}));
  EXPECT_EQ(tlm::RankModels(board, "UMTScore"), (std::vector<std::string>{"b", "c", "a"}));
  EXPECT_TRUE(tlm::RankModels(board, "CHScore").empty());
}

TEST(Correlate, PairsOverlappingModels) {
  const auto r = tlm::Correlate({{"a", 1}, {"b", 2}, {"c", 3}, {"x", 9}},
                                {{"a", 1}, {"b", 3}, {"c", 2}, {"y", 0}});
  EXPECT_EQ(r.models, 3u);
  EXPECT_EQ(r.kendall_tau, 1.0 / 3);
  EXPECT_EQ(r.spearman_rho, 0.5);
  EXPECT_TLM_ERROR(tlm::Correlate({{"a", 1}}, {{"a", 1}}), ErrorCode::kInvalidArgument);
}

TEST(HumanCsv, HeaderIsOptional) {
  EXPECT_EQ(tlm::ParseHumanCsv("model_id,score\na,1.5\n").at("a"), 1.5);
  EXPECT_EQ(tlm::ParseHumanCsv("a,2\nb,3\n").size(), 2u);
  EXPECT_TLM_ERROR(tlm::ParseHumanCsv("a,2\nb,x\n"), ErrorCode::kParse);
}

}  // namespace
