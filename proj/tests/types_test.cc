#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_support.h"
#include "tlm/frames.h"
#include "tlm/json_io.h"
#include "tlm/types.h"

namespace {

using tlm::ErrorCode;
using tlm::Json;

TEST(VisibilityMatrix, RejectsWrongFlagCount) {
  EXPECT_TLM_ERROR(tlm::VisibilityMatrix::Create(2, 3, std::nullopt, {1, 1, 1}),
                   ErrorCode::kDimensionMismatch);
}

TEST(VisibilityMatrix, RejectsGridThatDoesNotSquareToPoints) {
  EXPECT_TLM_ERROR(tlm::VisibilityMatrix::Create(1, 8, 3, std::vector<uint8_t>(8, 1)),
                   ErrorCode::kGridMismatch);
}

TEST(VisibilityMatrix, HiddenCountPerFrame) {
  auto vis = tlm::VisibilityMatrix::Create(2, 4, 2, {1, 0, 0, 1, 1, 1, 1, 1});
  EXPECT_EQ(vis.hidden_count(0), 2u);
  EXPECT_EQ(vis.hidden_count(1), 0u);
  EXPECT_FALSE(vis.visible(0, 1));
}

TEST(ValidateVisibility, RowCountMismatchNamesBothCounts) {
  const char* payload =
      R"({"frames":2,"points":1,"grid_size":null,"vis":[[true],[true],[false]]})";
  try {
    tlm::ValidateVisibility(std::string_view(payload));
    FAIL();
  } catch (const tlm::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
    EXPECT_NE(std::string(e.what()).find("frames=2 but 3 rows"), std::string::npos);
  }
}

TEST(ValidateVisibility, RejectsNumericFlags) {
  EXPECT_TLM_ERROR(
      tlm::ValidateVisibility(
          std::string_view(R"({"frames":1,"points":2,"vis":[[true,1]]})")),
      ErrorCode::kParse);
}

TEST(ValidateVisibility, RejectsRaggedRow) {
  EXPECT_TLM_ERROR(
      tlm::ValidateVisibility(std::string_view(
          R"({"frames":2,"points":2,"vis":[[true,true],[true]]})")),
      ErrorCode::kDimensionMismatch);
}

TEST(ValidateVisibility, SerializeRoundTrips) {
  auto vis = tlm::VisibilityMatrix::Create(3, 4, 2,
                                           {1, 1, 0, 1, 0, 0, 0, 0, 1, 1, 1, 1});
  EXPECT_EQ(tlm::ValidateVisibility(tlm::SerializeVisibility(vis)), vis);
  auto no_grid = tlm::VisibilityMatrix::Create(1, 3, std::nullopt, {1, 0, 1});
  EXPECT_EQ(tlm::ValidateVisibility(tlm::SerializeVisibility(no_grid)), no_grid);
}

TEST(MissingSeries, DeltasAreForwardDifferences) {
  tlm::MissingSeries s({0.0, 0.25, 0.75});
  ASSERT_EQ(s.deltas().size(), 2u);
  EXPECT_DOUBLE_EQ(s.deltas()[0], 0.25);
  EXPECT_DOUBLE_EQ(s.deltas()[1], 0.5);
  EXPECT_TRUE(tlm::MissingSeries({0.3}).deltas().empty());
}

TEST(MissingSeries, RejectsOutOfRange) {
  EXPECT_TLM_ERROR(tlm::MissingSeries({0.2, 1.5}), ErrorCode::kInvalidArgument);
  EXPECT_TLM_ERROR(tlm::MissingSeries({}), ErrorCode::kInvalidArgument);
}

TEST(RetrievalProfile, SplitsGeneralThenMetamorphic) {
  std::vector<double> p = {0.1, 0.1, 0.1, 0.1, 0.1, 0.0, 0.0, 0.2, 0.2, 0.1};
  auto profile = tlm::RetrievalProfile::FromSentenceProbs(p);
  EXPECT_NEAR(profile.gen_sum(), 0.5, 1e-15);
  EXPECT_NEAR(profile.meta_sum(), 0.5, 1e-15);
  EXPECT_TRUE(profile.normalized());
  EXPECT_EQ(tlm::RetrievalToJson(profile)["sentence_probs"].get<std::vector<double>>(), p);
}

TEST(RetrievalProfile, ScaledProfileIsNotNormalized) {
  auto profile = tlm::RetrievalProfile::Create({2, 2, 2, 2, 2}, {1, 1, 1, 1, 1});
  EXPECT_FALSE(profile.normalized());
}

TEST(RetrievalProfile, RejectsNegativeAndWrongCount) {
  EXPECT_TLM_ERROR(tlm::RetrievalProfile::Create({-0.1}, {1.1}),
                   ErrorCode::kInvalidArgument);
  std::vector<double> nine(9, 0.1);
  EXPECT_TLM_ERROR(tlm::RetrievalProfile::FromSentenceProbs(nine),
                   ErrorCode::kInvalidArgument);
}

TEST(BenchmarkEntry, PromptWordLimit) {
  tlm::BenchmarkEntry e{"id", "", "ref.mp4", "sunset", tlm::MajorCategory::kMeteorological};
  for (int i = 0; i < 77; ++i) e.prompt += "w ";
  EXPECT_NO_THROW(tlm::ValidateEntry(e));
  e.prompt += "extra";
  EXPECT_TLM_ERROR(tlm::ValidateEntry(e), ErrorCode::kInvalidArgument);
}

TEST(BenchmarkEntry, JsonRoundTrip) {
  tlm::BenchmarkEntry e{"physical-ice-melting-0", "Ice melts", "r.mp4",
                        "ice melting", tlm::MajorCategory::kPhysical};
  EXPECT_EQ(tlm::EntryFromJson(tlm::EntryToJson(e)), e);
  Json bad = tlm::EntryToJson(e);
  bad["major_category"] = "geological";
  EXPECT_TLM_ERROR(tlm::EntryFromJson(bad), ErrorCode::kInvalidArgument);
}

TEST(MakePromptId, SlugsSubCategory) {
  EXPECT_EQ(tlm::MakePromptId(tlm::MajorCategory::kHumanCreated,
                              "Building  Construction", 4),
            "human-created-building-construction-4");
}

TEST(EvaluationRecord, RangeChecks) {
  tlm::EvaluationRecord r{"m", "p", 0, 3.5, 0.4, 2.0, {}};
  EXPECT_NO_THROW(tlm::ValidateRecord(r));
  EXPECT_EQ(tlm::RecordFromJson(tlm::RecordToJson(r)), r);
  r.seed_index = 3;
  EXPECT_TLM_ERROR(tlm::ValidateRecord(r), ErrorCode::kInvalidArgument);
  r.seed_index = 0;
  r.mtscore = 1.2;
  EXPECT_TLM_ERROR(tlm::ValidateRecord(r), ErrorCode::kInvalidArgument);
  r.mtscore.reset();
  r.gpt4o_mtscore = 5.5;
  EXPECT_TLM_ERROR(tlm::ValidateRecord(r), ErrorCode::kInvalidArgument);
}

TEST(Frames, ReadsIndependentlyWrittenFile) {
  // tiny.tlf: 3 frames of 4x4x3 filled with 90, white at (1,1) in frame 1.
  auto seq = tlm::ReadFrames(testing_support::Fixture("videos/tiny.tlf"));
  EXPECT_EQ(seq.frame_count(), 3u);
  EXPECT_EQ(seq.height(), 4);
  EXPECT_EQ(seq.width(), 4);
  EXPECT_EQ(seq.channels(), 3);
  EXPECT_EQ(seq.frame(0)[0], 90);
  EXPECT_EQ(seq.frame(1)[(1 * 4 + 1) * 3 + 2], 255);
  EXPECT_EQ(seq.frame(1)[(1 * 4 + 2) * 3], 90);
}

TEST(Frames, WriteReadRoundTripAndSlice) {
  testing_support::TempDir dir("frames");
  std::vector<uint8_t> data(2 * 3 * 5 * 1);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<uint8_t>(i * 7);
  auto seq = tlm::FrameSequence::Create(3, 5, 1, 2, data);
  tlm::WriteFrames(dir / "x.tlf", seq);
  auto back = tlm::ReadFrames(dir / "x.tlf");
  EXPECT_EQ(back.data(), data);
  auto last = seq.Slice(1, 2);
  EXPECT_EQ(last.frame_count(), 1u);
  EXPECT_EQ(last.frame(0)[0], data[15]);
}

TEST(Frames, TruncatedFileIsRejected) {
  const auto path = testing_support::Fixture(
      "runs/model-b/meteorological-sunset-0/seed_2.tlf");
  EXPECT_TLM_ERROR(tlm::ReadFrameHeader(path), ErrorCode::kIo);
  EXPECT_TLM_ERROR(tlm::ReadFrames(path), ErrorCode::kIo);
}

TEST(Frames, ImageDirectoryDecodesAsRgb) {
  const auto dir = testing_support::Fixture(
      "runs/model-b/biological-plant-growth-0/seed_1");
  auto seq = tlm::ReadFrames(dir);
  EXPECT_EQ(seq.frame_count(), 8u);
  EXPECT_EQ(seq.height(), 20);
  EXPECT_EQ(seq.channels(), 3);
  EXPECT_EQ(tlm::ReadFrameHeader(dir).frame_count, 8u);
}

TEST(Frames, ImageChannelsComeBackInRgbOrder) {
  auto seq = tlm::ReadFrames(testing_support::Fixture("videos/rgb_png"));
  ASSERT_EQ(seq.frame_count(), 2u);
  const std::vector<uint8_t> first(seq.frame(0).begin(), seq.frame(0).end());
  EXPECT_EQ(first, (std::vector<uint8_t>{255, 0, 0, 0, 255, 0, 0, 0, 255}));
  EXPECT_EQ(seq.frame(1)[0], 127);
}

}  // namespace
