// curate split|merge|filter|caption
//
// Clip manifests are JSON lines:
//   {"video": path, "clip_index": i, "start": s, "end": e, ...}
// Boundary features for merge are JSON lines:
//   {"clip_index": i, "position": "first"|"last", "embedding": [...]}
// Retrieval profiles for filter are JSON lines:
//   {"clip_index": i, "sentence_probs": [p1..p10]}

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "tlm/curation.h"
#include "tlm/error.h"
#include "tlm/frames.h"
#include "tlm/json_io.h"
#include "tlm/mtscore.h"

namespace {

using tlm::Json;

std::vector<Json> ReadJsonLines(const std::string& path) {
  std::vector<Json> out;
  const std::string text = tlm::ReadFile(path);
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(start, nl - start);
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      out.push_back(tlm::ParseJson(line));
    }
    start = nl + 1;
  }
  return out;
}

void Emit(const std::string& path, const std::vector<Json>& lines) {
  std::string out;
  for (const auto& j : lines) out += j.dump() + "\n";
  if (path.empty() || path == "-") {
    std::cout << out;
  } else {
    tlm::WriteFile(path, out);
  }
}

struct ClipManifest {
  std::string video;
  std::vector<Json> lines;
  tlm::ClipBoundary boundary = tlm::ClipBoundary::Single(1);
};

ClipManifest LoadClips(const std::string& path) {
  ClipManifest m;
  m.lines = ReadJsonLines(path);
  if (m.lines.empty()) {
    throw tlm::Error(tlm::ErrorCode::kInvalidArgument, "clip manifest is empty");
  }
  std::vector<tlm::Clip> clips;
  for (const auto& j : m.lines) {
    const auto video = j.at("video").get<std::string>();
    if (m.video.empty()) m.video = video;
    if (video != m.video) {
      throw tlm::Error(tlm::ErrorCode::kInvalidArgument,
                       "clip manifest mixes videos");
    }
    clips.push_back({j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()});
  }
  m.boundary = tlm::ClipBoundary::Create(clips, clips.back().end);
  return m;
}

std::vector<Json> ClipLines(const std::string& video,
                            const std::vector<tlm::Clip>& clips) {
  std::vector<Json> out;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    out.push_back(Json{{"video", video},
                       {"clip_index", i},
                       {"start", clips[i].start},
                       {"end", clips[i].end}});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-lapse curation pipeline"};
  app.require_subcommand(1);

  std::string frames_path, clips_path, features_path, profiles_path, out_path;
  std::string endpoint, summarize_endpoint, token;
  tlm::CurationConfig config;
  long long deadline_ms = tlm::kDefaultDeadline.count();

  auto* split = app.add_subcommand("split", "Cut a video at pixel transitions");
  split->add_option("--frames", frames_path, "Raw frame file or image directory")
      ->required();
  split->add_option("--tau", config.tau_per_pixel,
                    "Mean per-sample difference that marks a cut")
      ->capture_default_str();
  split->add_option("--out", out_path, "Clip manifest (default stdout)");

  auto* merge = app.add_subcommand("merge", "Re-join clips with close boundary embeddings");
  merge->add_option("--clips", clips_path)->required();
  merge->add_option("--features", features_path)->required();
  merge->add_option("--eta", config.eta)->capture_default_str();
  merge->add_option("--out", out_path);

  auto* filter = app.add_subcommand("filter", "Keep clips voted metamorphic");
  filter->add_option("--clips", clips_path)->required();
  auto* profiles_opt = filter->add_option("--profiles", profiles_path);
  auto* backend_opt = filter->add_option("--backend", endpoint);
  profiles_opt->excludes(backend_opt);
  filter->add_option("--out", out_path);

  auto* caption = app.add_subcommand("caption", "Time-aware clip captions");
  caption->add_option("--clips", clips_path)->required();
  caption->add_option("--backend", endpoint, "Frame captioner")->required();
  caption->add_option("--summarize-backend", summarize_endpoint,
                      "Summarizer (defaults to --backend)");
  caption->add_option("--n", config.caption_frames, "Frames per clip")
      ->capture_default_str();
  caption->add_option("--out", out_path);

  for (auto* sub : {filter, caption}) {
    sub->add_option("--token", token, "Bearer token for HTTP backends");
    sub->add_option("--deadline-ms", deadline_ms)->capture_default_str();
  }
  CLI11_PARSE(app, argc, argv);
  const tlm::Deadline deadline(deadline_ms);

  try {
    if (*split) {
      const auto frames = tlm::ReadFrames(frames_path);
      const auto diffs = tlm::FrameDiffSeries(frames);
      const double tau = tlm::TransitionThreshold(
          config.tau_per_pixel, frames.height(), frames.width(), frames.channels());
      const auto boundary = tlm::SplitOnTransitions(diffs, tau);
      Emit(out_path, ClipLines(frames_path, boundary.clips()));
    } else if (*merge) {
      const auto manifest = LoadClips(clips_path);
      std::vector<tlm::ClipFeature> features;
      for (const auto& j : ReadJsonLines(features_path)) {
        const auto pos = j.at("position").get<std::string>();
        if (pos != "first" && pos != "last") {
          throw tlm::Error(tlm::ErrorCode::kParse,
                           "position must be \"first\" or \"last\"");
        }
        features.push_back({j.at("clip_index").get<std::size_t>(),
                            pos == "first" ? tlm::BoundaryPosition::kFirst
                                           : tlm::BoundaryPosition::kLast,
                            j.at("embedding").get<std::vector<double>>()});
      }
      const auto merged =
          tlm::MergeSimilarClips(manifest.boundary, features, config.eta);
      Emit(out_path, ClipLines(manifest.video, merged.clips()));
    } else if (*filter) {
      const auto manifest = LoadClips(clips_path);
      const auto& clips = manifest.boundary.clips();
      std::vector<tlm::RetrievalProfile> profiles;
      if (!profiles_path.empty()) {
        std::map<std::size_t, tlm::RetrievalProfile> by_clip;
        for (const auto& j : ReadJsonLines(profiles_path)) {
          by_clip.emplace(j.at("clip_index").get<std::size_t>(),
                          tlm::ValidateRetrievalPayload(j));
        }
        for (std::size_t i = 0; i < clips.size(); ++i) {
          auto it = by_clip.find(i);
          if (it == by_clip.end()) {
            throw tlm::Error(tlm::ErrorCode::kNotFound,
                             "no retrieval profile for clip " + std::to_string(i));
          }
          profiles.push_back(it->second);
        }
      } else if (!endpoint.empty()) {
        auto backend = tlm::ConnectBackend(endpoint, token);
        for (const auto& c : clips) {
          profiles.push_back(tlm::RetrieveVideo(
              *backend, manifest.video, tlm::FrameRange{c.start, c.end}, deadline));
        }
      } else {
        throw tlm::Error(tlm::ErrorCode::kInvalidArgument,
                         "filter needs --profiles or --backend");
      }
      const auto kept = tlm::FilterMetamorphic(clips, profiles);
      std::vector<Json> lines;
      for (std::size_t i = 0, k = 0; i < clips.size() && k < kept.size(); ++i) {
        if (clips[i] == kept[k]) {
          Json line = manifest.lines[i];
          line["mtscore"] = tlm::MTScoreCoarse(profiles[i]);
          lines.push_back(std::move(line));
          ++k;
        }
      }
      Emit(out_path, lines);
    } else if (*caption) {
      const auto manifest = LoadClips(clips_path);
      auto captioner = tlm::ConnectBackend(endpoint, token);
      std::unique_ptr<tlm::Backend> summarizer;
      if (!summarize_endpoint.empty()) {
        summarizer = tlm::ConnectBackend(summarize_endpoint, token);
      }
      tlm::CaptionOptions options;
      options.frame_count = config.caption_frames;
      options.deadline = deadline;
      std::vector<Json> lines;
      const auto& clips = manifest.boundary.clips();
      for (std::size_t i = 0; i < clips.size(); ++i) {
        Json line = manifest.lines[i];
        line["caption"] = tlm::CaptionClip(
            *captioner, summarizer ? *summarizer : *captioner, manifest.video,
            clips[i], options);
        lines.push_back(std::move(line));
      }
      Emit(out_path, lines);
    }
  } catch (const tlm::Error& e) {
    std::cerr << "curate: " << e.what() << "\n";
    return 1;
  } catch (const tlm::Json::exception& e) {
    std::cerr << "curate: malformed input: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
