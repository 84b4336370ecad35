// gptscore --video clip.tlf --frames T --backend <endpoint>
//
// Samples T frames uniformly, sends them with the five-level rubric to the
// rubric backend and prints the parsed 1-5 score.

#include <iostream>

#include <CLI11.hpp>

#include "tlm/error.h"
#include "tlm/frames.h"
#include "tlm/mtscore.h"
#include "tlm/protocol.h"

int main(int argc, char** argv) {
  CLI::App app{"LLM-judged metamorphic score"};
  std::string video;
  std::string endpoint;
  std::string token;
  tlm::GPTScoreConfig config;
  long long deadline_ms = config.deadline.count();

  app.add_option("--video", video, "Raw frame file or image directory")
      ->required();
  app.add_option("--frames", config.sample_count, "Frames to sample")
      ->capture_default_str();
  app.add_option("--backend", endpoint, "stdio:<cmd> or http://host:port/path")
      ->required();
  app.add_option("--max-retries", config.max_retries)->capture_default_str();
  app.add_option("--deadline-ms", deadline_ms)->capture_default_str();
  app.add_option("--token", token, "Bearer token for HTTP backends");
  CLI11_PARSE(app, argc, argv);
  config.deadline = std::chrono::milliseconds(deadline_ms);

  try {
    const auto header = tlm::ReadFrameHeader(video);
    auto backend = tlm::ConnectBackend(endpoint, token);
    std::cout << tlm::GptMtScore(*backend, video, header.frame_count, config)
              << "\n";
  } catch (const tlm::Error& e) {
    std::cerr << "gptscore: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
