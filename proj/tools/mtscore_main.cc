// mtscore --profile profile.json
//
// Reads {"sentence_probs": [p1..p10]} and prints the coarse metamorphic score
// together with the general/metamorphic vote (normalized profiles only).

#include <iostream>

#include <CLI11.hpp>

#include "tlm/error.h"
#include "tlm/json_io.h"
#include "tlm/mtscore.h"

int main(int argc, char** argv) {
  CLI::App app{"Coarse metamorphic score from retrieval probabilities"};
  std::string profile_path;
  app.add_option("--profile", profile_path, "Retrieval payload JSON")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto profile =
        tlm::ValidateRetrievalPayload(tlm::ParseJson(tlm::ReadFile(profile_path)));
    tlm::Json out{{"mtscore", tlm::MTScoreCoarse(profile)},
                  {"normalized", profile.normalized()},
                  {"class", nullptr}};
    if (profile.normalized()) {
      out["class"] = tlm::VideoClassName(tlm::ClassifyVideo(profile));
    }
    std::cout << out.dump() << "\n";
  } catch (const tlm::Error& e) {
    std::cerr << "mtscore: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
