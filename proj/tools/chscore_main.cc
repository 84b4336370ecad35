// chscore --vis payload.json [--threshold T] [--epsilon E] [--raw-max]
//         [--report out.json]
//
// Prints the coherence score; the optional report also carries the five
// components and the per-frame missed-point series.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "tlm/chscore.h"
#include "tlm/error.h"
#include "tlm/json_io.h"

int main(int argc, char** argv) {
  CLI::App app{"Temporal coherence score from tracker visibility"};
  std::string vis_path;
  std::string report_path;
  tlm::CHScoreConfig config;
  bool raw_max = false;

  app.add_option("--vis", vis_path, "Visibility payload JSON")->required();
  app.add_option("--threshold", config.threshold,
                 "Missed-fraction jump counted as a cut")
      ->capture_default_str();
  app.add_option("--epsilon", config.epsilon, "Added to the denominator")
      ->capture_default_str();
  app.add_flag("--raw-max", raw_max,
               "Do not clamp the largest delta at zero");
  app.add_option("--report", report_path, "Write a JSON report here");
  CLI11_PARSE(app, argc, argv);
  config.clamp_negative_max = !raw_max;

  try {
    const auto vis = tlm::ValidateVisibility(tlm::ReadFile(vis_path));
    const auto result = tlm::CHScoreFromVisibility(vis, config);
    std::printf("%.10g\n", result.score);
    if (!report_path.empty()) {
      const auto& c = result.components;
      tlm::Json report{
          {"score", result.score},
          {"components",
           {{"r_missed", c.r_missed},
            {"v_missed", c.v_missed},
            {"r_cut", c.r_cut},
            {"c_missed", c.c_missed},
            {"m_missed", c.m_missed}}},
          {"series",
           {{"missing", result.series.missing()},
            {"deltas", result.series.deltas()}}},
          {"config",
           {{"threshold", config.threshold},
            {"epsilon", config.epsilon},
            {"clamp_negative_max", config.clamp_negative_max}}},
          {"frames", vis.frames()},
          {"points", vis.points()},
      };
      tlm::WriteFile(report_path, report.dump(2) + "\n");
    }
  } catch (const tlm::Error& e) {
    std::cerr << "chscore: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
