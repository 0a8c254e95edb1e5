// Stand-in external scorer for tests.
//
//   fixture_scorer MODE RGB JET NORMAL OUT
//
// Modes:
//   color       class 1 where red > blue, class 5 elsewhere, background on black
//   uniform     every score 1
//   wide        uniform, but one column too many
//   channels    uniform with 8 channels
//   garbage     writes a non-SPSC file
//   silent      exits 0 without writing
//   fail        exits 4
//   sleep       sleeps 30 s

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "projseg/raster_io.hpp"
#include "projseg/scoring.hpp"

int main(int argc, char** argv) {
  if (argc != 6) {
    std::cerr << "usage: fixture_scorer MODE RGB JET NORMAL OUT\n";
    return 64;
  }
  const std::string mode = argv[1];
  const std::string out = argv[5];
  if (mode == "fail") return 4;
  if (mode == "silent") return 0;
  if (mode == "sleep") {
    std::this_thread::sleep_for(std::chrono::seconds(30));
    return 0;
  }
  if (mode == "garbage") {
    std::ofstream(out) << "not scores";
    return 0;
  }

  const auto rgb = projseg::load_png(argv[2]);
  projseg::load_png(argv[3]);
  projseg::load_png(argv[4]);
  const int channels = mode == "channels" ? 8 : projseg::kScoreChannels;
  const int width = rgb.width() + (mode == "wide" ? 1 : 0);
  projseg::ScoreMap scores(rgb.height(), width, channels, 1.0f);
  if (mode == "color") {
    for (std::size_t p = 0; p < rgb.pixel_count(); ++p) {
      const auto px = rgb.pixel(p);
      for (int c = 0; c < channels; ++c) scores.at(p, c) = 0.0f;
      if (px[0] == 0 && px[1] == 0 && px[2] == 0) {
        scores.at(p, projseg::kBackgroundChannel) = 1.0f;
      } else {
        scores.at(p, px[0] > px[2] ? 0 : 4) = 1.0f;
      }
    }
  } else if (mode != "uniform" && mode != "wide" && mode != "channels") {
    std::cerr << "unknown mode " << mode << "\n";
    return 64;
  }
  projseg::save_scores(out, scores);
  return 0;
}
