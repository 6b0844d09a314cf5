#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spx/detector_sim.hpp"
#include "spx/fringe_render.hpp"
#include "spx/sampling.hpp"
#include "spx/scene_gen.hpp"

namespace spx::data {

struct GenConfig {
  int size = 64;
  std::pair<double, double> angle_range{13.0, 17.0};
  std::pair<double, double> period_range{6.0, 8.0};
  std::pair<double, double> noise_range{0.04, 0.14};
  // Large enough that the depth range visibly bends the fringes at 64 px.
  double phase_gain = 10.0;
  sampling::ScanOrder order = sampling::ScanOrder::Raster;
  // Scene i gets rates[i % rates.size()]; the default yields a 1:1:2 mix.
  std::vector<double> rates{0.5, 0.25, 0.0625, 0.0625};
  double split_ratio = 0.85;
};

void validate(const GenConfig& cfg);

// Rect window with N = 1 / rate cells (vertical long edge).
sampling::WindowSet window_for_rate(double rate);

struct Sample {
  std::string id;
  scene::Split split = scene::Split::Train;
  double rate = 0.0;
  double period = 0.0;
  double angle = 0.0;
  Image depth;      // ground truth, [0, 1]
  Image fringe_hi;  // noise-free sinusoidal fringe
  Image scene;      // noisy binarized fringe seen by the detector
  Image lowres;     // rounded reorder of the detector trace
};

struct Dataset {
  scene::DatasetManifest manifest;
  std::vector<Sample> samples;  // manifest order
};

// Fills rate, period and angle of `entry` and renders its images.
Sample synthesize(scene::ManifestEntry& entry, const GenConfig& cfg, std::uint64_t seed);

Dataset generate(int count, const GenConfig& cfg, std::uint64_t seed);

std::vector<Sample> select(const std::vector<Sample>& samples, scene::Split split);

// Writes manifest.json plus depth/ fringe_hi/ fringe_lo/ PGMs under dir.
void write_dataset(const Dataset& dataset, const GenConfig& cfg, const std::filesystem::path& dir);

// Reads the manifest and its images; paths are relative to the manifest.
Dataset load_dataset(const std::filesystem::path& manifest_path);

}  // namespace spx::data
