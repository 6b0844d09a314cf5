#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spx/baseline.hpp"
#include "spx/sampling.hpp"

namespace spx::studies {

struct NyquistCase {
  int window_extent = 0;  // M of a 1 x M window
  sampling::NyquistRegime regime = sampling::NyquistRegime::Strict;
  int carrier_bin = 0;  // dominant row bin of the full-resolution carrier
  int sampled_bin = 0;  // dominant row bin of the low-res image
  Image lowres;

  int shift() const { return sampled_bin - carrier_bin; }
};

struct NyquistReport {
  double period = 0.0;
  int height = 0;
  int width = 0;
  Image carrier;
  std::vector<NyquistCase> cases;
};

// Smallest width >= 64 that every extent divides and that holds a whole
// number of periods (when the period is an integer).
int nyquist_width(double period, const std::vector<int>& extents);

// Binarized vertical carrier of period T sampled by 1 x M windows and
// reordered in rounded mode. width 0 picks nyquist_width().
NyquistReport nyquist_study(double period, const std::vector<int>& extents, int height = 8, int width = 0);

struct PatternComparison {
  double rate = 0.0;
  int measurements = 0;  // per scene, both schemes
  double active_ssim = 0.0;
  double random_ssim = 0.0;  // best candidate
  std::string random_method;
  std::vector<double> active_per_scene;
  std::vector<double> random_per_scene;
};

// Scenes are detector inputs, truths what the reconstruction is scored
// against. Active: window for `rate`, rounded reorder, nearest upsample.
// Random: matched-count Bernoulli(0.5) masks, best linear candidate by mean
// SSIM.
PatternComparison compare_patterns(const std::vector<Image>& scenes, const std::vector<Image>& truths, double rate,
                                   std::uint64_t seed, sampling::ScanOrder order = sampling::ScanOrder::Raster,
                                   const std::vector<baseline::Candidate>& candidates = {});

}  // namespace spx::studies
