#pragma once

#include <cstdint>
#include <utility>

#include "spx/grid.hpp"
#include "spx/scene_gen.hpp"

namespace spx::fringe {

// Projector/camera geometry for the vertical-fringe forward model.
struct ProjectionGeometry {
  double angle_deg = 15.0;  // projector-camera angle A, in (0, 90)
  double period_px = 8.0;   // fringe period T on the reference plane, >= 2
  double phase_gain = 1.0;  // g, lateral shift per unit depth per tan(A)
};

void validate(const ProjectionGeometry& geom);

enum class FringeKind { Sinusoidal, Binary };

struct FringeImage {
  Image values;
  FringeKind kind = FringeKind::Sinusoidal;

  std::size_t height() const noexcept { return values.height(); }
  std::size_t width() const noexcept { return values.width(); }
  double operator()(std::size_t r, std::size_t c) const { return values(r, c); }
  friend bool operator==(const FringeImage&, const FringeImage&) = default;
};

struct NoiseSpec {
  double low = 0.04;
  double high = 0.14;
  std::uint64_t seed = 0;
};

// I(x, y) = 0.5 + 0.5 cos(2 pi x / T + 2 pi g d(x, y) tan(A) / T).
FringeImage render_sinusoid(const scene::DepthMap& depth, const ProjectionGeometry& geom);

// 1 where value >= threshold, else 0. Binary inputs pass through unchanged.
FringeImage binarize(const FringeImage& fringe, double threshold = 0.5);

// One amplitude a ~ U[low, high] per image, per-pixel additive U[-a, a],
// clamped to [0, 1]. Kind is preserved as a tag only.
FringeImage add_noise(const FringeImage& image, const NoiseSpec& noise);

double sample_angle(std::pair<double, double> range_deg, std::uint64_t seed);

// Period drawn uniformly from [low, high] pixels.
double sample_period(std::pair<double, double> range_px, std::uint64_t seed);

}  // namespace spx::fringe
