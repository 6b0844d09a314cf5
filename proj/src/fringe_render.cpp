#include "spx/fringe_render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace spx::fringe {

void validate(const ProjectionGeometry& geom) {
  if (!(geom.angle_deg > 0.0 && geom.angle_deg < 90.0))
    throw Error(ErrorKind::Geometry, "projection angle must be in (0, 90) degrees");
  if (!(geom.period_px >= 2.0)) throw Error(ErrorKind::Geometry, "fringe period must be >= 2 px");
  if (!(geom.phase_gain > 0.0)) throw Error(ErrorKind::Geometry, "phase gain must be positive");
}

FringeImage render_sinusoid(const scene::DepthMap& depth, const ProjectionGeometry& geom) {
  validate(geom);
  const double k = 2.0 * std::numbers::pi / geom.period_px;
  const double shift_per_depth = geom.phase_gain * std::tan(geom.angle_deg * std::numbers::pi / 180.0);
  Image out(depth.height(), depth.width());
  for (std::size_t r = 0; r < depth.height(); ++r) {
    for (std::size_t c = 0; c < depth.width(); ++c) {
      const double phase = k * static_cast<double>(c) + k * shift_per_depth * depth(r, c);
      out(r, c) = std::clamp(0.5 + 0.5 * std::cos(phase), 0.0, 1.0);
    }
  }
  return {std::move(out), FringeKind::Sinusoidal};
}

FringeImage binarize(const FringeImage& fringe, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(ErrorKind::Parameter, "binarize threshold must be in (0, 1)");
  if (fringe.kind == FringeKind::Binary) return fringe;
  Image out(fringe.height(), fringe.width());
  auto src = fringe.values.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= threshold ? 1.0 : 0.0;
  return {std::move(out), FringeKind::Binary};
}

FringeImage add_noise(const FringeImage& image, const NoiseSpec& noise) {
  if (!(noise.low >= 0.0 && noise.low <= noise.high && noise.high < 1.0))
    throw Error(ErrorKind::Parameter, "noise range must satisfy 0 <= low <= high < 1");
  if (noise.high == 0.0) return image;
  std::mt19937_64 rng(noise.seed);
  const double a = std::uniform_real_distribution<double>(noise.low, noise.high)(rng);
  FringeImage out = image;
  if (a == 0.0) return out;
  std::uniform_real_distribution<double> dev(-a, a);
  for (double& v : out.values.values()) v = std::clamp(v + dev(rng), 0.0, 1.0);
  return out;
}

double sample_angle(std::pair<double, double> range_deg, std::uint64_t seed) {
  const auto [low, high] = range_deg;
  if (low > high) throw Error(ErrorKind::Parameter, "angle range is inverted");
  if (!(low > 0.0 && high < 90.0))
    throw Error(ErrorKind::Parameter, "angle range must lie in (0, 90) degrees");
  if (low == high) return low;
  std::mt19937_64 rng(seed);
  return std::uniform_real_distribution<double>(low, high)(rng);
}

double sample_period(std::pair<double, double> range_px, std::uint64_t seed) {
  const auto [low, high] = range_px;
  if (low > high) throw Error(ErrorKind::Parameter, "period range is inverted");
  if (!(low >= 2.0)) throw Error(ErrorKind::Parameter, "period must be >= 2 px");
  if (low == high) return low;
  std::mt19937_64 rng(seed);
  return std::uniform_real_distribution<double>(low, high)(rng);
}

}  // namespace spx::fringe
