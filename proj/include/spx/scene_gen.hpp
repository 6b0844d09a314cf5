#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spx/grid.hpp"

namespace spx::scene {

// Normalized depth in [0, 1], at least 8x8.
class DepthMap {
public:
  DepthMap() = default;
  explicit DepthMap(Grid<double> values);

  std::size_t height() const noexcept { return values_.height(); }
  std::size_t width() const noexcept { return values_.width(); }
  double operator()(std::size_t row, std::size_t col) const { return values_(row, col); }
  const Grid<double>& grid() const noexcept { return values_; }

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

private:
  Grid<double> values_;
};

enum class PrimitiveKind { GaussianBump, Hemisphere, Ramp, PolyhedralHeightfield, Composite };

std::string_view to_string(PrimitiveKind kind);
PrimitiveKind primitive_from_string(std::string_view name);

// Geometry is in pixel units. `count` is the facet count of a polyhedral
// heightfield (min 3 facets) and the member count of a composite.
struct SceneSpec {
  PrimitiveKind kind = PrimitiveKind::GaussianBump;
  double center_x = 31.5;
  double center_y = 31.5;
  double radius = 16.0;
  double amplitude = 1.0;
  int count = 1;
  double pose_deg = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

void validate(const SceneSpec& spec);

DepthMap gen_scene(const SceneSpec& spec, std::size_t height, std::size_t width);

// `count` copies with pose stepped by 360/count degrees and centers jittered
// by up to `jitter_px` pixels per axis. The first variant keeps the original
// center and pose 0 when count == 1.
std::vector<SceneSpec> augment_pose(const SceneSpec& spec, int count, std::uint64_t seed,
                                    double jitter_px = 2.0);

// Random scene description for dataset generation, sized for height x width.
SceneSpec random_spec(std::uint64_t seed, std::size_t height, std::size_t width);

enum class Split { Train, Test };
std::string_view to_string(Split split);
Split split_from_string(std::string_view name);

struct ManifestEntry {
  std::string scene_id;
  std::size_t index = 0;  // position in the generating spec list
  SceneSpec spec;
  std::string depth_path;
  std::string fringe_hi_path;
  std::string fringe_lo_path;
  double rate = 0.0;
  double period = 0.0;
  double angle = 0.0;
  Split split = Split::Train;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  double split_ratio = 0.85;
  std::uint64_t seed = 0;

  std::size_t count(Split split) const;
};

DatasetManifest build_manifest(const std::vector<SceneSpec>& specs, double split_ratio,
                               std::uint64_t seed);

}  // namespace spx::scene
