#include "spx/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "spx/rng.hpp"

namespace spx::scene {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr std::size_t kMinDim = 8;

void check_dims(std::size_t height, std::size_t width) {
  if (height < kMinDim || width < kMinDim)
    throw Error(ErrorKind::Parameter, "depth map dimensions must be at least 8x8");
}

// Value of a single (non-composite) primitive at pixel (x, y).
double primitive_value(const SceneSpec& s, double x, double y, std::size_t height,
                       std::size_t width) {
  const double dx = x - s.center_x;
  const double dy = y - s.center_y;
  switch (s.kind) {
    case PrimitiveKind::GaussianBump:
      return s.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * s.radius * s.radius));
    case PrimitiveKind::Hemisphere: {
      const double h2 = s.radius * s.radius - (dx * dx + dy * dy);
      return s.amplitude * std::sqrt(std::max(0.0, h2)) / s.radius;
    }
    case PrimitiveKind::Ramp: {
      // Linear along the pose direction across the image; at pose 0 the
      // value at column x is x / (W - 1).
      const double theta = s.pose_deg * kDegToRad;
      const double xc = 0.5 * static_cast<double>(width - 1);
      const double yc = 0.5 * static_cast<double>(height - 1);
      double u;
      if (s.pose_deg == 0.0) {
        u = x / static_cast<double>(width - 1);
      } else {
        u = 0.5 + ((x - xc) * std::cos(theta) + (y - yc) * std::sin(theta)) /
                      static_cast<double>(width - 1);
      }
      return s.amplitude * std::clamp(u, 0.0, 1.0);
    }
    case PrimitiveKind::PolyhedralHeightfield: {
      const int facets = std::max(3, s.count);
      const double theta = s.pose_deg * kDegToRad;
      double reach = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < facets; ++k) {
        const double a = theta + 2.0 * std::numbers::pi * k / facets;
        reach = std::max(reach, dx * std::cos(a) + dy * std::sin(a));
      }
      return s.amplitude * std::clamp(1.0 - reach / s.radius, 0.0, 1.0);
    }
    case PrimitiveKind::Composite:
      break;
  }
  throw Error(ErrorKind::Parameter, "composite has no single-primitive value");
}

// Members are spread around the composite center within its radius and rotate
// with the composite pose.
std::vector<SceneSpec> composite_members(const SceneSpec& s) {
  std::mt19937_64 rng(derive_seed(s.seed, 0xC0u));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SceneSpec> members;
  members.reserve(static_cast<std::size_t>(s.count));
  const double theta = s.pose_deg * kDegToRad;
  for (int i = 0; i < s.count; ++i) {
    SceneSpec m;
    const double pick = unit(rng);
    m.kind = pick < 0.4   ? PrimitiveKind::GaussianBump
             : pick < 0.75 ? PrimitiveKind::Hemisphere
                           : PrimitiveKind::PolyhedralHeightfield;
    const double r = s.radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng) + theta;
    m.center_x = s.center_x + 0.6 * r * std::cos(phi);
    m.center_y = s.center_y + 0.6 * r * std::sin(phi);
    m.radius = s.radius * (0.25 + 0.35 * unit(rng));
    m.amplitude = s.amplitude * (0.4 + 0.6 * unit(rng));
    m.count = 3 + static_cast<int>(unit(rng) * 4.0);
    m.pose_deg = s.pose_deg + 360.0 * unit(rng);
    members.push_back(m);
  }
  return members;
}

}  // namespace

DepthMap::DepthMap(Grid<double> values) : values_(std::move(values)) {
  check_dims(values_.height(), values_.width());
  for (double v : values_.values()) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw Error(ErrorKind::Parameter, "depth values must be finite and in [0, 1]");
  }
}

std::string_view to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::GaussianBump: return "gaussian-bump";
    case PrimitiveKind::Hemisphere: return "hemisphere";
    case PrimitiveKind::Ramp: return "ramp";
    case PrimitiveKind::PolyhedralHeightfield: return "polyhedral-heightfield";
    case PrimitiveKind::Composite: return "composite";
  }
  return "unknown";
}

PrimitiveKind primitive_from_string(std::string_view name) {
  for (auto k : {PrimitiveKind::GaussianBump, PrimitiveKind::Hemisphere, PrimitiveKind::Ramp,
                 PrimitiveKind::PolyhedralHeightfield, PrimitiveKind::Composite}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::Parameter, "unknown primitive kind '" + std::string(name) + "'");
}

void validate(const SceneSpec& spec) {
  if (!(spec.amplitude > 0.0 && spec.amplitude <= 1.0))
    throw Error(ErrorKind::Parameter, "amplitude must be in (0, 1]");
  if (!(spec.radius > 0.0)) throw Error(ErrorKind::Parameter, "radius must be positive");
  if (spec.count < 1) throw Error(ErrorKind::Parameter, "count must be at least 1");
  if (!std::isfinite(spec.center_x) || !std::isfinite(spec.center_y) ||
      !std::isfinite(spec.pose_deg))
    throw Error(ErrorKind::Parameter, "center and pose must be finite");
}

DepthMap gen_scene(const SceneSpec& spec, std::size_t height, std::size_t width) {
  validate(spec);
  check_dims(height, width);
  Grid<double> out(height, width, 0.0);
  if (spec.kind == PrimitiveKind::Composite) {
    for (const auto& m : composite_members(spec)) {
      for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c) {
          const double v = primitive_value(m, static_cast<double>(c), static_cast<double>(r),
                                           height, width);
          out(r, c) = std::max(out(r, c), std::clamp(v, 0.0, 1.0));
        }
    }
  } else {
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < width; ++c)
        out(r, c) = std::clamp(primitive_value(spec, static_cast<double>(c),
                                               static_cast<double>(r), height, width),
                               0.0, 1.0);
  }
  return DepthMap(std::move(out));
}

std::vector<SceneSpec> augment_pose(const SceneSpec& spec, int count, std::uint64_t seed,
                                    double jitter_px) {
  if (count < 1) throw Error(ErrorKind::Parameter, "pose count must be at least 1");
  validate(spec);
  std::vector<SceneSpec> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    SceneSpec s = spec;
    s.pose_deg = 0.0;
    out.push_back(s);
    return out;
  }
  std::mt19937_64 rng(derive_seed(seed, 0xA9u));
  std::uniform_real_distribution<double> jitter(-jitter_px, jitter_px);
  const double step = 360.0 / count;
  for (int i = 0; i < count; ++i) {
    SceneSpec s = spec;
    s.pose_deg = step * i;
    s.center_x += jitter(rng);
    s.center_y += jitter(rng);
    s.seed = derive_seed(spec.seed, 0xA9u, static_cast<std::uint64_t>(i));
    out.push_back(s);
  }
  return out;
}

SceneSpec random_spec(std::uint64_t seed, std::size_t height, std::size_t width) {
  std::mt19937_64 rng(derive_seed(seed, 0x5Cu));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = static_cast<double>(height - 1);
  const double w = static_cast<double>(width - 1);
  const double extent = static_cast<double>(std::min(height, width));
  SceneSpec s;
  const double pick = unit(rng);
  s.kind = pick < 0.2   ? PrimitiveKind::GaussianBump
           : pick < 0.4 ? PrimitiveKind::Hemisphere
           : pick < 0.5 ? PrimitiveKind::Ramp
           : pick < 0.7 ? PrimitiveKind::PolyhedralHeightfield
                        : PrimitiveKind::Composite;
  s.center_x = w * (0.3 + 0.4 * unit(rng));
  s.center_y = h * (0.3 + 0.4 * unit(rng));
  s.radius = extent * (0.2 + 0.2 * unit(rng));
  s.amplitude = 0.5 + 0.5 * unit(rng);
  s.count = s.kind == PrimitiveKind::Composite ? 2 + static_cast<int>(unit(rng) * 3.0)
                                               : 3 + static_cast<int>(unit(rng) * 4.0);
  s.pose_deg = 0.0;
  s.seed = rng();
  return s;
}

std::string_view to_string(Split split) { return split == Split::Train ? "train" : "test"; }

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  throw Error(ErrorKind::Parameter, "unknown split '" + std::string(name) + "'");
}

std::size_t DatasetManifest::count(Split split) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [split](const auto& e) { return e.split == split; }));
}

DatasetManifest build_manifest(const std::vector<SceneSpec>& specs, double split_ratio,
                               std::uint64_t seed) {
  if (specs.empty()) throw Error(ErrorKind::Parameter, "manifest needs at least one scene");
  if (!(split_ratio > 0.0 && split_ratio < 1.0))
    throw Error(ErrorKind::Parameter, "split ratio must be in (0, 1)");
  for (const auto& s : specs) validate(s);

  std::vector<std::size_t> order(specs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(derive_seed(seed, 0x5Bu));
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train =
      static_cast<std::size_t>(std::floor(static_cast<double>(specs.size()) * split_ratio));
  DatasetManifest m;
  m.split_ratio = split_ratio;
  m.seed = seed;
  m.entries.reserve(specs.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    ManifestEntry e;
    char id[32];
    std::snprintf(id, sizeof id, "scene_%05zu", order[k]);
    e.scene_id = id;
    e.index = order[k];
    e.spec = specs[order[k]];
    e.split = k < n_train ? Split::Train : Split::Test;
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace spx::scene
