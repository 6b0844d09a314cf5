#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "spx/scene_gen.hpp"

using namespace spx;
using namespace spx::scene;

namespace {

SceneSpec spec_of(PrimitiveKind kind) {
  SceneSpec s;
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("gaussian bump peaks at its center") {
  auto s = spec_of(PrimitiveKind::GaussianBump);
  s.center_x = 20.0;
  s.center_y = 12.0;
  s.radius = 1e9;
  const auto d = gen_scene(s, 32, 40);
  CHECK(d(12, 20) == 1.0);
  // Huge radius: every pixel within rounding of 1.
  for (double v : d.grid().values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ramp at pose 0 equals x / (W - 1)") {
  const auto d = gen_scene(spec_of(PrimitiveKind::Ramp), 10, 37);
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t c = 0; c < 37; ++c) CHECK(d(r, c) == static_cast<double>(c) / 36.0);
}

TEST_CASE("hemisphere matches per-pixel closed form") {
  auto s = spec_of(PrimitiveKind::Hemisphere);
  s.center_x = 17.25;
  s.center_y = 30.5;
  s.radius = 11.0;
  const auto d = gen_scene(s, 48, 40);
  for (std::size_t r = 0; r < 48; ++r) {
    for (std::size_t c = 0; c < 40; ++c) {
      const double px = static_cast<double>(c) - 17.25;
      const double py = static_cast<double>(r) - 30.5;
      const double z = std::sqrt(std::max(0.0, 121.0 - (px * px + py * py))) / 11.0;
      CHECK(d(r, c) == doctest::Approx(z).epsilon(1e-15));
    }
  }
}

TEST_CASE("invalid specs are rejected") {
  auto s = spec_of(PrimitiveKind::GaussianBump);
  s.amplitude = 0.0;
  CHECK_THROWS_AS(gen_scene(s, 16, 16), Error);
  s.amplitude = 1.5;
  CHECK_THROWS_AS(gen_scene(s, 16, 16), Error);
  s = spec_of(PrimitiveKind::Hemisphere);
  s.radius = 0.0;
  CHECK_THROWS_AS(gen_scene(s, 16, 16), Error);
  s = spec_of(PrimitiveKind::Composite);
  s.count = 0;
  CHECK_THROWS_AS(gen_scene(s, 16, 16), Error);
  try {
    gen_scene(spec_of(PrimitiveKind::Ramp), 7, 16);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parameter);
  }
}

TEST_CASE("depth map rejects out-of-range values") {
  CHECK_THROWS_AS(DepthMap(Image(8, 8, 1.5)), Error);
  CHECK_THROWS_AS(DepthMap(Image(8, 8, std::nan(""))), Error);
  CHECK_NOTHROW(DepthMap(Image(8, 8, 0.0)));
}

TEST_CASE("random specs generate in range and deterministically") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto s = random_spec(seed, 64, 64);
    const auto a = gen_scene(s, 64, 64);
    const auto b = gen_scene(s, 64, 64);
    CHECK(a == b);
    for (double v : a.grid().values()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("composite is the clamped max of its members") {
  auto s = spec_of(PrimitiveKind::Composite);
  s.count = 3;
  s.seed = 99;
  const auto d = gen_scene(s, 64, 64);
  double peak = 0.0;
  for (double v : d.grid().values()) peak = std::max(peak, v);
  CHECK(peak > 0.0);
  CHECK(peak <= 1.0);
}

TEST_CASE("augment_pose steps the angle uniformly") {
  const auto base = spec_of(PrimitiveKind::PolyhedralHeightfield);
  const auto poses = augment_pose(base, 48, 3);
  REQUIRE(poses.size() == 48);
  for (std::size_t i = 0; i < poses.size(); ++i) CHECK(poses[i].pose_deg == doctest::Approx(7.5 * i));
  CHECK(augment_pose(base, 48, 3) == poses);

  const auto single = augment_pose(base, 1, 3);
  REQUIRE(single.size() == 1);
  CHECK(single[0].pose_deg == 0.0);
  CHECK(single[0].center_x == base.center_x);
  CHECK_THROWS_AS(augment_pose(base, 0, 3), Error);

  for (const auto& p : poses) CHECK(gen_scene(p, 32, 32) == gen_scene(p, 32, 32));
}

TEST_CASE("manifest split follows the floor rule") {
  auto make = [](std::size_t n) { return std::vector<SceneSpec>(n, spec_of(PrimitiveKind::GaussianBump)); };
  auto m = build_manifest(make(624), 0.85, 1);
  CHECK(m.count(Split::Train) == 530);
  CHECK(m.count(Split::Test) == 94);

  m = build_manifest(make(1), 0.85, 1);
  CHECK(m.count(Split::Train) == 0);
  CHECK(m.count(Split::Test) == 1);

  m = build_manifest(make(20), 0.5, 5);
  std::set<std::string> train, test;
  for (const auto& e : m.entries) (e.split == Split::Train ? train : test).insert(e.scene_id);
  CHECK(train.size() == 10);
  CHECK(test.size() == 10);
  for (const auto& id : train) CHECK(test.count(id) == 0);
  CHECK(build_manifest(make(20), 0.5, 5).entries.front().scene_id == m.entries.front().scene_id);

  CHECK_THROWS_AS(build_manifest({}, 0.85, 1), Error);
  CHECK_THROWS_AS(build_manifest(make(3), 1.0, 1), Error);
}

TEST_CASE("primitive names round-trip") {
  for (auto k : {PrimitiveKind::GaussianBump, PrimitiveKind::Hemisphere, PrimitiveKind::Ramp,
                 PrimitiveKind::PolyhedralHeightfield, PrimitiveKind::Composite})
    CHECK(primitive_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(primitive_from_string("teapot"), Error);
}
