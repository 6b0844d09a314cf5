#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "spx/detector_sim.hpp"

using namespace spx;
using namespace spx::detector;
using namespace spx::sampling;
using fringe::FringeImage;
using fringe::FringeKind;

namespace {

FringeImage binary(Image img) { return {std::move(img), FringeKind::Binary}; }
FringeImage graded(Image img) { return {std::move(img), FringeKind::Sinusoidal}; }

double total(const Image& img) {
  const auto v = img.values();
  return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

TEST_CASE("measure sums the covered pixels") {
  Image s(2, 2, std::vector<double>{0, 1, 1, 1});
  const auto w = make_window(4, WindowKind::Rect).windows[0];
  CHECK(measure(s, w, 0, 0) == 3.0);

  Image e1(4, 4, 0.0);
  e1(1, 2) = 0.75;
  const auto unit = make_window(1, WindowKind::Rect).windows[0];
  CHECK(measure(e1, unit, 1, 2) == 0.75);
  CHECK(measure(e1, unit, 2, 1) == 0.0);

  try {
    measure(s, w, 1, 0);
    FAIL("expected a bounds error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Bounds);
  }
  CHECK_THROWS_AS(measure(s, unit, -1, 0), Error);
}

TEST_CASE("N = 1 trace is the raster flattening") {
  const auto img = oracle::uniform_image(8, 12, 3);
  const auto seq = make_sequence(8, 12, make_window(1, WindowKind::Rect), ScanOrder::Raster);
  const auto trace = acquire(graded(img), seq);
  REQUIRE(trace.size() == 96);
  for (std::size_t i = 0; i < 96; ++i) CHECK(trace.values[i] == img.values()[i]);
  CHECK(trace.info.rate == 1.0);
  CHECK(reorder(trace, seq, ReorderMode::Raw).values == img);
}

TEST_CASE("constant scene gives N * v per reading") {
  for (int n : {1, 2, 4, 16}) {
    const auto seq = make_sequence(16, 16, make_window(n, WindowKind::Rect), ScanOrder::Swirl);
    const auto trace = acquire(graded(Image(16, 16, 0.25)), seq);
    for (double v : trace.values) CHECK(v == 0.25 * n);
  }
}

TEST_CASE("rounded reorder of {1,1,0,1}") {
  const Image s(2, 2, std::vector<double>{1, 1, 0, 1});
  const auto seq = make_sequence(2, 2, make_window(4, WindowKind::Rect), ScanOrder::Raster);
  const auto trace = acquire(binary(s), seq);
  CHECK(trace.values == std::vector<double>{3.0});
  const auto lo = reorder(trace, seq, ReorderMode::Rounded);
  CHECK(lo.binary);
  CHECK(lo.values(0, 0) == 1.0);
  CHECK(reorder(trace, seq, ReorderMode::Raw).values(0, 0) == 0.75);
}

TEST_CASE("round half up") {
  CHECK(round_half_up(0.5) == 1.0);
  CHECK(round_half_up(0.49999) == 0.0);
  CHECK(round_half_up(0.25) == 0.0);
  CHECK(round_half_up(0.75) == 1.0);
  CHECK(round_half_up(0.0) == 0.0);
  CHECK(round_half_up(1.0) == 1.0);
}

TEST_CASE("reorder rejects a trace of the wrong length") {
  const auto seq = make_sequence(4, 4, make_window(4, WindowKind::Rect), ScanOrder::Raster);
  SignalTrace t;
  t.values = {1.0, 2.0, 3.0};
  try {
    reorder(t, seq, ReorderMode::Raw);
    FAIL("expected a consistency error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Consistency);
  }
}

TEST_CASE("acquire rejects scene and sequence size mismatch") {
  const auto seq = make_sequence(4, 4, make_window(4, WindowKind::Rect), ScanOrder::Raster);
  CHECK_THROWS_AS(acquire(graded(Image(4, 8, 0.0)), seq), Error);
}

TEST_CASE("round trip matches the block-average oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto img = oracle::dyadic_image(64, 64, seed);
    for (int n : {1, 2, 4, 16}) {
      const auto set = make_window(n, WindowKind::Rect);
      for (auto order : {ScanOrder::Raster, ScanOrder::Swirl}) {
        const auto seq = make_sequence(64, 64, set, order);
        const auto raw = reorder(acquire(graded(img), seq), seq, ReorderMode::Raw);
        const auto expect = oracle::block_average(img, static_cast<std::size_t>(set.tile_rows),
                                                  static_cast<std::size_t>(set.tile_cols));
        CHECK(raw.values == expect);
        CHECK(reorder(acquire(graded(img), seq), seq, ReorderMode::Rounded).values == oracle::round_half_up(expect));
      }
    }
  }
}

TEST_CASE("split pair round trip matches the oracle") {
  const auto img = oracle::dyadic_image(64, 64, 41);
  for (int n : {2, 4, 16})
    for (auto o : {Orientation::Vertical, Orientation::Horizontal}) {
      const auto seq = make_sequence(64, 64, make_window(n, WindowKind::SplitPair, o), ScanOrder::Swirl);
      const auto raw = reorder(acquire(graded(img), seq), seq, ReorderMode::Raw);
      CHECK(raw.values == oracle::split_pair_average(img, n, o == Orientation::Vertical));
    }
}

TEST_CASE("scan order does not change the reordered image") {
  const auto img = oracle::uniform_image(32, 32, 8);
  for (int n : {2, 4, 16}) {
    const auto set = make_window(n, WindowKind::Rect);
    const auto a = make_sequence(32, 32, set, ScanOrder::Raster);
    const auto b = make_sequence(32, 32, set, ScanOrder::Swirl);
    const auto ta = acquire(graded(img), a);
    const auto tb = acquire(graded(img), b);
    auto sa = ta.values, sb = tb.values;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    CHECK(sa == sb);
    CHECK(reorder(ta, a, ReorderMode::Raw) == reorder(tb, b, ReorderMode::Raw));
  }
}

TEST_CASE("acquisition is linear") {
  const auto x = oracle::uniform_image(16, 16, 1);
  const auto y = oracle::uniform_image(16, 16, 2);
  Image combo(16, 16);
  for (std::size_t i = 0; i < combo.size(); ++i) combo.values()[i] = 2.0 * x.values()[i] - 0.5 * y.values()[i];
  const auto seq = make_sequence(16, 16, make_window(4, WindowKind::Rect), ScanOrder::Swirl);
  const auto tx = acquire(graded(x), seq), ty = acquire(graded(y), seq), tc = acquire(graded(combo), seq);
  for (std::size_t i = 0; i < tc.size(); ++i)
    CHECK(tc.values[i] == doctest::Approx(2.0 * tx.values[i] - 0.5 * ty.values[i]).epsilon(1e-12));
}

TEST_CASE("total intensity is conserved") {
  const auto img = oracle::uniform_image(64, 64, 5);
  for (int n : {1, 2, 4, 16})
    for (auto kind : {WindowKind::Rect, WindowKind::SplitPair}) {
      const auto seq = make_sequence(64, 64, make_window(n, kind), ScanOrder::Swirl);
      const auto t = acquire(graded(img), seq);
      CHECK(std::accumulate(t.values.begin(), t.values.end(), 0.0) == doctest::Approx(total(img)).epsilon(1e-12));
    }
}

TEST_CASE("random acquisition is the masked sum") {
  const auto img = oracle::uniform_image(16, 16, 12);
  const auto pats = make_random_patterns(16, 16, 20, 0.5, 9);
  const auto t = acquire_random(graded(img), pats);
  REQUIRE(t.size() == 20);
  for (std::size_t k = 0; k < 20; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i)
      if (pats.masks[k][i]) acc += img.values()[i];
    CHECK(t.values[k] == doctest::Approx(acc).epsilon(1e-12));
  }
  CHECK_THROWS_AS(acquire_random(graded(Image(8, 8, 0.0)), pats), Error);
}

TEST_CASE("T = 8 carrier under 1 x 2 windows becomes a period-4 square wave") {
  Image carrier(4, 64);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 64; ++c) carrier(r, c) = (c % 8) < 4 ? 1.0 : 0.0;
  const auto seq = make_sequence(4, 64, make_rect_window(1, 2), ScanOrder::Raster);
  const auto lo = reorder(acquire(binary(carrier), seq), seq, ReorderMode::Rounded);
  REQUIRE(lo.width() == 32);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 32; ++c) CHECK(lo.values(r, c) == ((c % 4) < 2 ? 1.0 : 0.0));
}
