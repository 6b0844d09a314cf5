#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "spx/error.hpp"
#include "spx/sampling.hpp"

using namespace spx;
using namespace spx::sampling;

namespace {

// Coverage count per scene pixel.
std::vector<int> coverage(const PatternSequence& seq) {
  std::vector<int> hits(static_cast<std::size_t>(seq.height() * seq.width()), 0);
  for (const auto& p : seq.placements())
    for (const auto& c : seq.windows().windows[static_cast<std::size_t>(p.window)].cells())
      ++hits[static_cast<std::size_t>((p.row + c.row) * seq.width() + p.col + c.col)];
  return hits;
}

}  // namespace

TEST_CASE("unit window") {
  const auto set = make_window(1, WindowKind::Rect);
  REQUIRE(set.windows.size() == 1);
  CHECK(set.windows[0].size() == 1);
  CHECK(set.windows[0].horizontal_extent() == 1);
}

TEST_CASE("rect windows keep the long edge vertical") {
  CHECK(make_window(2, WindowKind::Rect).tile_rows == 2);
  CHECK(make_window(2, WindowKind::Rect).tile_cols == 1);
  CHECK(make_window(4, WindowKind::Rect).windows[0].horizontal_extent() == 2);
  CHECK(make_window(16, WindowKind::Rect).windows[0].horizontal_extent() == 4);
  CHECK(make_window(2, WindowKind::Rect, Orientation::Horizontal).tile_cols == 2);
  for (int n : {1, 2, 4, 16}) {
    const auto seq = make_sequence(64, 64, make_window(n, WindowKind::Rect), ScanOrder::Raster);
    CHECK(seq.rate() == doctest::Approx(1.0 / n));
    CHECK(static_cast<int>(seq.placements().size()) == 64 * 64 / n);
  }
}

TEST_CASE("split pair N = 2 sets") {
  const auto set = make_window(2, WindowKind::SplitPair, Orientation::Horizontal);
  REQUIRE(set.windows.size() == 2);
  const std::vector<Cell> a{{0, 0}, {1, 1}}, b{{0, 1}, {1, 0}};
  CHECK(set.windows[0].cells() == a);
  CHECK(set.windows[1].cells() == b);
  CHECK(set.windows[0].shape() == WindowShape::SplitPairA);
  CHECK(set.windows[1].shape() == WindowShape::SplitPairB);
}

TEST_CASE("split pairs are complementary for every parameterization") {
  for (int n = 1; n <= 16; ++n)
    for (auto o : {Orientation::Horizontal, Orientation::Vertical})
      for (int k = 0; k <= n; ++k) {
        const auto set = make_window(n, WindowKind::SplitPair, o, k);
        const auto& a = set.windows[0].cells();
        const auto& b = set.windows[1].cells();
        CHECK(a.size() == static_cast<std::size_t>(n));
        CHECK(b.size() == static_cast<std::size_t>(n));
        std::set<Cell> all(a.begin(), a.end());
        for (const auto& c : b) CHECK(all.insert(c).second);
        CHECK(all.size() == static_cast<std::size_t>(2 * n));
      }
  CHECK_THROWS_AS(make_window(4, WindowKind::SplitPair, Orientation::Vertical, 5), Error);
}

TEST_CASE("window validation") {
  CHECK_THROWS_AS(Window({}, WindowShape::Rect), Error);
  CHECK_THROWS_AS(Window({{0, 0}, {0, 0}}, WindowShape::Rect), Error);
  CHECK_THROWS_AS(make_window(0, WindowKind::Rect), Error);
  const Window w({{0, 1}, {2, 4}}, WindowShape::Rect);
  CHECK(w.horizontal_extent() == 4);
  CHECK(w.size() == 2);
}

TEST_CASE("raster and swirl orders on 4x4") {
  const auto set = make_window(1, WindowKind::Rect);
  const auto raster = make_sequence(4, 4, set, ScanOrder::Raster);
  REQUIRE(raster.placements().size() == 16);
  for (int i = 0; i < 16; ++i) {
    CHECK(raster.placements()[static_cast<std::size_t>(i)].row == i / 4);
    CHECK(raster.placements()[static_cast<std::size_t>(i)].col == i % 4);
  }
  const auto swirl = make_sequence(4, 4, set, ScanOrder::Swirl);
  REQUIRE(swirl.placements().size() == 16);
  CHECK(swirl.placements()[0].row == 2);
  CHECK(swirl.placements()[0].col == 2);
  std::set<std::pair<int, int>> seen;
  for (const auto& p : swirl.placements()) seen.insert({p.row, p.col});
  CHECK(seen.size() == 16);
}

TEST_CASE("swirl spirals outward") {
  const auto order = anchor_order(5, 5, ScanOrder::Swirl);
  REQUIRE(order.size() == 25);
  // Chebyshev distance from the center never decreases.
  int prev = 0;
  for (const auto& a : order) {
    const int ring = std::max(std::abs(a.row - 2), std::abs(a.col - 2));
    CHECK(ring >= prev);
    prev = ring;
  }
  // Non-square grids still cover every anchor once.
  for (auto [r, c] : {std::pair{1, 7}, {6, 2}, {3, 8}, {8, 8}}) {
    const auto o = anchor_order(r, c, ScanOrder::Swirl);
    std::set<std::pair<int, int>> s;
    for (const auto& a : o) s.insert({a.row, a.col});
    CHECK(s.size() == static_cast<std::size_t>(r * c));
    CHECK(o.size() == s.size());
  }
}

TEST_CASE("partition property for all supported windows") {
  for (int n : {1, 2, 4, 16})
    for (auto kind : {WindowKind::Rect, WindowKind::SplitPair})
      for (auto o : {Orientation::Vertical, Orientation::Horizontal})
        for (auto order : {ScanOrder::Raster, ScanOrder::Swirl}) {
          const auto seq = make_sequence(64, 64, make_window(n, kind, o), order);
          for (int h : coverage(seq)) CHECK(h == 1);
        }
}

TEST_CASE("non-tiling windows are rejected") {
  try {
    make_sequence(64, 63, make_window(4, WindowKind::Rect), ScanOrder::Raster);
    FAIL("expected a tiling error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Tiling);
  }
  CHECK_THROWS_AS(make_sequence(10, 10, make_window(16, WindowKind::Rect), ScanOrder::Raster), Error);
}

TEST_CASE("split pair low-res layout") {
  const auto v = make_sequence(64, 64, make_window(4, WindowKind::SplitPair, Orientation::Vertical), ScanOrder::Raster);
  CHECK(v.lowres_height() == 32);
  CHECK(v.lowres_width() == 32);
  const auto h = make_sequence(64, 64, make_window(4, WindowKind::SplitPair, Orientation::Horizontal), ScanOrder::Raster);
  CHECK(h.lowres_height() == 32);
  CHECK(h.lowres_width() == 32);
  // Every low-res pixel receives exactly one placement.
  for (const auto* seq : {&v, &h}) {
    std::set<std::pair<int, int>> seen;
    for (const auto& p : seq->placements()) {
      const auto c = seq->lowres_coord(p);
      CHECK(seen.insert({c.row, c.col}).second);
    }
    CHECK(seen.size() == static_cast<std::size_t>(seq->lowres_height() * seq->lowres_width()));
  }
}

TEST_CASE("random patterns") {
  const auto set = make_random_patterns(64, 64, 1024, 0.5, 17);
  CHECK(set.count() == 1024);
  CHECK(static_cast<int>(set.count()) == matched_pattern_count(64, 64, 0.25));
  // Binomial(4096, 0.5): sigma = 32.
  for (const auto& m : set.masks) {
    int ones = 0;
    for (auto v : m) {
      CHECK((v == 0 || v == 1));
      ones += v;
    }
    CHECK(std::abs(ones - 2048) <= 4 * 32);
  }
  CHECK(make_random_patterns(64, 64, 8, 0.5, 17).masks == std::vector(set.masks.begin(), set.masks.begin() + 8));
  CHECK_THROWS_AS(make_random_patterns(64, 64, 0, 0.5, 1), Error);
  CHECK_THROWS_AS(make_random_patterns(64, 64, 4, 1.0, 1), Error);
}

TEST_CASE("budget parity with the active scheme") {
  for (int n : {2, 4, 16}) {
    const auto seq = make_sequence(64, 64, make_window(n, WindowKind::Rect), ScanOrder::Raster);
    CHECK(static_cast<int>(seq.placements().size()) == matched_pattern_count(64, 64, 1.0 / n));
  }
}

TEST_CASE("nyquist regimes") {
  CHECK(check_nyquist(3, 6) == NyquistRegime::Strict);
  for (int m : {4, 5, 6}) CHECK(check_nyquist(m, 6) == NyquistRegime::Relaxed);
  CHECK(check_nyquist(7, 6) == NyquistRegime::Aliased);
  for (double t : {2.0, 3.0, 6.5, 100.0}) CHECK(check_nyquist(1, t) == NyquistRegime::Strict);
  CHECK(check_nyquist(3, 7) == NyquistRegime::Strict);
  CHECK(check_nyquist(4, 7) == NyquistRegime::Relaxed);
}

TEST_CASE("enum names round-trip") {
  for (auto o : {ScanOrder::Raster, ScanOrder::Swirl}) CHECK(scan_order_from_string(to_string(o)) == o);
  for (auto o : {Orientation::Vertical, Orientation::Horizontal}) CHECK(orientation_from_string(to_string(o)) == o);
  CHECK_THROWS_AS(scan_order_from_string("zigzag"), Error);
}
