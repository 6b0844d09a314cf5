#include "spx/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "spx/error.hpp"

namespace spx::sampling {

std::string_view to_string(WindowShape shape) {
  switch (shape) {
    case WindowShape::Rect: return "rect";
    case WindowShape::SplitPairA: return "split_pair_a";
    case WindowShape::SplitPairB: return "split_pair_b";
  }
  return "unknown";
}

std::string_view to_string(Orientation orientation) {
  return orientation == Orientation::Vertical ? "vertical" : "horizontal";
}

std::string_view to_string(ScanOrder order) {
  return order == ScanOrder::Raster ? "raster" : "swirl";
}

ScanOrder scan_order_from_string(std::string_view name) {
  if (name == "raster") return ScanOrder::Raster;
  if (name == "swirl") return ScanOrder::Swirl;
  throw Error(ErrorKind::Parameter, "unknown scan order '" + std::string(name) + "'");
}

Orientation orientation_from_string(std::string_view name) {
  if (name == "vertical") return Orientation::Vertical;
  if (name == "horizontal") return Orientation::Horizontal;
  throw Error(ErrorKind::Parameter, "unknown orientation '" + std::string(name) + "'");
}

Window::Window(std::vector<Cell> cells, WindowShape shape) : cells_(std::move(cells)), shape_(shape) {
  if (cells_.empty()) throw Error(ErrorKind::Parameter, "window needs at least one cell");
  std::set<Cell> unique(cells_.begin(), cells_.end());
  if (unique.size() != cells_.size())
    throw Error(ErrorKind::Parameter, "window cells must be distinct");
  auto [rmin, rmax] = std::minmax_element(cells_.begin(), cells_.end(),
                                          [](const Cell& a, const Cell& b) { return a.row < b.row; });
  auto [cmin, cmax] = std::minmax_element(cells_.begin(), cells_.end(),
                                          [](const Cell& a, const Cell& b) { return a.col < b.col; });
  extent_rows_ = 1 + rmax->row - rmin->row;
  extent_cols_ = 1 + cmax->col - cmin->col;
}

WindowSet make_rect_window(int rows, int cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::Parameter, "window dimensions must be positive");
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(rows * cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) cells.push_back({r, c});
  WindowSet set;
  set.windows.emplace_back(std::move(cells), WindowShape::Rect);
  set.tile_rows = rows;
  set.tile_cols = cols;
  return set;
}

WindowSet make_window(int n, WindowKind kind, Orientation orientation, std::optional<int> split) {
  if (n < 1) throw Error(ErrorKind::Parameter, "window size N must be at least 1");
  if (kind == WindowKind::Rect) {
    int short_edge = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
    while (n % short_edge != 0) --short_edge;
    const int long_edge = n / short_edge;
    return orientation == Orientation::Vertical ? make_rect_window(long_edge, short_edge)
                                                : make_rect_window(short_edge, long_edge);
  }

  const int k = split.value_or((n + 1) / 2);
  if (k < 0 || k > n) throw Error(ErrorKind::Parameter, "split point must lie in [0, N]");
  // Canonical horizontal layout on a 2 x N super-cell.
  std::vector<Cell> a;
  std::vector<Cell> b;
  for (int c = 0; c < n; ++c) {
    (c < k ? a : b).push_back({0, c});
    (c >= k ? a : b).push_back({1, c});
  }
  auto sorted = [](std::vector<Cell> cells) {
    std::sort(cells.begin(), cells.end());
    return cells;
  };
  WindowSet set;
  set.orientation = orientation;
  if (orientation == Orientation::Horizontal) {
    set.tile_rows = 2;
    set.tile_cols = n;
  } else {
    for (auto* cells : {&a, &b})
      for (auto& cell : *cells) std::swap(cell.row, cell.col);
    set.tile_rows = n;
    set.tile_cols = 2;
  }
  set.windows.emplace_back(sorted(std::move(a)), WindowShape::SplitPairA);
  set.windows.emplace_back(sorted(std::move(b)), WindowShape::SplitPairB);
  return set;
}

std::vector<LowResCoord> anchor_order(int rows, int cols, ScanOrder order) {
  std::vector<LowResCoord> out;
  out.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  if (order == ScanOrder::Raster) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out.push_back({r, c});
    return out;
  }
  const std::size_t total = out.capacity();
  int r = rows / 2;
  int c = cols / 2;
  auto visit = [&](int rr, int cc) {
    if (rr >= 0 && rr < rows && cc >= 0 && cc < cols) out.push_back({rr, cc});
  };
  visit(r, c);
  constexpr int dr[4] = {0, 1, 0, -1};
  constexpr int dc[4] = {1, 0, -1, 0};
  int run = 1;
  int dir = 0;
  while (out.size() < total) {
    for (int rep = 0; rep < 2 && out.size() < total; ++rep) {
      for (int s = 0; s < run; ++s) {
        r += dr[dir];
        c += dc[dir];
        visit(r, c);
      }
      dir = (dir + 1) % 4;
    }
    ++run;
  }
  return out;
}

PatternSequence::PatternSequence(int height, int width, WindowSet windows, ScanOrder order)
    : height_(height), width_(width), windows_(std::move(windows)), order_(order) {
  if (windows_.windows.empty()) throw Error(ErrorKind::Parameter, "window set is empty");
  if (height_ < 1 || width_ < 1) throw Error(ErrorKind::Parameter, "scene dimensions must be positive");
  if (height_ % windows_.tile_rows != 0 || width_ % windows_.tile_cols != 0)
    throw Error(ErrorKind::Tiling, "window tile " + std::to_string(windows_.tile_rows) + "x" +
                                       std::to_string(windows_.tile_cols) + " does not tile " +
                                       std::to_string(height_) + "x" + std::to_string(width_));
  const int grid_rows = height_ / windows_.tile_rows;
  const int grid_cols = width_ / windows_.tile_cols;
  lowres_height_ = grid_rows;
  lowres_width_ = grid_cols;
  if (windows_.is_split_pair()) {
    if (windows_.orientation == Orientation::Vertical)
      lowres_height_ *= 2;
    else
      lowres_width_ *= 2;
  }
  const auto anchors = anchor_order(grid_rows, grid_cols, order_);
  placements_.reserve(anchors.size() * windows_.windows.size());
  for (const auto& a : anchors)
    for (int w = 0; w < static_cast<int>(windows_.windows.size()); ++w)
      placements_.push_back({a.row * windows_.tile_rows, a.col * windows_.tile_cols, w});
}

LowResCoord PatternSequence::lowres_coord(const Placement& p) const {
  const int gr = p.row / windows_.tile_rows;
  const int gc = p.col / windows_.tile_cols;
  if (!windows_.is_split_pair()) return {gr, gc};
  if (windows_.orientation == Orientation::Vertical) return {gr * 2 + p.window, gc};
  return {gr, gc * 2 + p.window};
}

PatternSequence make_sequence(int height, int width, const WindowSet& windows, ScanOrder order) {
  return PatternSequence(height, width, windows, order);
}

RandomPatternSet make_random_patterns(int height, int width, int count, double density,
                                      std::uint64_t seed) {
  if (count <= 0) throw Error(ErrorKind::Parameter, "random pattern count must be positive");
  if (!(density > 0.0 && density < 1.0))
    throw Error(ErrorKind::Parameter, "random pattern density must be in (0, 1)");
  if (height < 1 || width < 1) throw Error(ErrorKind::Parameter, "pattern dimensions must be positive");
  RandomPatternSet set{height, width, density, seed, {}};
  set.masks.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(density);
  const auto pixels = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  for (int k = 0; k < count; ++k) {
    std::vector<std::uint8_t> mask(pixels);
    for (auto& m : mask) m = on(rng) ? 1 : 0;
    set.masks.push_back(std::move(mask));
  }
  return set;
}

int matched_pattern_count(int height, int width, double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw Error(ErrorKind::Parameter, "rate must be in (0, 1]");
  return static_cast<int>(std::lround(rate * static_cast<double>(height) * static_cast<double>(width)));
}

std::string_view to_string(NyquistRegime regime) {
  switch (regime) {
    case NyquistRegime::Strict: return "strict";
    case NyquistRegime::Relaxed: return "relaxed";
    case NyquistRegime::Aliased: return "aliased";
  }
  return "unknown";
}

NyquistRegime check_nyquist(int window_extent, double period) {
  const double m = static_cast<double>(window_extent);
  if (2.0 * m <= period) return NyquistRegime::Strict;
  if (m <= period) return NyquistRegime::Relaxed;
  return NyquistRegime::Aliased;
}

}  // namespace spx::sampling
