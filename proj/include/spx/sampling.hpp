#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace spx::sampling {

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class WindowShape { Rect, SplitPairA, SplitPairB };
enum class Orientation { Vertical, Horizontal };  // direction of the window's long edge
enum class ScanOrder { Raster, Swirl };

std::string_view to_string(WindowShape shape);
std::string_view to_string(Orientation orientation);
std::string_view to_string(ScanOrder order);
ScanOrder scan_order_from_string(std::string_view name);
Orientation orientation_from_string(std::string_view name);

// Cell offsets relative to the anchor of the tile the window lives in.
class Window {
public:
  Window(std::vector<Cell> cells, WindowShape shape);

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  WindowShape shape() const noexcept { return shape_; }
  int size() const noexcept { return static_cast<int>(cells_.size()); }  // N
  int horizontal_extent() const noexcept { return extent_cols_; }        // M
  int vertical_extent() const noexcept { return extent_rows_; }

  friend bool operator==(const Window&, const Window&) = default;

private:
  std::vector<Cell> cells_;
  WindowShape shape_;
  int extent_rows_ = 0;
  int extent_cols_ = 0;
};

// One window, or the two complementary windows of a split pair. The windows
// together tile a tile_rows x tile_cols super-cell.
struct WindowSet {
  std::vector<Window> windows;
  int tile_rows = 0;
  int tile_cols = 0;
  // For split pairs: Horizontal puts A and B side by side in the low-res
  // image, Vertical stacks them.
  Orientation orientation = Orientation::Vertical;

  int cells_per_window() const { return windows.front().size(); }
  bool is_split_pair() const { return windows.size() == 2; }
};

enum class WindowKind { Rect, SplitPair };

// Rect: h x w with h * w = N, the most square factorization, long edge along
// `orientation`. SplitPair: windows A and B of N cells each tiling a 2 x N
// super-cell (horizontal) or its transpose (vertical); A takes the first
// `split` cells of the first row and the remainder of the second row.
WindowSet make_window(int n, WindowKind kind, Orientation orientation = Orientation::Vertical,
                      std::optional<int> split = std::nullopt);

// Explicit rect window, for sampling studies with a chosen horizontal extent.
WindowSet make_rect_window(int rows, int cols);

struct Placement {
  int row = 0;     // anchor pixel of the tile
  int col = 0;
  int window = 0;  // index into WindowSet::windows
  friend bool operator==(const Placement&, const Placement&) = default;
};

struct LowResCoord {
  int row = 0;
  int col = 0;
};

class PatternSequence {
public:
  PatternSequence(int height, int width, WindowSet windows, ScanOrder order);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int lowres_height() const noexcept { return lowres_height_; }
  int lowres_width() const noexcept { return lowres_width_; }
  const WindowSet& windows() const noexcept { return windows_; }
  ScanOrder order() const noexcept { return order_; }
  const std::vector<Placement>& placements() const noexcept { return placements_; }
  int cells_per_window() const { return windows_.cells_per_window(); }
  double rate() const { return 1.0 / cells_per_window(); }

  // Low-resolution pixel that receives placement k.
  LowResCoord lowres_coord(const Placement& p) const;

private:
  int height_;
  int width_;
  WindowSet windows_;
  ScanOrder order_;
  int lowres_height_ = 0;
  int lowres_width_ = 0;
  std::vector<Placement> placements_;
};

PatternSequence make_sequence(int height, int width, const WindowSet& windows, ScanOrder order);

// Anchor-grid traversal order; exposed for testing. Swirl is an outward
// rectangular spiral (right, down, left, up with run lengths 1,1,2,2,...)
// from (rows / 2, cols / 2), skipping cells outside the grid.
std::vector<LowResCoord> anchor_order(int rows, int cols, ScanOrder order);

struct RandomPatternSet {
  int height = 0;
  int width = 0;
  double density = 0.5;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint8_t>> masks;  // each height * width, row-major, 0 or 1

  std::size_t count() const noexcept { return masks.size(); }
};

RandomPatternSet make_random_patterns(int height, int width, int count, double density,
                                      std::uint64_t seed);

// Pattern count that matches the measurement budget of an active scheme at `rate`.
int matched_pattern_count(int height, int width, double rate);

enum class NyquistRegime { Strict, Relaxed, Aliased };
std::string_view to_string(NyquistRegime regime);

// Strict: M <= T/2. Relaxed: T/2 < M <= T. Aliased: M > T.
NyquistRegime check_nyquist(int window_extent, double period);

}  // namespace spx::sampling
