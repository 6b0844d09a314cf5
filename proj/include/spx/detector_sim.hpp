#pragma once

#include <cstdint>
#include <vector>

#include "spx/fringe_render.hpp"
#include "spx/sampling.hpp"

namespace spx::detector {

struct AcquisitionInfo {
  double rate = 0.0;
  double period = 0.0;
  std::uint64_t seed = 0;
};

// Detector readings in acquisition order.
struct SignalTrace {
  std::vector<double> values;
  AcquisitionInfo info;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const SignalTrace&, const SignalTrace&) = default;
};

enum class ReorderMode { Rounded, Raw };

struct LowResFringe {
  Image values;
  bool binary = false;

  std::size_t height() const noexcept { return values.height(); }
  std::size_t width() const noexcept { return values.width(); }
  friend bool operator==(const LowResFringe&, const LowResFringe&) = default;
};

// Total intensity under `window` anchored at (row, col).
double measure(const Image& scene, const sampling::Window& window, int row, int col);

SignalTrace acquire(const fringe::FringeImage& scene, const sampling::PatternSequence& seq);

// Inverts the placement order onto the low-res grid. Rounded mode applies
// round-half-up to value / N; raw mode keeps value / N.
LowResFringe reorder(const SignalTrace& trace, const sampling::PatternSequence& seq,
                     ReorderMode mode);

SignalTrace acquire_random(const fringe::FringeImage& scene,
                           const sampling::RandomPatternSet& patterns);

// Round-half-up used by rounded reordering.
double round_half_up(double x);

}  // namespace spx::detector
