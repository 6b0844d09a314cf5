#pragma once

#include <memory>
#include <string>
#include <vector>

#include "spx/detector_sim.hpp"
#include "spx/sampling.hpp"

namespace spx::baseline {

enum class Method {
  MinimumNorm,        // x = A^T (A A^T + lambda I)^-1 y over all pixels
  BlockLeastSquares,  // piecewise-constant blocks, (B^T B + lambda I) z = B^T y
};

struct Candidate {
  Method method = Method::MinimumNorm;
  double lambda = 1e-3;
  int block_rows = 1;
  int block_cols = 1;
};

std::string describe(const Candidate& c);

// Linear reconstruction from random-pattern traces. The pattern matrix is
// factorized once; reconstruct() is then a pair of solves.
class LinearReconstructor {
public:
  LinearReconstructor(const sampling::RandomPatternSet& patterns, const Candidate& candidate);
  ~LinearReconstructor();
  LinearReconstructor(LinearReconstructor&&) noexcept;
  LinearReconstructor& operator=(LinearReconstructor&&) noexcept;

  // Result clamped to [0, 1].
  Image reconstruct(const detector::SignalTrace& trace) const;
  const Candidate& candidate() const noexcept { return candidate_; }

private:
  struct Impl;
  Candidate candidate_;
  std::unique_ptr<Impl> impl_;
};

// Minimum-norm and block solutions over a small lambda grid; block shape
// follows the active window for `rate`.
std::vector<Candidate> default_candidates(double rate);

}  // namespace spx::baseline
