#include "spx/baseline.hpp"

#include <Eigen/Dense>
#include <algorithm>

#include "spx/dataset.hpp"
#include "spx/error.hpp"
#include "spx/serialize.hpp"

namespace spx::baseline {

struct LinearReconstructor::Impl {
  int height = 0;
  int width = 0;
  std::size_t measurements = 0;
  Eigen::MatrixXd a;  // measurements x unknowns (pixels or blocks)
  Eigen::LDLT<Eigen::MatrixXd> solver;
};

std::string describe(const Candidate& c) {
  std::string s = c.method == Method::MinimumNorm ? "min-norm" : "block-ls " + std::to_string(c.block_rows) + "x" + std::to_string(c.block_cols);
  return s + " lambda=" + io::format_double(c.lambda);
}

LinearReconstructor::LinearReconstructor(const sampling::RandomPatternSet& patterns, const Candidate& candidate)
    : candidate_(candidate), impl_(std::make_unique<Impl>()) {
  if (patterns.count() == 0) throw Error(ErrorKind::Parameter, "random pattern set is empty");
  if (!(candidate.lambda > 0.0)) throw Error(ErrorKind::Parameter, "regularization must be positive");
  if (candidate.block_rows < 1 || candidate.block_cols < 1 || patterns.height % candidate.block_rows != 0 ||
      patterns.width % candidate.block_cols != 0)
    throw Error(ErrorKind::Tiling, "block shape does not tile the scene");
  auto& im = *impl_;
  im.height = patterns.height;
  im.width = patterns.width;
  im.measurements = patterns.count();

  const bool blocks = candidate.method == Method::BlockLeastSquares;
  const int br = blocks ? candidate.block_rows : 1;
  const int bc = blocks ? candidate.block_cols : 1;
  const int grid_cols = im.width / bc;
  const Eigen::Index unknowns = static_cast<Eigen::Index>(im.height / br) * grid_cols;
  im.a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(im.measurements), unknowns);
  for (std::size_t k = 0; k < im.measurements; ++k) {
    const auto& mask = patterns.masks[k];
    for (int r = 0; r < im.height; ++r)
      for (int c = 0; c < im.width; ++c)
        if (mask[static_cast<std::size_t>(r * im.width + c)])
          im.a(static_cast<Eigen::Index>(k), (r / br) * grid_cols + c / bc) += 1.0;
  }
  if (candidate.method == Method::MinimumNorm) {
    Eigen::MatrixXd gram = im.a * im.a.transpose();
    gram.diagonal().array() += candidate.lambda;
    im.solver.compute(gram);
  } else {
    Eigen::MatrixXd normal = im.a.transpose() * im.a;
    normal.diagonal().array() += candidate.lambda;
    im.solver.compute(normal);
  }
  if (im.solver.info() != Eigen::Success) throw Error(ErrorKind::Numeric, "baseline factorization failed");
}

LinearReconstructor::~LinearReconstructor() = default;
LinearReconstructor::LinearReconstructor(LinearReconstructor&&) noexcept = default;
LinearReconstructor& LinearReconstructor::operator=(LinearReconstructor&&) noexcept = default;

Image LinearReconstructor::reconstruct(const detector::SignalTrace& trace) const {
  const auto& im = *impl_;
  if (trace.size() != im.measurements)
    throw Error(ErrorKind::Consistency, "trace has " + std::to_string(trace.size()) + " values, patterns " +
                                            std::to_string(im.measurements));
  const Eigen::Map<const Eigen::VectorXd> y(trace.values.data(), static_cast<Eigen::Index>(trace.size()));
  Eigen::VectorXd x;
  if (candidate_.method == Method::MinimumNorm) {
    x = im.a.transpose() * im.solver.solve(y);
  } else {
    x = im.solver.solve(im.a.transpose() * y);
  }
  const bool blocks = candidate_.method == Method::BlockLeastSquares;
  const int br = blocks ? candidate_.block_rows : 1;
  const int bc = blocks ? candidate_.block_cols : 1;
  const int grid_cols = im.width / bc;
  Image out(static_cast<std::size_t>(im.height), static_cast<std::size_t>(im.width));
  for (int r = 0; r < im.height; ++r)
    for (int c = 0; c < im.width; ++c)
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = std::clamp(x((r / br) * grid_cols + c / bc), 0.0, 1.0);
  return out;
}

std::vector<Candidate> default_candidates(double rate) {
  const auto window = data::window_for_rate(rate);
  std::vector<Candidate> out;
  for (double lambda : {1e-3, 1e-1, 1e1}) {
    out.push_back({Method::MinimumNorm, lambda, 1, 1});
    out.push_back({Method::BlockLeastSquares, lambda, window.tile_rows, window.tile_cols});
  }
  return out;
}

}  // namespace spx::baseline
