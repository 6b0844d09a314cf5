#pragma once

#include <cstdint>
#include <vector>

#include "spx/tensor.hpp"

namespace spx::nn {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list.
template <typename T>
class Adam {
public:
  Adam(std::vector<Tensor<T>> params, AdamOptions options = {});

  // Applies one update from the parameters' current gradients. Parameters
  // that never received a gradient are skipped.
  void step();
  void zero_grad();

  std::uint64_t step_count() const noexcept { return steps_; }
  const AdamOptions& options() const noexcept { return options_; }
  const std::vector<std::vector<double>>& first_moments() const noexcept { return m_; }
  const std::vector<std::vector<double>>& second_moments() const noexcept { return v_; }

private:
  std::vector<Tensor<T>> params_;
  AdamOptions options_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t steps_ = 0;
};

}  // namespace spx::nn
