#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spx/checkpoint.hpp"
#include "spx/detector_sim.hpp"
#include "spx/tensor.hpp"

namespace spx::models {

using nn::Tensor;

struct UNetConfig {
  int levels = 4;
  int base_channels = 8;
  int in_channels = 1;
  int out_channels = 1;
  int resolution = 64;
  double dropout = 0.5;
  double leaky_slope = 0.2;

  // Six-level topology at 64 x 64 (bottleneck 1 x 1).
  static UNetConfig full_topology();
};

void validate(const UNetConfig& cfg);

struct DiscriminatorConfig {
  int layers = 3;
  int base_channels = 8;
  int in_channels = 2;  // condition + candidate
  int resolution = 64;
  double leaky_slope = 0.2;

  // Receptive field of one score, in input pixels.
  int patch_size() const;
};

void validate(const DiscriminatorConfig& cfg);

template <typename T>
struct Conv {
  Tensor<T> weight;  // [out, in, k, k]
  Tensor<T> bias;    // [out]
  int stride = 1;
  int padding = 0;

  Tensor<T> operator()(const Tensor<T>& x) const;
};

template <typename T>
struct NamedParam {
  std::string name;
  Tensor<T> tensor;
};

// Encoder: `levels` blocks of 4x4 stride-2 conv + leaky ReLU.
// Decoder: `levels` blocks of 2x nearest upsample + 3x3 conv + ReLU, each
// followed by concatenation with the encoder feature at the same scale (the
// last one with the network input). Dropout on the three deepest decoder
// blocks. Head: 1x1 conv + sigmoid.
template <typename T>
class UNet {
public:
  UNet(const UNetConfig& cfg, std::uint64_t init_seed);

  Tensor<T> forward(const Tensor<T>& x, bool training, std::uint64_t dropout_seed = 0) const;

  std::vector<NamedParam<T>> parameters() const;
  std::vector<Tensor<T>> parameter_tensors() const;
  std::size_t parameter_count() const;
  const UNetConfig& config() const noexcept { return cfg_; }

  // Channel width of encoder level k (k >= 1) and decoder level k (k >= 0).
  int encoder_channels(int level) const;
  int decoder_channels(int level) const;

private:
  UNetConfig cfg_;
  std::vector<Conv<T>> down_;
  std::vector<Conv<T>> up_;  // up_[k] produces decoder level k
  Conv<T> head_;
};

// Stacked 4x4 stride-2 convs; the last layer emits one raw score channel.
template <typename T>
class PatchDiscriminator {
public:
  PatchDiscriminator(const DiscriminatorConfig& cfg, std::uint64_t init_seed);

  Tensor<T> forward(const Tensor<T>& condition, const Tensor<T>& candidate) const;

  std::vector<NamedParam<T>> parameters() const;
  std::vector<Tensor<T>> parameter_tensors() const;
  std::size_t parameter_count() const;
  const DiscriminatorConfig& config() const noexcept { return cfg_; }
  int output_size() const;

private:
  DiscriminatorConfig cfg_;
  std::vector<Conv<T>> layers_;
};

// 1 - ssim(pred, real)
template <typename T> Tensor<T> loss_unet(const Tensor<T>& pred, const Tensor<T>& real);

// Generator loss terms. total = adversarial + 100 * structural.
template <typename T>
struct GeneratorLoss {
  Tensor<T> total;
  Tensor<T> adversarial;  // mse(disc_out, ones)
  Tensor<T> structural;   // 1 - ssim(gen_out, real_fringe)
};

inline constexpr double kStructuralWeight = 100.0;

template <typename T>
GeneratorLoss<T> loss_generator(const Tensor<T>& disc_out, const Tensor<T>& gen_out,
                                const Tensor<T>& real_fringe);

// Least-squares form: mse(score_real, ones) + mse(score_fake, zeros).
template <typename T>
Tensor<T> loss_discriminator(const Tensor<T>& score_real, const Tensor<T>& score_fake);

// Nearest-neighbour upsample of a low-res fringe to canonical x canonical,
// one channel, per-axis integer factors.
Tensor<float> prepare_input(const detector::LowResFringe& lowres, int canonical);
Image prepare_image(const Image& lowres, int canonical);

// Stacks equally sized images into an [N, 1, H, W] tensor.
template <typename T> Tensor<T> stack_images(const std::vector<const Image*>& images);

template <typename T> std::vector<nn::NamedTensor> to_named_tensors(const std::vector<NamedParam<T>>& params);
// Copies checkpoint values into the parameters; names and shapes must match.
template <typename T>
void load_into(const std::vector<NamedParam<T>>& params, const std::vector<nn::NamedTensor>& stored);

// Copies parameter values between two models of the same topology.
template <typename Dst, typename Src>
void copy_parameters(const std::vector<NamedParam<Dst>>& dst, const std::vector<NamedParam<Src>>& src);

}  // namespace spx::models
