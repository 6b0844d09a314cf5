#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "spx/dataset.hpp"
#include "spx/models.hpp"
#include "spx/optim.hpp"

namespace spx::train {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 8;
  int epochs = 20;
  double dropout = 0.5;
  double leaky_slope = 0.2;
  // Relative batch share of the 50%, 25% and 6.25% rate groups.
  std::vector<double> rate_mix{1.0, 1.0, 2.0};
  std::uint64_t seed = 0;
  // Stops early once this many optimizer steps have run; 0 = no limit.
  int max_steps = 0;
  // Two-stage only: skip discriminator updates.
  bool freeze_discriminator = false;
};

void validate(const TrainConfig& cfg);

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct LossRecord {
  int step = 0;   // 1-based
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double loss_d = kNoValue;      // two-stage stage 1 only
  double loss_g = kNoValue;      // adversarial term of the generator loss
  double structural = kNoValue;  // 1 - ssim term of the generator loss

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

using LossCurve = std::vector<LossRecord>;

// Per-epoch order: each rate group is shuffled, then groups are interleaved
// so that every prefix keeps the group shares close to `rate_mix`.
std::vector<std::size_t> epoch_order(const std::vector<data::Sample>& samples,
                                     const std::vector<double>& rate_mix, std::uint64_t seed);

// Mean of `loss` over records [first, last) clipped to the curve, 0-based.
double mean_loss(const LossCurve& curve, std::size_t first, std::size_t last);

struct EndToEndResult {
  LossCurve curve;
  std::vector<nn::NamedTensor> checkpoint;
};

// Trains `net` in place: prepared low-res fringe -> depth, loss 1 - ssim.
LossCurve train_end_to_end(models::UNet<float>& net, const std::vector<data::Sample>& samples,
                           const TrainConfig& cfg);

EndToEndResult train_end_to_end(const std::vector<data::Sample>& samples, const models::UNetConfig& unet_cfg,
                                const TrainConfig& cfg);

struct TwoStageModels {
  models::UNet<float> generator;
  models::PatchDiscriminator<float> discriminator;
  models::UNet<float> depth;

  TwoStageModels(const models::UNetConfig& gen_cfg, const models::DiscriminatorConfig& disc_cfg,
                 const models::UNetConfig& depth_cfg, std::uint64_t seed);
};

struct TwoStageResult {
  LossCurve stage1;  // loss = generator total
  LossCurve stage2;  // depth network, loss 1 - ssim
  std::vector<nn::NamedTensor> generator_checkpoint;
  std::vector<nn::NamedTensor> depth_checkpoint;
};

// Stage 1: one discriminator step then one generator step per batch, the
// generator mapping the prepared low-res fringe to the sinusoidal fringe.
// Stage 2: depth network on ground-truth fringes. `stage2` = false stops
// after stage 1.
TwoStageResult train_two_stage(TwoStageModels& models, const std::vector<data::Sample>& samples,
                               const TrainConfig& cfg, bool stage2 = true);

TwoStageResult train_two_stage(const std::vector<data::Sample>& samples, const models::UNetConfig& gen_cfg,
                               const models::DiscriminatorConfig& disc_cfg, const models::UNetConfig& depth_cfg,
                               const TrainConfig& cfg);

// Dropout disabled, output clamped to [0, 1], canonical resolution.
Image infer_end_to_end(const models::UNet<float>& net, const Image& lowres);

struct TwoStageOutput {
  Image fringe;
  Image depth;
};

TwoStageOutput infer_two_stage(const models::UNet<float>& generator, const models::UNet<float>& depth_net,
                               const Image& lowres);

}  // namespace spx::train
