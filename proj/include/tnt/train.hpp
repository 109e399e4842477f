#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tnt/model.hpp"
#include "tnt/volume.hpp"

namespace tnt::nn {

// How a volume's magnitude is brought to a common range before the network.
//   global:  one factor per sample, 1 / max(1, max|V|)
//   per_bin: one factor per temporal bin, 1 / max(1, max|V_b|)
enum class InputNorm { global, per_bin };

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 30;
  int batch_size = 64;
  std::uint64_t seed = 0;
  double input_scale = 1.0;
  InputNorm input_norm = InputNorm::per_bin;
};

void validate(const TrainConfig& config);

struct LabeledSet {
  std::vector<Tensor> inputs;
  std::vector<int> labels;
  std::size_t classes = 0;

  std::size_t size() const { return inputs.size(); }
};

// Volume -> (B, H, W) network input: normalized per `norm`, then multiplied
// by input_scale.
Tensor to_network_input(const EventVolume& volume, double input_scale = 1.0,
                        InputNorm norm = InputNorm::per_bin);

struct EpochMetrics {
  int epoch = 0;
  std::string split;  // "train" or "val"
  double loss = 0.0;
  double accuracy = 0.0;

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct TrainResult {
  Model model;
  std::vector<EpochMetrics> metrics;
};

// Mini-batch SGD with momentum: v <- mu v - lr g; w <- w + v. Each epoch
// visits the samples in a Fisher-Yates order drawn from mix_seed(seed, epoch).
// Epoch 0 reports the untrained model; later "train" rows are running means
// over the epoch's batches. With a validation set, a "val" row follows each
// epoch. Deterministic in (model, data, config).
TrainResult train(Model model, const LabeledSet& data, const TrainConfig& config,
                  const LabeledSet* validation = nullptr);

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
  std::size_t count = 0;
  // confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
};

EvalResult evaluate(const Model& model, const LabeledSet& data);

void write_metrics_csv(std::ostream& out, const std::vector<EpochMetrics>& metrics);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& metrics);

}  // namespace tnt::nn
