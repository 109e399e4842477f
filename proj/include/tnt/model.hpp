#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tnt/tensor.hpp"

namespace tnt::nn {

struct ModelShape {
  std::size_t in_channels = 9;
  std::size_t height = 34;
  std::size_t width = 34;
  std::size_t classes = 10;
  std::size_t conv1_channels = 16;
  std::size_t conv2_channels = 32;
  std::size_t hidden = 128;
  std::size_t kernel = 3;

  // Flattened feature length after conv-relu-pool twice; throws if the
  // input is too small or a pooled map would have odd size.
  std::size_t flat_features() const;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

// conv1 -> relu -> pool -> conv2 -> relu -> pool -> flatten -> fc1 -> relu -> fc2
// Parameters are held as named tensors in a fixed order:
//   conv1.weight conv1.bias conv2.weight conv2.bias fc1.weight fc1.bias fc2.weight fc2.bias
class Model {
 public:
  struct Parameter {
    std::string name;
    Tensor value;

    friend bool operator==(const Parameter&, const Parameter&) = default;
  };

  Model() = default;
  // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static Model create(const ModelShape& shape, std::uint64_t seed);
  // Rebuilds a model from named tensors, checking names and shape consistency.
  static Model from_parameters(std::vector<Parameter> params);

  const ModelShape& shape() const { return shape_; }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  const Tensor& param(std::size_t i) const { return params_[i].value; }

  Tensor forward(const Tensor& input) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  ModelShape shape_;
  std::vector<Parameter> params_;
};

struct Gradients {
  std::vector<Tensor> params;  // aligned with Model::parameters()
  std::vector<Tensor> inputs;  // one per batch sample, empty unless requested
  double loss = 0.0;           // mean cross-entropy over the batch
  std::size_t correct = 0;     // samples whose argmax matched the label
};

// Mean softmax cross-entropy over the batch and its exact reverse-mode
// gradient with respect to every parameter (and optionally each input).
Gradients loss_and_gradients(const Model& model, std::span<const Tensor* const> inputs,
                             std::span<const int> labels, bool want_input_grads = false);

double batch_loss(const Model& model, std::span<const Tensor* const> inputs, std::span<const int> labels);

// MDL1 layout, little-endian:
//   "MDL1" | u32 version=1 | u32 tensor count |
//   per tensor { u16 name length | name | u8 rank | u32 dims[rank] | f64 data }
inline constexpr std::uint32_t kMdl1Version = 1;

void write_model(std::ostream& out, const Model& model);
void write_model(const std::filesystem::path& path, const Model& model);
Model read_model(std::istream& in);
Model read_model(const std::filesystem::path& path);

}  // namespace tnt::nn
