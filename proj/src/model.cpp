#include "tnt/model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "tnt/binary_io.hpp"
#include "tnt/errors.hpp"
#include "tnt/layers.hpp"
#include "tnt/sim.hpp"

namespace tnt::nn {

namespace {

const char* const kNames[] = {"conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias",
                              "fc1.weight",   "fc1.bias",   "fc2.weight",   "fc2.bias"};
constexpr std::size_t kParamCount = 8;

std::size_t after_conv_pool(std::size_t n, std::size_t k) {
  if (n < k) throw ValidationError("model input too small for the convolution stack");
  const std::size_t conv = n - k + 1;
  if (conv % 2 != 0) throw ValidationError("model geometry gives an odd feature map before pooling");
  return conv / 2;
}

std::vector<std::vector<std::size_t>> expected_shapes(const ModelShape& s) {
  return {{s.conv1_channels, s.in_channels, s.kernel, s.kernel},
          {s.conv1_channels},
          {s.conv2_channels, s.conv1_channels, s.kernel, s.kernel},
          {s.conv2_channels},
          {s.hidden, s.flat_features()},
          {s.hidden},
          {s.classes, s.hidden},
          {s.classes}};
}

struct Activations {
  Tensor c1, r1, p1, c2, r2, p2, f1, r3, logits;
};

Activations run_forward(const Model& m, const Tensor& input) {
  const auto& p = m.parameters();
  Activations a;
  a.c1 = conv2d(input, p[0].value, p[1].value);
  a.r1 = relu(a.c1);
  a.p1 = avg_pool2(a.r1);
  a.c2 = conv2d(a.p1, p[2].value, p[3].value);
  a.r2 = relu(a.c2);
  a.p2 = avg_pool2(a.r2);
  a.f1 = dense(a.p2, p[4].value, p[5].value);
  a.r3 = relu(a.f1);
  a.logits = dense(a.r3, p[6].value, p[7].value);
  return a;
}

// The stored geometry is nominal; what must agree is the channel count and
// the flattened feature length that fc1 expects.
void check_input(const Model& m, const Tensor& input) {
  const ModelShape& s = m.shape();
  if (input.rank() != 3 || input.dim(0) != s.in_channels) {
    throw ValidationError("model input must be (" + std::to_string(s.in_channels) + ", H, W)");
  }
  ModelShape probe = s;
  probe.height = input.dim(1);
  probe.width = input.dim(2);
  if (probe.flat_features() != m.param(4).dim(1)) {
    throw ValidationError("model input geometry does not match the trained model");
  }
}

}  // namespace

std::size_t ModelShape::flat_features() const {
  const std::size_t h = after_conv_pool(after_conv_pool(height, kernel), kernel);
  const std::size_t w = after_conv_pool(after_conv_pool(width, kernel), kernel);
  return conv2_channels * h * w;
}

Model Model::create(const ModelShape& shape, std::uint64_t seed) {
  Model m;
  m.shape_ = shape;
  std::mt19937_64 rng(seed);
  const auto shapes = expected_shapes(shape);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    Tensor t(shapes[i]);
    if (i % 2 == 0) {
      double fan_in = 1.0, fan_out = 1.0;
      if (shapes[i].size() == 4) {
        const double area = static_cast<double>(shapes[i][2] * shapes[i][3]);
        fan_in = static_cast<double>(shapes[i][1]) * area;
        fan_out = static_cast<double>(shapes[i][0]) * area;
      } else {
        fan_in = static_cast<double>(shapes[i][1]);
        fan_out = static_cast<double>(shapes[i][0]);
      }
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& v : t.data()) v = limit * (2.0 * uniform01(rng) - 1.0);
    }
    m.params_.push_back({kNames[i], std::move(t)});
  }
  return m;
}

Model Model::from_parameters(std::vector<Parameter> params) {
  if (params.size() != kParamCount) throw FormatError("model: expected 8 parameter tensors");
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (params[i].name != kNames[i]) {
      throw FormatError("model: expected tensor '" + std::string(kNames[i]) + "', found '" +
                        params[i].name + "'");
    }
  }
  const auto& c1 = params[0].value.shape();
  const auto& c2 = params[2].value.shape();
  const auto& f1 = params[4].value.shape();
  const auto& f2 = params[6].value.shape();
  if (c1.size() != 4 || c2.size() != 4 || f1.size() != 2 || f2.size() != 2) {
    throw FormatError("model: parameter ranks are inconsistent");
  }
  ModelShape s;
  s.conv1_channels = c1[0];
  s.in_channels = c1[1];
  s.kernel = c1[2];
  s.conv2_channels = c2[0];
  s.hidden = f1[0];
  s.classes = f2[0];
  // Spatial size is not stored. Recover it assuming a square input; inputs
  // are later checked against fc1's fan-in, not against this guess.
  const std::size_t cells = f1[1] / std::max<std::size_t>(s.conv2_channels, 1);
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(cells))));
  s.height = s.width = ((side * 2 + s.kernel - 1) * 2) + s.kernel - 1;
  const std::vector<std::size_t> fc1_shape = {s.hidden, f1[1]};
  const std::vector<std::vector<std::size_t>> shapes = {
      {s.conv1_channels, s.in_channels, s.kernel, s.kernel}, {s.conv1_channels},
      {s.conv2_channels, s.conv1_channels, s.kernel, s.kernel}, {s.conv2_channels},
      fc1_shape, {s.hidden}, {s.classes, s.hidden}, {s.classes}};
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (params[i].value.shape() != shapes[i]) throw FormatError("model: shape mismatch in " + params[i].name);
  }
  if (f1[1] % std::max<std::size_t>(s.conv2_channels, 1) != 0) {
    throw FormatError("model: fc1 fan-in is not a multiple of conv2 channels");
  }
  Model m;
  m.shape_ = s;
  m.params_ = std::move(params);
  return m;
}

Tensor Model::forward(const Tensor& input) const {
  check_input(*this, input);
  return run_forward(*this, input).logits;
}

Gradients loss_and_gradients(const Model& model, std::span<const Tensor* const> inputs,
                             std::span<const int> labels, bool want_input_grads) {
  if (inputs.size() != labels.size() || inputs.empty()) {
    throw ValidationError("loss_and_gradients: need matching, non-empty inputs and labels");
  }
  const auto& p = model.parameters();
  Gradients g;
  for (const auto& param : p) g.params.emplace_back(param.value.shape());
  const double inv_n = 1.0 / static_cast<double>(inputs.size());

  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const Tensor& x = *inputs[n];
    check_input(model, x);
    const int label = labels[n];
    if (label < 0 || static_cast<std::size_t>(label) >= model.shape().classes) {
      throw ValidationError("label out of range");
    }
    const Activations a = run_forward(model, x);
    g.loss += inv_n * cross_entropy(a.logits.data(), label);
    if (argmax(a.logits.data()) == label) ++g.correct;

    std::vector<double> dlogits = cross_entropy_grad(a.logits.data(), label);
    for (double& v : dlogits) v *= inv_n;
    const std::size_t n_logits = dlogits.size();
    const Tensor d_logits({n_logits}, std::move(dlogits));

    DenseGrads fc2 = dense_backward(a.r3, p[6].value, d_logits);
    DenseGrads fc1 = dense_backward(a.p2, p[4].value, relu_backward(a.f1, fc2.input));
    Tensor d_r2 = avg_pool2_backward(a.r2, fc1.input);
    Conv2dGrads conv2 = conv2d_backward(a.p1, p[2].value, relu_backward(a.c2, d_r2));
    Tensor d_r1 = avg_pool2_backward(a.r1, conv2.input);
    Conv2dGrads conv1 =
        conv2d_backward(x, p[0].value, relu_backward(a.c1, d_r1), Padding::valid, want_input_grads);

    g.params[0].add_scaled(conv1.kernels);
    g.params[1].add_scaled(conv1.bias);
    g.params[2].add_scaled(conv2.kernels);
    g.params[3].add_scaled(conv2.bias);
    g.params[4].add_scaled(fc1.weights);
    g.params[5].add_scaled(fc1.bias);
    g.params[6].add_scaled(fc2.weights);
    g.params[7].add_scaled(fc2.bias);
    if (want_input_grads) g.inputs.push_back(std::move(conv1.input));
  }
  return g;
}

double batch_loss(const Model& model, std::span<const Tensor* const> inputs, std::span<const int> labels) {
  double loss = 0.0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    loss += cross_entropy(model.forward(*inputs[n]).data(), labels[n]);
  }
  return loss / static_cast<double>(inputs.size());
}

void write_model(std::ostream& out, const Model& model) {
  out.write("MDL1", 4);
  bin::write<std::uint32_t>(out, kMdl1Version);
  bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(model.parameters().size()));
  for (const auto& p : model.parameters()) {
    bin::write<std::uint16_t>(out, static_cast<std::uint16_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    bin::write<std::uint8_t>(out, static_cast<std::uint8_t>(p.value.rank()));
    for (auto d : p.value.shape()) bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : p.value.data()) bin::write<double>(out, v);
  }
  if (!out) throw IoError("MDL1: write failed");
}

void write_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_model(out, model);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

Model read_model(std::istream& in) {
  bin::expect_magic(in, "MDL1", "MDL1");
  const auto version = bin::read<std::uint32_t>(in, "version");
  if (version != kMdl1Version) throw FormatError("MDL1: unsupported version " + std::to_string(version));
  const auto count = bin::read<std::uint32_t>(in, "tensor count");
  if (count > 1024) throw FormatError("MDL1: implausible tensor count");
  std::vector<Model::Parameter> params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = bin::read<std::uint16_t>(in, "name length");
    std::string name(name_len, '\0');
    bin::read_bytes(in, name.data(), name_len, "tensor name");
    const auto rank = bin::read<std::uint8_t>(in, "rank");
    if (rank == 0) throw FormatError("MDL1: zero-rank tensor " + name);
    std::vector<std::size_t> shape;
    std::uint64_t total = 1;
    for (std::uint8_t r = 0; r < rank; ++r) {
      const auto d = bin::read<std::uint32_t>(in, "dimension");
      if (d == 0) throw FormatError("MDL1: zero dimension in " + name);
      shape.push_back(d);
      total *= d;
      if (total > (std::uint64_t{1} << 31)) throw FormatError("MDL1: implausible tensor size");
    }
    std::vector<double> data(total);
    for (double& v : data) v = bin::read<double>(in, "tensor data");
    params.push_back({std::move(name), Tensor(std::move(shape), std::move(data))});
  }
  return Model::from_parameters(std::move(params));
}

Model read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_model(in);
}

}  // namespace tnt::nn
