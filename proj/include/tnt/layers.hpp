#pragma once

#include <vector>

#include "tnt/tensor.hpp"

namespace tnt::nn {

// Layer primitives on single samples. Feature maps are rank-3 (C, H, W).
// Every *_backward takes the forward input and dL/d(output) and returns
// dL/d(input); parameter gradients are accumulated into the supplied tensors.

enum class Padding {
  valid,     // output H - k + 1
  circular,  // output H, indices wrap; commutes with circular shifts
};

// Cross-correlation: out[o, y, x] = b[o] + sum_{c,i,j} w[o, c, i, j] * in[c, y + i, x + j].
Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              Padding padding = Padding::valid);

struct Conv2dGrads {
  Tensor input;
  Tensor kernels;
  Tensor bias;
};
// Gradients of conv2d. `want_input` = false skips the input gradient.
Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels, const Tensor& grad_output,
                            Padding padding = Padding::valid, bool want_input = true);

Tensor relu(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_output);

// 2x2 mean pooling with stride 2; spatial dims must be even.
Tensor avg_pool2(const Tensor& input);
Tensor avg_pool2_backward(const Tensor& input, const Tensor& grad_output);

// y = W x + b with W of shape (out, in); x is read flat whatever its shape.
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);
struct DenseGrads {
  Tensor input;  // same shape as the forward input
  Tensor weights;
  Tensor bias;
};
DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_output);

std::vector<double> softmax(std::span<const double> logits);
// -log softmax(logits)[label], computed stably.
double cross_entropy(std::span<const double> logits, int label);
// d cross_entropy / d logits = softmax - onehot.
std::vector<double> cross_entropy_grad(std::span<const double> logits, int label);

// Index of the largest value; ties go to the lowest index.
int argmax(std::span<const double> values);

// Rolls a (C, H, W) tensor by (dy, dx) with wrap-around: out[y, x] = in[y - dy, x - dx].
Tensor circular_shift(const Tensor& input, int dy, int dx);

}  // namespace tnt::nn
