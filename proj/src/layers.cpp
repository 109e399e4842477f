#include "tnt/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tnt/errors.hpp"

namespace tnt::nn {

namespace {

struct ConvShape {
  std::size_t in_c, in_h, in_w, out_c, k, out_h, out_w;
};

ConvShape conv_shape(const Tensor& input, const Tensor& kernels, Padding padding) {
  if (input.rank() != 3 || kernels.rank() != 4) throw ValidationError("conv2d: expected (C,H,W) input and (O,C,k,k) kernels");
  ConvShape s{input.dim(0), input.dim(1), input.dim(2), kernels.dim(0), kernels.dim(2), 0, 0};
  if (kernels.dim(1) != s.in_c) throw ValidationError("conv2d: kernel channels do not match input");
  if (kernels.dim(3) != s.k) throw ValidationError("conv2d: kernels must be square");
  if (s.k > s.in_h || s.k > s.in_w) throw ValidationError("conv2d: kernel larger than input");
  if (padding == Padding::valid) {
    s.out_h = s.in_h - s.k + 1;
    s.out_w = s.in_w - s.k + 1;
  } else {
    s.out_h = s.in_h;
    s.out_w = s.in_w;
  }
  return s;
}

int wrap(int v, int n) {
  const int r = v % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias, Padding padding) {
  const ConvShape s = conv_shape(input, kernels, padding);
  if (bias.size() != s.out_c) throw ValidationError("conv2d: bias length does not match output channels");
  Tensor out({s.out_c, s.out_h, s.out_w});
  const double* in = input.data().data();
  const double* w = kernels.data().data();
  double* o = out.data().data();
  for (std::size_t oc = 0; oc < s.out_c; ++oc) {
    double* oplane = o + oc * s.out_h * s.out_w;
    std::fill(oplane, oplane + s.out_h * s.out_w, bias[oc]);
    for (std::size_t ic = 0; ic < s.in_c; ++ic) {
      const double* iplane = in + ic * s.in_h * s.in_w;
      for (std::size_t i = 0; i < s.k; ++i) {
        for (std::size_t j = 0; j < s.k; ++j) {
          const double wv = w[((oc * s.in_c + ic) * s.k + i) * s.k + j];
          for (std::size_t y = 0; y < s.out_h; ++y) {
            double* orow = oplane + y * s.out_w;
            if (padding == Padding::valid) {
              const double* irow = iplane + (y + i) * s.in_w + j;
              for (std::size_t x = 0; x < s.out_w; ++x) orow[x] += wv * irow[x];
            } else {
              const std::size_t yy = (y + i) % s.in_h;
              const double* irow = iplane + yy * s.in_w;
              for (std::size_t x = 0; x < s.out_w; ++x) orow[x] += wv * irow[(x + j) % s.in_w];
            }
          }
        }
      }
    }
  }
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels, const Tensor& grad_output,
                            Padding padding, bool want_input) {
  const ConvShape s = conv_shape(input, kernels, padding);
  if (grad_output.shape() != std::vector<std::size_t>{s.out_c, s.out_h, s.out_w}) {
    throw ValidationError("conv2d_backward: gradient shape mismatch");
  }
  Conv2dGrads g{want_input ? Tensor(input.shape()) : Tensor(), Tensor(kernels.shape()),
                Tensor({s.out_c})};
  const double* in = input.data().data();
  const double* w = kernels.data().data();
  const double* go = grad_output.data().data();
  double* gw = g.kernels.data().data();
  double* gi = want_input ? g.input.data().data() : nullptr;

  for (std::size_t oc = 0; oc < s.out_c; ++oc) {
    const double* gplane = go + oc * s.out_h * s.out_w;
    double bsum = 0.0;
    for (std::size_t n = 0; n < s.out_h * s.out_w; ++n) bsum += gplane[n];
    g.bias[oc] = bsum;
    for (std::size_t ic = 0; ic < s.in_c; ++ic) {
      const double* iplane = in + ic * s.in_h * s.in_w;
      double* giplane = gi ? gi + ic * s.in_h * s.in_w : nullptr;
      for (std::size_t i = 0; i < s.k; ++i) {
        for (std::size_t j = 0; j < s.k; ++j) {
          const std::size_t widx = ((oc * s.in_c + ic) * s.k + i) * s.k + j;
          const double wv = w[widx];
          double acc = 0.0;
          for (std::size_t y = 0; y < s.out_h; ++y) {
            const double* grow = gplane + y * s.out_w;
            if (padding == Padding::valid) {
              const double* irow = iplane + (y + i) * s.in_w + j;
              for (std::size_t x = 0; x < s.out_w; ++x) acc += grow[x] * irow[x];
              if (giplane) {
                double* girow = giplane + (y + i) * s.in_w + j;
                for (std::size_t x = 0; x < s.out_w; ++x) girow[x] += wv * grow[x];
              }
            } else {
              const std::size_t yy = (y + i) % s.in_h;
              const double* irow = iplane + yy * s.in_w;
              for (std::size_t x = 0; x < s.out_w; ++x) acc += grow[x] * irow[(x + j) % s.in_w];
              if (giplane) {
                double* girow = giplane + yy * s.in_w;
                for (std::size_t x = 0; x < s.out_w; ++x) girow[(x + j) % s.in_w] += wv * grow[x];
              }
            }
          }
          gw[widx] = acc;
        }
      }
    }
  }
  return g;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_output) {
  if (input.shape() != grad_output.shape()) throw ValidationError("relu_backward: shape mismatch");
  Tensor g = grad_output;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(input[i] > 0.0)) g[i] = 0.0;
  }
  return g;
}

Tensor avg_pool2(const Tensor& input) {
  if (input.rank() != 3) throw ValidationError("avg_pool2: expected (C,H,W)");
  const std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  if (h % 2 != 0 || w % 2 != 0) {
    throw ValidationError("avg_pool2: spatial dims must be even, got " + std::to_string(h) + "x" +
                          std::to_string(w));
  }
  Tensor out({c, h / 2, w / 2});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h / 2; ++y) {
      for (std::size_t x = 0; x < w / 2; ++x) {
        out.at(ch, y, x) = 0.25 * (input.at(ch, 2 * y, 2 * x) + input.at(ch, 2 * y, 2 * x + 1) +
                                   input.at(ch, 2 * y + 1, 2 * x) + input.at(ch, 2 * y + 1, 2 * x + 1));
      }
    }
  }
  return out;
}

Tensor avg_pool2_backward(const Tensor& input, const Tensor& grad_output) {
  Tensor g(input.shape());
  const std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  if (grad_output.shape() != std::vector<std::size_t>{c, h / 2, w / 2}) {
    throw ValidationError("avg_pool2_backward: gradient shape mismatch");
  }
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) g.at(ch, y, x) = 0.25 * grad_output.at(ch, y / 2, x / 2);
    }
  }
  return g;
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  if (weights.rank() != 2 || weights.dim(1) != input.size() || bias.size() != weights.dim(0)) {
    throw ValidationError("dense: shape mismatch");
  }
  const std::size_t out_n = weights.dim(0), in_n = weights.dim(1);
  Tensor out({out_n});
  const double* x = input.data().data();
  for (std::size_t o = 0; o < out_n; ++o) {
    const double* row = weights.data().data() + o * in_n;
    double acc = bias[o];
    for (std::size_t i = 0; i < in_n; ++i) acc += row[i] * x[i];
    out[o] = acc;
  }
  return out;
}

DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_output) {
  const std::size_t out_n = weights.dim(0), in_n = weights.dim(1);
  if (grad_output.size() != out_n || input.size() != in_n) throw ValidationError("dense_backward: shape mismatch");
  DenseGrads g{Tensor(input.shape()), Tensor(weights.shape()), Tensor({out_n})};
  const double* x = input.data().data();
  double* gx = g.input.data().data();
  for (std::size_t o = 0; o < out_n; ++o) {
    const double go = grad_output[o];
    g.bias[o] = go;
    const double* row = weights.data().data() + o * in_n;
    double* grow = g.weights.data().data() + o * in_n;
    for (std::size_t i = 0; i < in_n; ++i) {
      grow[i] = go * x[i];
      gx[i] += go * row[i];
    }
  }
  return g;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += (p[i] = std::exp(logits[i] - m));
  for (double& v : p) v /= z;
  return p;
}

double cross_entropy(std::span<const double> logits, int label) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  return std::log(z) + m - logits[static_cast<std::size_t>(label)];
}

std::vector<double> cross_entropy_grad(std::span<const double> logits, int label) {
  std::vector<double> g = softmax(logits);
  g[static_cast<std::size_t>(label)] -= 1.0;
  return g;
}

int argmax(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

Tensor circular_shift(const Tensor& input, int dy, int dx) {
  if (input.rank() != 3) throw ValidationError("circular_shift: expected (C,H,W)");
  const int h = static_cast<int>(input.dim(1));
  const int w = static_cast<int>(input.dim(2));
  Tensor out(input.shape());
  for (std::size_t c = 0; c < input.dim(0); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        out.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
            input.at(c, static_cast<std::size_t>(wrap(y - dy, h)), static_cast<std::size_t>(wrap(x - dx, w)));
      }
    }
  }
  return out;
}

}  // namespace tnt::nn
