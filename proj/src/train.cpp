#include "tnt/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "tnt/errors.hpp"
#include "tnt/layers.hpp"
#include "tnt/sim.hpp"

namespace tnt::nn {

void validate(const TrainConfig& c) {
  if (!(c.learning_rate >= 0.0) || !std::isfinite(c.learning_rate)) {
    throw ValidationError("learning rate must be finite and >= 0");
  }
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw ValidationError("momentum must be in [0, 1)");
  if (c.epochs < 0) throw ValidationError("epochs must be >= 0");
  if (c.batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (!(c.input_scale > 0.0)) throw ValidationError("input scale must be > 0");
}

Tensor to_network_input(const EventVolume& volume, double input_scale, InputNorm norm) {
  const auto b = static_cast<std::size_t>(volume.bins());
  const auto h = static_cast<std::size_t>(volume.height());
  const auto w = static_cast<std::size_t>(volume.width());
  std::vector<double> data(volume.data().begin(), volume.data().end());
  if (norm == InputNorm::global) {
    const double scale = input_scale / std::max(1.0, volume.max_abs());
    for (double& v : data) v *= scale;
  } else {
    const std::size_t plane = h * w;
    for (std::size_t k = 0; k < b; ++k) {
      const auto first = data.begin() + static_cast<std::ptrdiff_t>(k * plane);
      const auto last = first + static_cast<std::ptrdiff_t>(plane);
      double peak = 1.0;
      for (auto it = first; it != last; ++it) peak = std::max(peak, std::abs(*it));
      const double scale = input_scale / peak;
      for (auto it = first; it != last; ++it) *it *= scale;
    }
  }
  return Tensor({b, h, w}, std::move(data));
}

EvalResult evaluate(const Model& model, const LabeledSet& data) {
  const std::size_t classes = model.shape().classes;
  EvalResult r;
  r.count = data.size();
  r.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  if (data.size() == 0) return r;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Tensor logits = model.forward(data.inputs[i]);
    const int predicted = argmax(logits.data());
    r.loss += cross_entropy(logits.data(), data.labels[i]);
    r.confusion.at(static_cast<std::size_t>(data.labels[i])).at(static_cast<std::size_t>(predicted))++;
    if (predicted == data.labels[i]) ++correct;
  }
  r.loss /= static_cast<double>(data.size());
  r.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return r;
}

TrainResult train(Model model, const LabeledSet& data, const TrainConfig& config,
                  const LabeledSet* validation) {
  validate(config);
  if (data.size() == 0) throw ValidationError("train: empty dataset");
  if (data.labels.size() != data.size()) throw ValidationError("train: labels and inputs differ in length");

  TrainResult result;
  {
    const EvalResult initial = evaluate(model, data);
    result.metrics.push_back({0, "train", initial.loss, initial.accuracy});
    if (validation) {
      const EvalResult v = evaluate(model, *validation);
      result.metrics.push_back({0, "val", v.loss, v.accuracy});
    }
  }

  auto& params = model.parameters();
  std::vector<Tensor> velocity;
  for (const auto& p : params) velocity.emplace_back(p.value.shape());

  std::vector<std::size_t> order(data.size());
  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(config.seed, 0x73687566ULL, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(order[i - 1], order[j]);
    }

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<const Tensor*> xs;
    std::vector<int> ys;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      xs.clear();
      ys.clear();
      for (std::size_t k = start; k < stop; ++k) {
        xs.push_back(&data.inputs[order[k]]);
        ys.push_back(data.labels[order[k]]);
      }
      const Gradients g = loss_and_gradients(model, xs, ys);
      loss_sum += g.loss * static_cast<double>(stop - start);
      correct += g.correct;
      for (std::size_t p = 0; p < params.size(); ++p) {
        auto v = velocity[p].data();
        auto w = params[p].value.data();
        const auto grad = g.params[p].data();
        for (std::size_t k = 0; k < v.size(); ++k) {
          v[k] = config.momentum * v[k] - config.learning_rate * grad[k];
          w[k] += v[k];
        }
      }
    }
    const auto n = static_cast<double>(data.size());
    result.metrics.push_back({epoch, "train", loss_sum / n, static_cast<double>(correct) / n});
    if (validation) {
      const EvalResult v = evaluate(model, *validation);
      result.metrics.push_back({epoch, "val", v.loss, v.accuracy});
    }
  }
  result.model = std::move(model);
  return result;
}

void write_metrics_csv(std::ostream& out, const std::vector<EpochMetrics>& metrics) {
  out << "epoch,split,loss,accuracy\n";
  char buf[32];
  for (const auto& m : metrics) {
    out << m.epoch << ',' << m.split << ',';
    out.write(buf, std::to_chars(buf, buf + sizeof(buf), m.loss).ptr - buf);
    out << ',';
    out.write(buf, std::to_chars(buf, buf + sizeof(buf), m.accuracy).ptr - buf);
    out << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& metrics) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_metrics_csv(out, metrics);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace tnt::nn
