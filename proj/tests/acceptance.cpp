// End-to-end acceptance run: one PASS/FAIL line per criterion, each with its
// measured values and runtime. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tnt/dataset.hpp"
#include "tnt/errors.hpp"
#include "tnt/event_io.hpp"
#include "tnt/idx.hpp"
#include "tnt/layers.hpp"
#include "tnt/model.hpp"
#include "tnt/pipeline.hpp"
#include "tnt/sim.hpp"
#include "tnt/train.hpp"
#include "tnt/verify.hpp"
#include "tnt/volume.hpp"

using namespace tnt;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string check_detail(const verify::CheckResult& c) {
  return c.name + "=" + fmt("%.3g", c.measured) +
         (c.comparison == verify::Comparison::at_most ? "<=" : ">=") + fmt("%.3g", c.threshold);
}

// ---- AC1-AC5: property suites ----

Outcome prop2_coordinate() {
  const auto c = verify::check_prop2_coordinate(101, 100, 1000);
  return {c.passed, check_detail(c)};
}

Outcome prop2_volume() {
  const auto c = verify::check_prop2_volume(102, 20);
  return {c.passed, check_detail(c)};
}

Outcome prop3() {
  const auto a = verify::check_prop3_coordinate(103, 100);
  const auto b = verify::check_prop3_volume(103, 100);
  return {a.passed && b.passed, check_detail(a) + " " + check_detail(b)};
}

Outcome prop1() {
  const auto a = verify::check_prop1_witness(104);
  const auto b = verify::check_prop1_zero_flow(104);
  return {a.passed && b.passed, check_detail(a) + " " + check_detail(b)};
}

Outcome conv_translation() {
  const auto c = verify::check_conv_translation(105, 50);
  return {c.passed, check_detail(c)};
}

// ---- AC6: voxelizer conservation ----

Outcome conservation() {
  std::mt19937_64 rng(106);
  const SensorGeometry g{34, 34};
  const int bins = 9;
  EventStream all;
  all.geometry = g;
  all.time_unit = TimeUnit::scaled;
  double polarity_sum = 0.0;
  double worst_event = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Event e;
    e.x = (g.width - 1) * uniform01(rng);
    e.y = (g.height - 1) * uniform01(rng);
    e.t = (bins - 1) * uniform01(rng);
    e.p = (rng() & 1) ? 1 : -1;
    all.events.push_back(e);
    polarity_sum += e.p;
    EventStream one = all;
    one.events = {e};
    worst_event = std::max(worst_event, std::abs(build_volume(one, g, bins).sum() - e.p));
  }
  const double total_gap = std::abs(build_volume(all, g, bins).sum() - polarity_sum);
  return {total_gap <= 1e-9 && worst_event <= 1e-12,
          "total_gap=" + fmt("%.3g", total_gap) + "<=1e-9 per_event_gap=" + fmt("%.3g", worst_event) +
              "<=1e-12"};
}

// ---- AC7: gradient checks ----

constexpr double kStep = 1e-5;

nn::Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, double lo = -1.0,
                         double hi = 1.0) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.data()) v = lo + (hi - lo) * uniform01(rng);
  return t;
}

double dot(const nn::Tensor& a, const nn::Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
}

double fd_check(nn::Tensor& x, const nn::Tensor& analytic, const std::function<double()>& f) {
  if (x.shape() != analytic.shape()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + kStep;
    const double up = f();
    x[i] = saved - kStep;
    const double down = f();
    x[i] = saved;
    worst = std::max(worst, rel_error(analytic[i], (up - down) / (2 * kStep)));
  }
  return worst;
}

Outcome gradients() {
  using namespace tnt::nn;
  std::mt19937_64 rng(107);
  std::vector<std::pair<std::string, double>> errs;

  for (Padding pad : {Padding::valid, Padding::circular}) {
    auto x = random_tensor({2, 5, 6}, rng);
    auto k = random_tensor({3, 2, 3, 3}, rng);
    auto b = random_tensor({3}, rng);
    const auto g = random_tensor(conv2d(x, k, b, pad).shape(), rng);
    const auto grads = conv2d_backward(x, k, g, pad);
    auto loss = [&] { return dot(conv2d(x, k, b, pad), g); };
    const std::string tag = pad == Padding::valid ? "conv" : "conv_circ";
    errs.push_back({tag, std::max({fd_check(x, grads.input, loss), fd_check(k, grads.kernels, loss),
                                   fd_check(b, grads.bias, loss)})});
  }
  {
    auto x = random_tensor({2, 3, 3}, rng);
    const auto g = random_tensor(x.shape(), rng);
    errs.push_back({"relu", fd_check(x, relu_backward(x, g), [&] { return dot(relu(x), g); })});
  }
  {
    auto x = random_tensor({2, 4, 6}, rng);
    const auto g = random_tensor({2, 2, 3}, rng);
    errs.push_back({"pool", fd_check(x, avg_pool2_backward(x, g), [&] { return dot(avg_pool2(x), g); })});
  }
  {
    auto x = random_tensor({2, 2, 3}, rng);
    auto w = random_tensor({4, 12}, rng);
    auto b = random_tensor({4}, rng);
    const auto g = random_tensor({4}, rng);
    const auto grads = dense_backward(x, w, g);
    auto loss = [&] { return dot(dense(x, w, b), g); };
    errs.push_back({"dense", std::max({fd_check(x, grads.input, loss), fd_check(w, grads.weights, loss),
                                       fd_check(b, grads.bias, loss)})});
  }
  {
    auto z = random_tensor({5}, rng, -3, 3);
    const Tensor analytic({5}, cross_entropy_grad(z.data(), 2));
    errs.push_back({"xent", fd_check(z, analytic, [&] { return cross_entropy(z.data(), 2); })});
  }
  {
    ModelShape s;
    s.in_channels = 2;
    s.height = 10;
    s.width = 10;
    s.classes = 3;
    s.conv1_channels = 3;
    s.conv2_channels = 4;
    s.hidden = 5;
    Model model = Model::create(s, 7);
    for (auto& p : model.parameters()) {
      if (p.name.ends_with(".bias")) {
        for (double& v : p.value.data()) v = 0.1 * (2 * uniform01(rng) - 1);
      }
    }
    std::vector<Tensor> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(random_tensor({2, 10, 10}, rng, 0, 1));
    const std::vector<const Tensor*> ptrs = {&xs[0], &xs[1], &xs[2]};
    const std::vector<int> labels = {0, 2, 1};
    const auto g = loss_and_gradients(model, ptrs, labels, true);
    auto loss = [&] { return batch_loss(model, ptrs, labels); };
    double worst = 0.0;
    for (std::size_t p = 0; p < model.parameters().size(); ++p) {
      worst = std::max(worst, fd_check(model.parameters()[p].value, g.params[p], loss));
    }
    for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, fd_check(xs[i], g.inputs[i], loss));
    errs.push_back({"model", worst});
  }

  bool ok = true;
  std::string detail;
  for (const auto& [name, e] : errs) {
    ok = ok && e < 1e-4;
    detail += name + "=" + fmt("%.2g", e) + " ";
  }
  return {ok, detail + "(<1e-4)"};
}

// ---- AC8: simulator invariants ----

std::size_t dense_oracle_count(const PatternSource& pattern, const Trajectory& traj, const SimParams& params,
                               SensorGeometry g, int oversample) {
  const int steps = static_cast<int>(std::lround(traj.total_duration() * params.frame_rate)) * oversample;
  auto logs = [&](double t) {
    auto f = render(pattern, traj.offset_at(t), g);
    for (double& v : f.data) v = std::log(v + params.intensity_floor);
    return f.data;
  };
  auto ref = logs(0.0);
  std::size_t count = 0;
  for (int s = 1; s <= steps; ++s) {
    const auto cur = logs(traj.total_duration() * s / steps);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double d = cur[i] - ref[i];
      const auto k = static_cast<long>(std::floor(std::abs(d) / params.epsilon));
      count += static_cast<std::size_t>(k);
      ref[i] += (d > 0 ? 1 : -1) * k * params.epsilon;
    }
  }
  return count;
}

std::vector<std::string> dataset_bytes(const DatasetConfig& cfg, const std::filesystem::path& dir) {
  const auto manifest = generate_dataset(cfg, dir);
  std::vector<std::string> out = {test::slurp(dir / "manifest.json")};
  for (const auto& e : manifest.samples) out.push_back(test::slurp(dir / e.path));
  return out;
}

Outcome simulator() {
  const SensorGeometry g{34, 34};
  SimParams params;
  params.duration = 0.3;

  const auto glyph = PatternSource::builtin(3);
  const auto static_events = generate_events(glyph, Trajectory::constant(7, 7, {0, 0}, 0.3), params, g).size();

  bool monotone = true;
  const auto traj = Trajectory::constant(2, 6, {40, 10}, 0.3);
  std::size_t previous = SIZE_MAX;
  for (double eps : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    SimParams p = params;
    p.epsilon = eps;
    const auto n = generate_events(PatternSource::builtin(5), traj, p, g).size();
    monotone = monotone && n <= previous;
    previous = n;
  }

  double worst_ratio = 0.0;
  for (int id : {0, 4, 7}) {
    auto pattern = PatternSource::builtin(id);
    pattern.contrast = 0.8;
    const auto t = Trajectory::constant(1, 8, {40, 12}, 0.3);
    const double n = static_cast<double>(generate_events(pattern, t, params, g).size());
    const double oracle = static_cast<double>(dense_oracle_count(pattern, t, params, g, 10));
    worst_ratio = std::max(worst_ratio, oracle > 0 ? std::abs(n - oracle) / oracle : INFINITY);
  }

  test::TempDir dir("acc_sim");
  DatasetConfig cfg;
  cfg.samples_per_cell = 1;
  cfg.noise_rate = 0.5;
  cfg.seed = 108;
  const bool identical = dataset_bytes(cfg, dir / "a") == dataset_bytes(cfg, dir / "b");

  return {static_events == 0 && monotone && worst_ratio <= 0.1 && identical,
          "static_events=" + std::to_string(static_events) + " eps_monotone=" + (monotone ? "yes" : "no") +
              " oracle_gap=" + fmt("%.3f", worst_ratio) + "<=0.1 identical_dataset=" +
              (identical ? "yes" : "no")};
}

// ---- AC9: desk-scale generalization ----

// 10 glyph classes x 30 motions (6 directions x 5 speeds up to 60 px/s).
// Each glyph starts centered and moves away, so a motion-0 model sees
// only one direction and the slowest speed.
DatasetConfig experiment_config(std::uint64_t seed, int samples_per_cell, std::vector<int> subset) {
  DatasetConfig c;
  c.motions.count = 30;
  c.motions.speed_px_per_s = 60.0;
  c.motions.speed_levels = 5;
  c.start_phase = 0.0;
  c.samples_per_cell = samples_per_cell;
  c.seed = seed;
  c.motion_subset = std::move(subset);
  return c;
}

Outcome generalization() {
  test::TempDir dir("acc_exp");
  const auto train_cfg = experiment_config(109, 50, {0});
  const auto test_cfg = experiment_config(110, 2, {});
  const auto control_cfg = experiment_config(111, 10, {0});
  const auto train_m = generate_dataset(train_cfg, dir / "train");
  const auto test_m = generate_dataset(test_cfg, dir / "test");
  const auto control_m = generate_dataset(control_cfg, dir / "control");

  // Accuracies are averaged over three training seeds; single runs on 500
  // samples vary by several points.
  const std::vector<std::uint64_t> train_seeds = {112, 113, 114};
  nn::TrainConfig tc;

  struct Row {
    std::string name;
    double all = 0.0;
    double control = 0.0;
    std::string runs;
  };
  std::vector<Row> rows;
  for (Variant v : {Variant::baseline, Variant::tnt}) {
    TntOptions opts;
    opts.center_mode = CenterMode::centroid;
    const auto train_set = load_labeled_set(train_m, dir / "train", opts, v, tc.input_scale, tc.input_norm);
    const auto test_set = load_labeled_set(test_m, dir / "test", opts, v, tc.input_scale, tc.input_norm);
    const auto control_set =
        load_labeled_set(control_m, dir / "control", opts, v, tc.input_scale, tc.input_norm);
    nn::ModelShape shape;
    shape.classes = train_m.classes.size();
    Row row{v == Variant::baseline ? "baseline" : "tnt", 0.0, 0.0, ""};
    for (const auto seed : train_seeds) {
      tc.seed = seed;
      const auto model = nn::train(nn::Model::create(shape, seed), train_set, tc).model;
      const double acc = nn::evaluate(model, test_set).accuracy;
      row.all += acc / static_cast<double>(train_seeds.size());
      row.control += nn::evaluate(model, control_set).accuracy / static_cast<double>(train_seeds.size());
      row.runs += (row.runs.empty() ? "" : "/") + fmt("%.3f", acc);
    }
    rows.push_back(row);
  }
  const auto& base = rows[0];
  const auto& tnt = rows[1];
  const double gap = tnt.all - base.all;
  const bool control_ok =
      base.control >= 0.9 && tnt.control >= 0.9 && std::abs(base.control - tnt.control) <= 0.05;
  return {gap >= 0.05 && control_ok,
          "train=" + std::to_string(train_m.samples.size()) + " test=" + std::to_string(test_m.samples.size()) +
              " baseline_all=" + fmt("%.3f", base.all) + "(" + base.runs + ") tnt_all=" + fmt("%.3f", tnt.all) +
              "(" + tnt.runs + ")" +
              " gap=" + fmt("%+.3f", gap) + ">=0.05 control_baseline=" + fmt("%.3f", base.control) +
              " control_tnt=" + fmt("%.3f", tnt.control) + " (both>=0.90, within 0.05)"};
}

// ---- AC10: format round trips ----

template <class F>
bool rejects(F&& f) {
  try {
    f();
  } catch (const FormatError&) {
    return true;
  }
  return false;
}

template <class Read>
bool malformed_rejected(const std::string& bytes, Read read) {
  auto parse = [&](std::string b) {
    return [b, &read] {
      std::istringstream in(b);
      read(in);
    };
  };
  std::string bad_magic = bytes;
  bad_magic[0] ^= 0x5a;
  return rejects(parse(bad_magic)) && rejects(parse(bytes.substr(0, bytes.size() - 1))) &&
         rejects(parse(bytes.substr(0, 3))) && rejects(parse(""));
}

Outcome formats() {
  std::mt19937_64 rng(113);
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };

  {
    const auto s = test::random_raw_stream(rng, 500);
    std::ostringstream out;
    write_evt1(out, s);
    std::istringstream in(out.str());
    const auto back = read_evt1(in);
    expect(back.events == s.events && back.geometry == s.geometry, "evt1_roundtrip");
    expect(out.str().size() == kEvt1HeaderBytes + 500 * kEvt1RecordBytes, "evt1_size");
    expect(malformed_rejected(out.str(), [](std::istream& i) { read_evt1(i); }), "evt1_malformed");
  }
  {
    EventVolume v({7, 5}, 4);
    for (double& x : v.data()) x = 2 * uniform01(rng) - 1;
    std::ostringstream out;
    write_vol1(out, v);
    std::istringstream in(out.str());
    expect(read_vol1(in) == v, "vol1_roundtrip");
    expect(out.str().size() == 16 + 7 * 5 * 4 * 8, "vol1_size");
    expect(malformed_rejected(out.str(), [](std::istream& i) { read_vol1(i); }), "vol1_malformed");
  }
  {
    nn::ModelShape s;
    s.in_channels = 3;
    s.height = 10;
    s.width = 10;
    s.classes = 4;
    const auto m = nn::Model::create(s, 114);
    std::ostringstream out;
    nn::write_model(out, m);
    std::istringstream in(out.str());
    const auto back = nn::read_model(in);
    std::ostringstream again;
    nn::write_model(again, back);
    expect(back == m && again.str() == out.str(), "mdl1_roundtrip");
    expect(malformed_rejected(out.str(), [](std::istream& i) { nn::read_model(i); }), "mdl1_malformed");
  }
  {
    Manifest m;
    m.geometry = {34, 34};
    m.classes = {3, 7};
    m.samples = {{"samples/a.evt", 0, 0, 40, 0, 1}, {"samples/b.evt", 1, 5, -12.5, 3.25, 2}};
    const auto text = manifest_to_json(m);
    expect(parse_manifest(text) == m, "manifest_roundtrip");
    expect(rejects([&] { parse_manifest(text.substr(0, text.size() / 2)); }), "manifest_truncated");
    expect(rejects([&] { parse_manifest(R"({"geometry": {"width": 3}})"); }), "manifest_missing_fields");
  }
  {
    IdxImages img;
    img.count = 3;
    img.rows = 4;
    img.cols = 5;
    for (int i = 0; i < 60; ++i) img.pixels.push_back(static_cast<std::uint8_t>(rng()));
    std::ostringstream out;
    write_idx_images(out, img);
    std::istringstream in(out.str());
    const auto back = read_idx_images(in);
    expect(back.count == 3 && back.rows == 4 && back.cols == 5 && back.pixels == img.pixels, "idx_images");
    std::string bad = out.str();
    bad[3] = 0x01;
    expect(rejects([&] {
             std::istringstream i(bad);
             read_idx_images(i);
           }) &&
               rejects([&] {
                 std::istringstream i(out.str().substr(0, out.str().size() - 1));
                 read_idx_images(i);
               }),
           "idx_images_malformed");

    const std::vector<std::uint8_t> labels = {1, 0, 9, 4};
    std::ostringstream lo;
    write_idx_labels(lo, labels);
    std::istringstream li(lo.str());
    expect(read_idx_labels(li) == labels, "idx_labels");
    std::string badl = lo.str();
    badl[3] = 0x03;
    expect(rejects([&] {
             std::istringstream i(badl);
             read_idx_labels(i);
           }) &&
               rejects([&] {
                 std::istringstream i(lo.str().substr(0, lo.str().size() - 1));
                 read_idx_labels(i);
               }),
           "idx_labels_malformed");
  }

  std::string detail = "evt1 vol1 mdl1 manifest idx";
  if (!failed.empty()) {
    detail += " failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

struct Criterion {
  const char* id;
  const char* title;
  double budget_s;
  Outcome (*run)();
};

}  // namespace

// Optional arguments select criteria by id, e.g. `acceptance AC1 AC9`.
int main(int argc, char** argv) {
  const std::vector<std::string> only(argv + 1, argv + argc);
  const std::vector<Criterion> criteria = {
      {"AC1", "flow-to-translation, coordinates", 5, prop2_coordinate},
      {"AC2", "flow-to-translation, volumes", 30, prop2_volume},
      {"AC3", "centroid TNT translation invariance", 30, prop3},
      {"AC4", "plain 3-D convolution witness", 5, prop1},
      {"AC5", "circular convolution shift equivariance", 5, conv_translation},
      {"AC6", "voxelizer conservation", 5, conservation},
      {"AC7", "gradient checks", 60, gradients},
      {"AC8", "simulator invariants", 60, simulator},
      {"AC9", "motion generalization experiment", 900, generalization},
      {"AC10", "file format round trips", 5, formats},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.passed && in_time;
    failures += pass ? 0 : 1;
    std::cout << (pass ? "PASS " : "FAIL ") << c.id << " " << c.title << ": " << o.detail << " time="
              << fmt("%.2f", secs) << "s<=" << fmt("%.0f", c.budget_s) << "s" << (in_time ? "" : " (too slow)")
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
