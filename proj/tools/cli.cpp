#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnt/dataset.hpp"
#include "tnt/errors.hpp"
#include "tnt/event_io.hpp"
#include "tnt/layers.hpp"
#include "tnt/pipeline.hpp"
#include "tnt/train.hpp"
#include "tnt/verify.hpp"
#include "tnt/volume.hpp"

namespace tnt::cli {

namespace {

using nlohmann::json;

// Optional JSON run config. Keys are option names with '_' for '-'; a flag
// given on the command line always wins over the file.
class RunConfig {
 public:
  void load(const std::string& path, const std::set<std::string>& allowed) {
    if (path.empty()) return;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    try {
      values_ = json::parse(in);
    } catch (const json::parse_error& e) {
      throw FormatError("run config: " + std::string(e.what()));
    }
    if (!values_.is_object()) throw ValidationError("run config must be a JSON object");
    for (const auto& [key, value] : values_.items()) {
      if (!allowed.contains(key)) throw ValidationError("unknown key '" + key + "' in run config");
    }
  }

  template <typename T>
  void apply(const CLI::App& app, const std::string& key, T& dst) const {
    if (!values_.is_object() || !values_.contains(key)) return;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (app.get_option(flag)->count() > 0) return;
    try {
      dst = values_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValidationError("run config: bad value for '" + key + "'");
    }
  }

 private:
  json values_;
};

Variant parse_variant(const std::string& s) {
  if (s == "baseline") return Variant::baseline;
  if (s == "tnt") return Variant::tnt;
  throw ValidationError("variant must be baseline or tnt, got '" + s + "'");
}

CenterMode parse_center(const std::string& s) {
  if (s == "none") return CenterMode::none;
  if (s == "canvas") return CenterMode::canvas;
  if (s == "centroid") return CenterMode::centroid;
  throw ValidationError("center must be none, canvas or centroid, got '" + s + "'");
}

// "all" or "" -> empty (no filter); otherwise comma-separated motion ids.
std::vector<int> parse_motion_list(const std::string& s) {
  std::vector<int> ids;
  if (s.empty() || s == "all") return ids;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int id = std::stoi(item, &used);
      if (used != item.size() || id < 0) throw std::invalid_argument(item);
      ids.push_back(id);
    } catch (const std::exception&) {
      throw ValidationError("bad motion id '" + item + "'");
    }
  }
  if (ids.empty()) throw ValidationError("empty motion list");
  return ids;
}

struct PrepOptions {
  std::string variant = "tnt";
  std::string center = "centroid";
  int bins = 9;
  double min_time = 0.0;
  double input_scale = 1.0;
  std::string input_norm = "per_bin";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--variant", variant, "baseline or tnt")->capture_default_str();
    cmd.add_option("--center", center, "none, canvas or centroid (tnt only)")->capture_default_str();
    cmd.add_option("--bins", bins, "temporal bins B")->capture_default_str();
    cmd.add_option("--min-time", min_time, "drop events with scaled t <= this before normalizing")
        ->capture_default_str();
  }
  void add_scale_to(CLI::App& cmd) {
    cmd.add_option("--input-scale", input_scale, "network input scale")->capture_default_str();
    cmd.add_option("--input-norm", input_norm, "global or per_bin magnitude normalization")
        ->capture_default_str();
  }
  void apply(const RunConfig& rc, const CLI::App& cmd) {
    rc.apply(cmd, "variant", variant);
    rc.apply(cmd, "center", center);
    rc.apply(cmd, "bins", bins);
    rc.apply(cmd, "min_time", min_time);
    if (cmd.get_option_no_throw("--input-scale")) rc.apply(cmd, "input_scale", input_scale);
    if (cmd.get_option_no_throw("--input-norm")) rc.apply(cmd, "input_norm", input_norm);
  }
  nn::InputNorm norm() const {
    if (input_norm == "global") return nn::InputNorm::global;
    if (input_norm == "per_bin") return nn::InputNorm::per_bin;
    throw ValidationError("unknown input norm '" + input_norm + "' (expected global or per_bin)");
  }
  TntOptions tnt_options() const {
    TntOptions o;
    o.bins = bins;
    o.center_mode = parse_center(center);
    o.min_time = min_time;
    validate(o);
    return o;
  }
};

std::filesystem::path parent_or_dot(const std::string& path) {
  auto p = std::filesystem::path(path).parent_path();
  return p.empty() ? std::filesystem::path(".") : p;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-stream simulation, temporal normalization and classification"};
  app.require_subcommand(1);

  // simulate
  std::string sim_config, sim_out;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic moving-glyph dataset");
  simulate->add_option("--config", sim_config, "dataset config JSON")->required();
  simulate->add_option("--out", sim_out, "output directory")->required();

  // voxelize
  std::string vox_input, vox_out, vox_config;
  int vox_width = 0, vox_height = 0;
  PrepOptions vox_prep;
  auto* voxelize = app.add_subcommand("voxelize", "turn an event file into a VOL1 volume");
  voxelize->add_option("--input", vox_input, "EVT1 or CSV event file")->required();
  voxelize->add_option("--out", vox_out, "VOL1 output path")->required();
  voxelize->add_option("--config", vox_config, "optional JSON run config");
  voxelize->add_option("--width", vox_width, "sensor width (CSV input only)");
  voxelize->add_option("--height", vox_height, "sensor height (CSV input only)");
  vox_prep.add_to(*voxelize);

  // train
  std::string tr_manifest, tr_out, tr_metrics, tr_config, tr_motions = "all", tr_val_manifest,
                                                          tr_val_motions = "all";
  nn::TrainConfig tr_cfg;
  PrepOptions tr_prep;
  auto* train = app.add_subcommand("train", "train the classifier on a manifest");
  train->add_option("--manifest", tr_manifest, "dataset manifest")->required();
  train->add_option("--out", tr_out, "MDL1 output path")->required();
  train->add_option("--metrics", tr_metrics, "metrics CSV output path");
  train->add_option("--config", tr_config, "optional JSON run config");
  train->add_option("--train-motions", tr_motions, "motion ids to train on, or 'all'")->capture_default_str();
  train->add_option("--val-manifest", tr_val_manifest, "optional validation manifest");
  train->add_option("--val-motions", tr_val_motions, "motion ids for validation, or 'all'")->capture_default_str();
  train->add_option("--seed", tr_cfg.seed, "initialisation and shuffling seed")->capture_default_str();
  train->add_option("--epochs", tr_cfg.epochs, "training epochs")->capture_default_str();
  train->add_option("--lr", tr_cfg.learning_rate, "learning rate")->capture_default_str();
  train->add_option("--momentum", tr_cfg.momentum, "SGD momentum")->capture_default_str();
  train->add_option("--batch-size", tr_cfg.batch_size, "mini-batch size")->capture_default_str();
  tr_prep.add_to(*train);
  tr_prep.add_scale_to(*train);

  // eval
  std::string ev_model, ev_manifest, ev_report, ev_config, ev_motions = "all";
  PrepOptions ev_prep;
  auto* eval = app.add_subcommand("eval", "evaluate a trained model on a manifest");
  eval->add_option("--model", ev_model, "MDL1 model")->required();
  eval->add_option("--manifest", ev_manifest, "dataset manifest")->required();
  eval->add_option("--report", ev_report, "per-motion accuracy CSV");
  eval->add_option("--config", ev_config, "optional JSON run config");
  eval->add_option("--test-motions", ev_motions, "motion ids to evaluate, or 'all'")->capture_default_str();
  ev_prep.add_to(*eval);
  ev_prep.add_scale_to(*eval);

  // verify
  std::string ver_out;
  std::uint64_t ver_seed = 1;
  auto* verify = app.add_subcommand("verify", "run the equivariance verification suite");
  verify->add_option("--out", ver_out, "JSON report path")->required();
  verify->add_option("--seed", ver_seed, "base seed")->capture_default_str();

  // info
  std::string info_input;
  int info_width = 0, info_height = 0;
  auto* info = app.add_subcommand("info", "summarise an event file");
  info->add_option("--input", info_input, "EVT1 or CSV event file")->required();
  info->add_option("--width", info_width, "sensor width (CSV input only)");
  info->add_option("--height", info_height, "sensor height (CSV input only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  const std::set<std::string> prep_keys = {"variant", "center", "bins", "min_time", "input_scale",
                                          "input_norm"};

  try {
    if (simulate->parsed()) {
      const DatasetConfig config = load_dataset_config(sim_config);
      const Manifest manifest = generate_dataset(config, sim_out);
      out << "wrote " << manifest.samples.size() << " samples to " << sim_out << "\n";
    } else if (voxelize->parsed()) {
      RunConfig rc;
      rc.load(vox_config, prep_keys);
      vox_prep.apply(rc, *voxelize);
      const TntOptions opts = vox_prep.tnt_options();
      const EventStream stream = read_events(vox_input, {vox_width, vox_height});
      const EventVolume volume = event_volume(stream, opts, parse_variant(vox_prep.variant));
      write_vol1(vox_out, volume);
      out << "volume " << volume.width() << "x" << volume.height() << "x" << volume.bins() << " from "
          << stream.size() << " events, sum " << volume.sum() << "\n";
    } else if (train->parsed()) {
      RunConfig rc;
      std::set<std::string> keys = prep_keys;
      keys.insert({"seed", "epochs", "lr", "momentum", "batch_size", "train_motions", "val_motions"});
      rc.load(tr_config, keys);
      tr_prep.apply(rc, *train);
      rc.apply(*train, "seed", tr_cfg.seed);
      rc.apply(*train, "epochs", tr_cfg.epochs);
      rc.apply(*train, "lr", tr_cfg.learning_rate);
      rc.apply(*train, "momentum", tr_cfg.momentum);
      rc.apply(*train, "batch_size", tr_cfg.batch_size);
      rc.apply(*train, "train_motions", tr_motions);
      rc.apply(*train, "val_motions", tr_val_motions);
      tr_cfg.input_scale = tr_prep.input_scale;
      tr_cfg.input_norm = tr_prep.norm();
      nn::validate(tr_cfg);
      const TntOptions opts = tr_prep.tnt_options();
      const Variant variant = parse_variant(tr_prep.variant);

      const Manifest manifest = filter_motions(read_manifest(tr_manifest), parse_motion_list(tr_motions));
      if (manifest.samples.empty()) throw ValidationError("no training samples after motion filter");
      const nn::LabeledSet data =
          load_labeled_set(manifest, parent_or_dot(tr_manifest), opts, variant, tr_cfg.input_scale,
                           tr_cfg.input_norm);
      std::optional<nn::LabeledSet> val;
      if (!tr_val_manifest.empty()) {
        const Manifest vm = filter_motions(read_manifest(tr_val_manifest), parse_motion_list(tr_val_motions));
        val = load_labeled_set(vm, parent_or_dot(tr_val_manifest), opts, variant, tr_cfg.input_scale,
                               tr_cfg.input_norm);
      }
      nn::ModelShape shape;
      shape.in_channels = static_cast<std::size_t>(opts.bins);
      shape.height = static_cast<std::size_t>(manifest.geometry.height);
      shape.width = static_cast<std::size_t>(manifest.geometry.width);
      shape.classes = manifest.classes.size();
      const nn::TrainResult result =
          nn::train(nn::Model::create(shape, tr_cfg.seed), data, tr_cfg, val ? &*val : nullptr);
      nn::write_model(tr_out, result.model);
      if (!tr_metrics.empty()) nn::write_metrics_csv(tr_metrics, result.metrics);
      const auto& last = result.metrics.back();
      out << "trained on " << data.size() << " samples; final " << last.split << " loss " << last.loss
          << " accuracy " << last.accuracy << "\n";
    } else if (eval->parsed()) {
      RunConfig rc;
      std::set<std::string> keys = prep_keys;
      keys.insert("test_motions");
      rc.load(ev_config, keys);
      ev_prep.apply(rc, *eval);
      rc.apply(*eval, "test_motions", ev_motions);
      const TntOptions opts = ev_prep.tnt_options();
      const nn::Model model = nn::read_model(ev_model);
      const Manifest manifest = filter_motions(read_manifest(ev_manifest), parse_motion_list(ev_motions));
      if (manifest.classes.size() != model.shape().classes) {
        throw ValidationError("model class count does not match the manifest");
      }
      const nn::LabeledSet data = load_labeled_set(manifest, parent_or_dot(ev_manifest), opts,
                                                   parse_variant(ev_prep.variant), ev_prep.input_scale,
                                                   ev_prep.norm());
      const nn::EvalResult overall = nn::evaluate(model, data);

      // Per-motion breakdown, motion ids ascending.
      std::map<int, std::pair<std::size_t, std::size_t>> per_motion;  // id -> (count, correct)
      for (std::size_t i = 0; i < data.size(); ++i) {
        const int predicted = nn::argmax(model.forward(data.inputs[i]).data());
        auto& cell = per_motion[manifest.samples[i].motion_id];
        ++cell.first;
        if (predicted == data.labels[i]) ++cell.second;
      }
      if (!ev_report.empty()) {
        std::ofstream rep(ev_report, std::ios::binary | std::ios::trunc);
        if (!rep) throw IoError("cannot open " + ev_report + " for writing");
        rep << "motion_id,count,correct,accuracy\n";
        for (const auto& [id, cell] : per_motion) {
          rep << id << ',' << cell.first << ',' << cell.second << ','
              << static_cast<double>(cell.second) / static_cast<double>(cell.first) << '\n';
        }
        std::size_t correct = 0;
        for (const auto& [id, cell] : per_motion) correct += cell.second;
        rep << "all," << data.size() << ',' << correct << ',' << overall.accuracy << '\n';
        if (!rep) throw IoError("failed writing " + ev_report);
      }
      out << "accuracy " << overall.accuracy << " on " << overall.count << " samples (loss " << overall.loss
          << ")\nconfusion (rows = true class):\n";
      for (const auto& row : overall.confusion) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
        out << "\n";
      }
    } else if (verify->parsed()) {
      const verify::Report report = verify::run_suite(ver_seed);
      verify::write_report(ver_out, report);
      for (const auto& c : report.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured
            << (c.comparison == verify::Comparison::at_most ? " <= " : " >= ") << c.threshold << "\n";
      }
      if (!report.all_passed()) return kExitVerification;
    } else if (info->parsed()) {
      const EventStream stream = read_events(info_input, {info_width, info_height});
      const PolarityCounts pc = count_polarities(stream.events);
      out << "events: " << stream.size() << "\n"
          << "geometry: " << stream.geometry.width << "x" << stream.geometry.height << "\n";
      if (!stream.empty()) {
        out << "time span (us): " << stream.events.front().t << " .. " << stream.events.back().t << "\n";
      }
      out << "positive: " << pc.positive << "\nnegative: " << pc.negative << "\n";
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace tnt::cli
