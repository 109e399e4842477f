#include "tnt/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tnt/errors.hpp"
#include "tnt/event_io.hpp"

namespace tnt {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ValidationError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

template <typename T>
void take(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void validate(const DatasetConfig& c) {
  validate(c.geometry());
  if (c.width > 65535 || c.height > 65535) throw ValidationError("geometry exceeds u16 range");
  if (c.bins < 2) throw ValidationError("bins must be >= 2");
  if (c.classes.empty()) throw ValidationError("class list is empty");
  for (int id : c.classes) {
    if (id < 0 || id >= kBuiltinGlyphCount) {
      throw ValidationError("class " + std::to_string(id) + " is not a built-in glyph id");
    }
  }
  if (c.motions.count < 1) throw ValidationError("motions.count must be >= 1");
  if (c.motions.speed_levels < 1 || c.motions.count % c.motions.speed_levels != 0) {
    throw ValidationError("motions.count must be a multiple of motions.speed_levels");
  }
  if (!(c.motions.speed_px_per_s >= 0.0)) throw ValidationError("motions.speed_px_per_s must be >= 0");
  if (c.samples_per_cell < 1) throw ValidationError("samples_per_cell must be >= 1");
  if (!(c.duration_s > 0.0)) throw ValidationError("duration_s must be > 0");
  if (!(c.contrast_lo > 0.0) || c.contrast_hi < c.contrast_lo) {
    throw ValidationError("contrast_range must satisfy 0 < lo <= hi");
  }
  if (!(c.offset_jitter_px >= 0.0)) throw ValidationError("offset_jitter_px must be >= 0");
  if (!(c.start_phase >= 0.0 && c.start_phase <= 1.0)) throw ValidationError("start_phase must be in [0, 1]");
  for (int m : c.motion_subset) {
    if (m < 0 || m >= c.motions.count) throw ValidationError("motion_subset id out of range");
  }
  SimParams p;
  p.epsilon = c.epsilon;
  p.frame_rate = c.frame_rate;
  p.noise_rate = c.noise_rate;
  validate(p);
}

DatasetConfig parse_dataset_config(const std::string& json_text) {
  const json j = parse_json(json_text, "dataset config");
  if (!j.is_object()) throw ValidationError("dataset config must be a JSON object");
  reject_unknown(j,
                 {"width", "height", "bins", "classes", "motions", "samples_per_cell", "duration_s",
                  "frame_rate", "epsilon", "noise_rate", "contrast_range", "offset_jitter_px", "seed",
                  "motion_subset", "start_phase"},
                 "dataset config");
  DatasetConfig c;
  take(j, "width", c.width);
  take(j, "height", c.height);
  take(j, "bins", c.bins);
  take(j, "classes", c.classes);
  if (j.contains("motions")) {
    const json& m = j.at("motions");
    if (!m.is_object()) throw ValidationError("'motions' must be an object");
    reject_unknown(m, {"count", "speed_px_per_s", "speed_levels"}, "motions");
    take(m, "count", c.motions.count);
    take(m, "speed_px_per_s", c.motions.speed_px_per_s);
    take(m, "speed_levels", c.motions.speed_levels);
  }
  take(j, "samples_per_cell", c.samples_per_cell);
  take(j, "duration_s", c.duration_s);
  take(j, "frame_rate", c.frame_rate);
  take(j, "epsilon", c.epsilon);
  take(j, "noise_rate", c.noise_rate);
  if (j.contains("contrast_range")) {
    std::vector<double> range;
    take(j, "contrast_range", range);
    if (range.size() != 2) throw ValidationError("contrast_range must be [lo, hi]");
    c.contrast_lo = range[0];
    c.contrast_hi = range[1];
  }
  take(j, "offset_jitter_px", c.offset_jitter_px);
  take(j, "start_phase", c.start_phase);
  take(j, "seed", c.seed);
  take(j, "motion_subset", c.motion_subset);
  validate(c);
  return c;
}

DatasetConfig load_dataset_config(const std::filesystem::path& path) {
  return parse_dataset_config(slurp(path));
}

std::string dataset_config_to_json(const DatasetConfig& c) {
  json j = {{"width", c.width},
            {"height", c.height},
            {"bins", c.bins},
            {"classes", c.classes},
            {"motions",
             {{"count", c.motions.count},
              {"speed_px_per_s", c.motions.speed_px_per_s},
              {"speed_levels", c.motions.speed_levels}}},
            {"samples_per_cell", c.samples_per_cell},
            {"duration_s", c.duration_s},
            {"frame_rate", c.frame_rate},
            {"epsilon", c.epsilon},
            {"noise_rate", c.noise_rate},
            {"contrast_range", {c.contrast_lo, c.contrast_hi}},
            {"offset_jitter_px", c.offset_jitter_px},
            {"start_phase", c.start_phase},
            {"seed", c.seed}};
  if (!c.motion_subset.empty()) j["motion_subset"] = c.motion_subset;
  return j.dump(2);
}

std::string manifest_to_json(const Manifest& m) {
  json samples = json::array();
  for (const auto& s : m.samples) {
    samples.push_back({{"path", s.path},
                       {"label", s.label},
                       {"motion_id", s.motion_id},
                       {"vx", s.vx},
                       {"vy", s.vy},
                       {"seed", s.seed}});
  }
  json j = {{"geometry", {{"width", m.geometry.width}, {"height", m.geometry.height}}},
            {"classes", m.classes},
            {"samples", samples}};
  return j.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& json_text) {
  const json j = parse_json(json_text, "manifest");
  try {
    Manifest m;
    m.geometry.width = j.at("geometry").at("width").get<int>();
    m.geometry.height = j.at("geometry").at("height").get<int>();
    m.classes = j.at("classes").get<std::vector<int>>();
    for (const auto& s : j.at("samples")) {
      ManifestEntry e;
      e.path = s.at("path").get<std::string>();
      e.label = s.at("label").get<int>();
      e.motion_id = s.at("motion_id").get<int>();
      e.vx = s.at("vx").get<double>();
      e.vy = s.at("vy").get<double>();
      e.seed = s.at("seed").get<std::uint64_t>();
      if (e.label < 0 || e.label >= static_cast<int>(m.classes.size())) {
        throw FormatError("manifest: label out of range for " + e.path);
      }
      m.samples.push_back(std::move(e));
    }
    validate(m.geometry);
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  } catch (const ValidationError& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << manifest_to_json(manifest);
  if (!out) throw IoError("failed writing " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) { return parse_manifest(slurp(path)); }

Manifest filter_motions(const Manifest& manifest, const std::vector<int>& motion_ids) {
  if (motion_ids.empty()) return manifest;
  Manifest out = manifest;
  std::erase_if(out.samples, [&](const ManifestEntry& e) {
    return std::find(motion_ids.begin(), motion_ids.end(), e.motion_id) == motion_ids.end();
  });
  return out;
}

std::vector<Flow> motion_flows(const MotionConfig& motions) {
  return motion_set(motions.count, motions.speed_px_per_s, motions.speed_levels);
}

EventStream generate_sample(const DatasetConfig& config, const SampleSpec& spec,
                            std::uint64_t* sample_seed) {
  const std::uint64_t seed =
      mix_seed(config.seed, static_cast<std::uint64_t>(spec.class_index),
               static_cast<std::uint64_t>(spec.motion_id), static_cast<std::uint64_t>(spec.sample_index));
  if (sample_seed) *sample_seed = seed;
  std::mt19937_64 rng(seed);

  PatternSource pattern = PatternSource::builtin(config.classes.at(static_cast<std::size_t>(spec.class_index)));
  pattern.contrast = config.contrast_lo + (config.contrast_hi - config.contrast_lo) * uniform01(rng);
  const double jitter_x = config.offset_jitter_px * (2.0 * uniform01(rng) - 1.0);
  const double jitter_y = config.offset_jitter_px * (2.0 * uniform01(rng) - 1.0);

  const Flow flow = motion_flows(config.motions).at(static_cast<std::size_t>(spec.motion_id));
  const double half = config.duration_s * config.start_phase;
  const double start_x =
      (config.width - 1) / 2.0 - (pattern.width - 1) / 2.0 - flow.vx * half + jitter_x;
  const double start_y =
      (config.height - 1) / 2.0 - (pattern.height - 1) / 2.0 - flow.vy * half + jitter_y;

  SimParams params;
  params.epsilon = config.epsilon;
  params.frame_rate = config.frame_rate;
  params.duration = config.duration_s;
  params.noise_rate = config.noise_rate;
  params.seed = seed;
  return generate_events(pattern, Trajectory::constant(start_x, start_y, flow, config.duration_s),
                         params, config.geometry());
}

Manifest generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir) {
  validate(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "samples", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "samples").string() + ": " + ec.message());

  std::vector<int> motion_ids = config.motion_subset;
  if (motion_ids.empty()) {
    for (int m = 0; m < config.motions.count; ++m) motion_ids.push_back(m);
  }
  const auto flows = motion_flows(config.motions);

  Manifest manifest;
  manifest.geometry = config.geometry();
  manifest.classes = config.classes;
  for (int c = 0; c < static_cast<int>(config.classes.size()); ++c) {
    for (int m : motion_ids) {
      for (int s = 0; s < config.samples_per_cell; ++s) {
        ManifestEntry entry;
        const EventStream stream = generate_sample(config, {c, m, s}, &entry.seed);
        entry.path = "samples/c" + std::to_string(c) + "_m" + std::to_string(m) + "_s" +
                     std::to_string(s) + ".evt";
        entry.label = c;
        entry.motion_id = m;
        entry.vx = flows[static_cast<std::size_t>(m)].vx;
        entry.vy = flows[static_cast<std::size_t>(m)].vy;
        write_evt1(out_dir / entry.path, stream);
        manifest.samples.push_back(std::move(entry));
      }
    }
  }
  write_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace tnt
