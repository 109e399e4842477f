#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tnt/event.hpp"
#include "tnt/sim.hpp"

namespace tnt {

struct MotionConfig {
  int count = 30;
  double speed_px_per_s = 40.0;
  // 1 gives count directions at one speed; see motion_set(n, speed, levels).
  int speed_levels = 1;
};

std::vector<Flow> motion_flows(const MotionConfig& motions);

// Synthetic moving-glyph dataset recipe. JSON keys mirror the field names;
// unknown keys are rejected.
struct DatasetConfig {
  int width = 34;
  int height = 34;
  int bins = 9;
  std::vector<int> classes = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  MotionConfig motions;
  int samples_per_cell = 2;
  double duration_s = 0.3;
  double frame_rate = 200.0;
  double epsilon = 0.15;
  double noise_rate = 0.0;
  double contrast_lo = 0.5;
  double contrast_hi = 1.0;
  double offset_jitter_px = 2.0;
  // Fraction of the motion at which the glyph center crosses the canvas
  // center: 0 starts centered, 0.5 is centered half way.
  double start_phase = 0.5;
  std::uint64_t seed = 0;
  // Restricts generation to these motion ids; empty means all.
  std::vector<int> motion_subset;

  SensorGeometry geometry() const { return {width, height}; }
};

void validate(const DatasetConfig& config);
DatasetConfig parse_dataset_config(const std::string& json_text);
DatasetConfig load_dataset_config(const std::filesystem::path& path);
std::string dataset_config_to_json(const DatasetConfig& config);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  int label = 0;     // index into Manifest::classes
  int motion_id = 0;
  double vx = 0.0;
  double vy = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  SensorGeometry geometry;
  std::vector<int> classes;
  std::vector<ManifestEntry> samples;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest parse_manifest(const std::string& json_text);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

// Keeps entries whose motion id is listed; an empty list keeps everything.
Manifest filter_motions(const Manifest& manifest, const std::vector<int>& motion_ids);

struct SampleSpec {
  int class_index = 0;
  int motion_id = 0;
  int sample_index = 0;
};

// Simulates one sample. Randomness (contrast, start jitter, noise) comes
// from a generator seeded by mix_seed(config.seed, class, motion, sample),
// so samples are independent of generation order.
EventStream generate_sample(const DatasetConfig& config, const SampleSpec& spec,
                            std::uint64_t* sample_seed = nullptr);

// Writes samples/<...>.evt files plus manifest.json under out_dir and
// returns the manifest. Output is a pure function of the config.
Manifest generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir);

}  // namespace tnt
