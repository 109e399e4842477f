#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tnt/event.hpp"
#include "tnt/volume.hpp"

namespace tnt::verify {

enum class Comparison {
  at_most,   // pass iff measured <= threshold
  at_least,  // pass iff measured >= threshold
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  Comparison comparison = Comparison::at_most;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;
};

CheckResult make_result(std::string name, double measured, double threshold, Comparison cmp,
                        std::uint64_t seed);

// Circular 2-D correlation commutes with circular shifts. Mode `broken_shift`
// shifts the output by one extra column and must fail; `identity_kernel`
// uses a 1x1 unit kernel.
enum class ConvCheckMode { random_kernel, identity_kernel, broken_shift };
CheckResult check_conv_translation(std::uint64_t seed, int trials = 50,
                                   ConvCheckMode mode = ConvCheckMode::random_kernel);

// Zero-padded 3x3x3 correlation over (x, y, bin).
EventVolume conv3d_same(const EventVolume& volume, const std::vector<double>& kernel27);

// Bin-dependent integer shear: out(x, y, b) = in(x - vx*b, y - vy*b, b).
EventVolume shear(const EventVolume& volume, int vx, int vy);

// The fixed five-event stream (scaled time, 16x16 grid, 5 bins) used as the
// non-equivariance witness. All timestamps are whole bins.
EventStream prop1_witness_stream();

// Largest gap between conv3d(build(apply_flow(E, v))) and
// shear(conv3d(build(E)), v) for the witness stream and a seeded kernel with
// entries in [0.1, 1].
double prop1_discrepancy(std::uint64_t seed, int vx, int vy);
double prop1_discrepancy(const std::vector<double>& kernel27, int vx, int vy);
// The seeded 3x3x3 kernel, taps indexed (bin * 3 + row) * 3 + column.
std::vector<double> prop1_kernel(std::uint64_t seed);

// Flow v = (1, 0) must give a discrepancy >= 0.05.
CheckResult check_prop1_witness(std::uint64_t seed);
// Zero flow control: discrepancy <= 1e-12.
CheckResult check_prop1_zero_flow(std::uint64_t seed);

// Per-event flow-to-translation identity after temporal normalization.
CheckResult check_prop2_coordinate(std::uint64_t seed, int trials = 100, int events = 1000);
// The same identity on voxelized volumes with integer flow deltas, compared
// away from the border (margin 2).
CheckResult check_prop2_volume(std::uint64_t seed, int trials = 20);

// Centroid-centred temporal normalization is invariant to global translation:
// per-event coordinates and volumes.
CheckResult check_prop3_coordinate(std::uint64_t seed, int trials = 100);
CheckResult check_prop3_volume(std::uint64_t seed, int trials = 100);
// Canvas centring under a nonzero translation must NOT be invariant.
CheckResult check_prop3_canvas_control(std::uint64_t seed);

struct Report {
  std::vector<CheckResult> checks;  // sorted by name
  bool all_passed() const;
};

Report run_suite(std::uint64_t seed);
std::string report_to_json(const Report& report);
void write_report(const std::filesystem::path& path, const Report& report);

}  // namespace tnt::verify
