#include <doctest.h>

#include <cmath>
#include <set>

#include <json.hpp>

#include "helpers.hpp"
#include "tnt/verify.hpp"

using namespace tnt;
using namespace tnt::verify;

namespace {

// Dense reference for V(x, y, b) straight from the kernel-sum definition.
double volume_cell(const EventStream& s, int x, int y, int b) {
  double acc = 0.0;
  for (const auto& e : s.events) {
    acc += e.p * linear_kernel(x - e.x) * linear_kernel(y - e.y) * linear_kernel(b - e.t);
  }
  return acc;
}

// conv3d over the zero-padded kernel-sum volume, evaluated cell by cell.
double conv_cell(const EventStream& s, const std::vector<double>& k, int x, int y, int b, int bins) {
  double acc = 0.0;
  for (int l = 0; l < 3; ++l)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        const int xx = x + i - 1, yy = y + j - 1, bb = b + l - 1;
        if (xx < 0 || yy < 0 || bb < 0 || xx >= s.geometry.width || yy >= s.geometry.height || bb >= bins) {
          continue;
        }
        acc += k[static_cast<std::size_t>((l * 3 + j) * 3 + i)] * volume_cell(s, xx, yy, bb);
      }
  return acc;
}

double brute_prop1(const std::vector<double>& k, int vx, int vy) {
  const auto base = prop1_witness_stream();
  const auto flowed = apply_flow(base, {double(vx), double(vy)});
  const int bins = 5, w = base.geometry.width, h = base.geometry.height;
  double worst = 0.0;
  for (int b = 0; b < bins; ++b)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double lhs = conv_cell(flowed, k, x, y, b, bins);
        const int sx = x - vx * b, sy = y - vy * b;
        const bool inside = sx >= 0 && sy >= 0 && sx < w && sy < h;
        const double rhs = inside ? conv_cell(base, k, sx, sy, b, bins) : 0.0;
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  return worst;
}

}  // namespace

TEST_CASE("convolution translation check and its controls") {
  const auto random = check_conv_translation(1);
  CHECK(random.passed);
  CHECK(random.measured <= 1e-12);
  const auto identity = check_conv_translation(1, 50, ConvCheckMode::identity_kernel);
  CHECK(identity.passed);
  CHECK(identity.measured == 0.0);
  const auto broken = check_conv_translation(1, 50, ConvCheckMode::broken_shift);
  CHECK(!broken.passed);
  CHECK(broken.measured > 0.1);
}

TEST_CASE("conv3d and shear match their definitions") {
  std::mt19937_64 rng(41);
  EventVolume v({6, 5}, 4);
  for (auto& x : v.data()) x = uniform01(rng);
  std::vector<double> k(27);
  for (auto& t : k) t = uniform01(rng);
  const auto c = conv3d_same(v, k);
  for (int b = 0; b < 4; ++b)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 6; ++x) {
        double acc = 0.0;
        for (int l = -1; l <= 1; ++l)
          for (int j = -1; j <= 1; ++j)
            for (int i = -1; i <= 1; ++i) {
              if (x + i < 0 || x + i >= 6 || y + j < 0 || y + j >= 5 || b + l < 0 || b + l >= 4) continue;
              acc += k[static_cast<std::size_t>(((l + 1) * 3 + j + 1) * 3 + i + 1)] * v.at(x + i, y + j, b + l);
            }
        CHECK(c.at(x, y, b) == doctest::Approx(acc).epsilon(1e-14));
      }
  const auto s = shear(v, 1, -1);
  CHECK(s.at(3, 2, 2) == v.at(1, 4, 2));
  CHECK(s.at(0, 2, 1) == 0.0);
  CHECK(shear(v, 0, 0) == v);
}

TEST_CASE("Prop. 1 witness agrees with a brute-force evaluation") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto k = prop1_kernel(seed);
    const double fast = prop1_discrepancy(seed, 1, 0);
    CHECK(fast == doctest::Approx(brute_prop1(k, 1, 0)).epsilon(1e-12));
    CHECK(fast >= 0.05);
    CHECK(prop1_discrepancy(seed, 0, 0) <= 1e-12);
  }
  CHECK(check_prop1_witness(7).measured == check_prop1_witness(7).measured);
  CHECK(check_prop1_witness(7).passed);
  CHECK(check_prop1_zero_flow(7).passed);
}

TEST_CASE("Prop. 2 and Prop. 3 checks") {
  CHECK(check_prop2_coordinate(3, 10, 200).passed);
  CHECK(check_prop2_volume(3, 5).passed);
  CHECK(check_prop3_coordinate(3, 10).passed);
  CHECK(check_prop3_volume(3, 10).passed);
  const auto control = check_prop3_canvas_control(3);
  CHECK(control.passed);
  CHECK(control.comparison == Comparison::at_least);
}

TEST_CASE("suite report: every check once, all passing, reproducible") {
  const auto report = run_suite(1);
  CHECK(report.all_passed());
  const auto text = report_to_json(report);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("version") == 1);
  std::set<std::string> names;
  for (const auto& c : j.at("checks")) {
    CHECK(c.at("status") == "pass");
    CHECK(c.contains("measured"));
    CHECK(c.contains("threshold"));
    CHECK(c.contains("seed"));
    CHECK(names.insert(c.at("name").get<std::string>()).second);
  }
  CHECK(names.size() == report.checks.size());
  CHECK(names.count("prop1_witness") == 1);
  CHECK(names.count("prop3_canvas_control") == 1);
  CHECK(report_to_json(run_suite(1)) == text);
}
