#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "helpers.hpp"
#include "tnt/event_io.hpp"
#include "tnt/pipeline.hpp"
#include "tnt/volume.hpp"

using namespace tnt;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tnt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

EventStream three_events() {
  EventStream s;
  s.geometry = {34, 34};
  s.events = {{0, 3, 4, 1}, {150, 10, 2, -1}, {400, 20, 20, 1}};
  return s;
}

// Two classes, two motions, three samples each: small enough to train in
// well under a second.
std::string tiny_dataset(const test::TempDir& dir) {
  test::spit(dir / "sim.json",
             R"({"classes": [0, 1], "motions": {"count": 2, "speed_px_per_s": 40},
                 "samples_per_cell": 3, "seed": 3})");
  const auto r = run_cli({"simulate", "--config", (dir / "sim.json").string(), "--out", (dir / "data").string()});
  REQUIRE(r.code == 0);
  return (dir / "data" / "manifest.json").string();
}

}  // namespace

TEST_CASE("info reports count, span, geometry and polarities") {
  test::TempDir dir("cli_info");
  write_evt1(dir / "three.evt", three_events());
  const auto r = run_cli({"info", "--input", (dir / "three.evt").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("events: 3") != std::string::npos);
  CHECK(r.out.find("geometry: 34x34") != std::string::npos);
  CHECK(r.out.find("0 .. 400") != std::string::npos);
  CHECK(r.out.find("positive: 2") != std::string::npos);
  CHECK(r.out.find("negative: 1") != std::string::npos);
}

TEST_CASE("voxelize writes the in-process volume bit-exactly") {
  test::TempDir dir("cli_vox");
  write_evt1(dir / "three.evt", three_events());
  const auto vol = (dir / "v.vol").string();
  const auto r = run_cli({"voxelize", "--input", (dir / "three.evt").string(), "--variant", "tnt", "--center",
                          "canvas", "--bins", "5", "--out", vol});
  REQUIRE(r.code == 0);
  const auto back = read_vol1(std::filesystem::path(vol));
  TntOptions o;
  o.bins = 5;
  o.center_mode = CenterMode::canvas;
  CHECK(back == event_volume(three_events(), o, Variant::tnt));
  std::ostringstream again;
  write_vol1(again, back);
  CHECK(again.str() == test::slurp(vol));
}

TEST_CASE("config file values apply unless a flag overrides them") {
  test::TempDir dir("cli_cfg");
  write_evt1(dir / "three.evt", three_events());
  test::spit(dir / "run.json", R"({"bins": 4, "variant": "baseline"})");
  const auto vol = (dir / "v.vol").string();
  REQUIRE(run_cli({"voxelize", "--input", (dir / "three.evt").string(), "--config", (dir / "run.json").string(),
                   "--out", vol})
              .code == 0);
  CHECK(read_vol1(std::filesystem::path(vol)).bins() == 4);
  REQUIRE(run_cli({"voxelize", "--input", (dir / "three.evt").string(), "--config", (dir / "run.json").string(),
                   "--bins", "6", "--out", vol})
              .code == 0);
  CHECK(read_vol1(std::filesystem::path(vol)).bins() == 6);

  test::spit(dir / "bad.json", R"({"bins": 4, "colour": "red"})");
  CHECK(run_cli({"voxelize", "--input", (dir / "three.evt").string(), "--config", (dir / "bad.json").string(),
                 "--out", vol})
            .code == cli::kExitValidation);
}

TEST_CASE("training twice with one seed gives identical bytes; eval reports per motion") {
  test::TempDir dir("cli_train");
  const auto manifest = tiny_dataset(dir);
  auto train = [&](const std::string& tag) {
    return run_cli({"train", "--manifest", manifest, "--variant", "tnt", "--epochs", "3", "--batch-size", "4",
                    "--seed", "9", "--out", (dir / (tag + ".mdl")).string(), "--metrics",
                    (dir / (tag + ".csv")).string()});
  };
  REQUIRE(train("a").code == 0);
  REQUIRE(train("b").code == 0);
  CHECK(test::slurp(dir / "a.mdl") == test::slurp(dir / "b.mdl"));
  CHECK(test::slurp(dir / "a.csv") == test::slurp(dir / "b.csv"));
  CHECK(test::slurp(dir / "a.csv").rfind("epoch,split,loss,accuracy\n0,train,", 0) == 0);

  const auto rep = (dir / "rep.csv").string();
  const auto r = run_cli({"eval", "--model", (dir / "a.mdl").string(), "--manifest", manifest, "--variant", "tnt",
                          "--report", rep});
  REQUIRE(r.code == 0);
  const auto text = test::slurp(rep);
  CHECK(text.rfind("motion_id,count,correct,accuracy\n0,6,", 0) == 0);
  CHECK(text.find("\n1,6,") != std::string::npos);
  CHECK(text.find("\nall,12,") != std::string::npos);

  const auto only0 = run_cli({"eval", "--model", (dir / "a.mdl").string(), "--manifest", manifest, "--variant",
                              "tnt", "--test-motions", "0"});
  CHECK(only0.out.find("on 6 samples") != std::string::npos);

  // A model trained for 9 bins cannot read 5-bin inputs.
  CHECK(run_cli({"eval", "--model", (dir / "a.mdl").string(), "--manifest", manifest, "--bins", "5"}).code ==
        cli::kExitValidation);
}

TEST_CASE("verify writes a passing report") {
  test::TempDir dir("cli_verify");
  const auto path = (dir / "report.json").string();
  const auto r = run_cli({"verify", "--out", path, "--seed", "2"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(test::slurp(path));
  CHECK(j.at("checks").size() == 9);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("exit codes distinguish I/O, parse and validation failures") {
  test::TempDir dir("cli_codes");
  CHECK(run_cli({"info", "--input", (dir / "missing.evt").string()}).code == cli::kExitIo);

  test::spit(dir / "junk.evt", "not an event file at all");
  const auto parse = run_cli({"info", "--input", (dir / "junk.evt").string()});
  CHECK(parse.code == cli::kExitParse);
  CHECK(parse.err.find("magic") != std::string::npos);

  write_evt1(dir / "three.evt", three_events());
  CHECK(run_cli({"voxelize", "--input", (dir / "three.evt").string(), "--bins", "1", "--out",
                 (dir / "v.vol").string()})
            .code == cli::kExitValidation);
  CHECK(run_cli({"voxelize", "--input", (dir / "three.evt").string(), "--variant", "fancy", "--out",
                 (dir / "v.vol").string()})
            .code == cli::kExitValidation);
  CHECK(run_cli({"voxelize", "--input", (dir / "three.evt").string(), "--out",
                 (dir / "no" / "such" / "dir" / "v.vol").string()})
            .code == cli::kExitIo);
  CHECK(run_cli({"nonsense"}).code == cli::kExitValidation);
  CHECK(run_cli({}).code == cli::kExitValidation);

  test::spit(dir / "bad_sim.json", R"({"motions": {"count": -3}})");
  CHECK(run_cli({"simulate", "--config", (dir / "bad_sim.json").string(), "--out", (dir / "d").string()}).code ==
        cli::kExitValidation);
  test::spit(dir / "broken.json", "{\"seed\": ");
  CHECK(run_cli({"simulate", "--config", (dir / "broken.json").string(), "--out", (dir / "d").string()}).code ==
        cli::kExitParse);
}
