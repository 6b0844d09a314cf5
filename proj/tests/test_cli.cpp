#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "spx/pgm.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SPX_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("spx_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

bool same_tree(const fs::path& a, const fs::path& b) {
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    // run_config.txt records the output path itself.
    if (!e.is_regular_file() || e.path().filename() == "run_config.txt") continue;
    const auto rel = fs::relative(e.path(), a);
    if (!fs::exists(b / rel)) return false;
    if (spx::io::read_bytes(e.path()) != spx::io::read_bytes(b / rel)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("gen-data writes a manifest with the rate mix") {
  const auto dir = scratch("gen");
  const auto r = run("gen-data --count 12 --seed 4 --size 32 --out " + dir.string());
  INFO(r.output);
  REQUIRE(r.code == 0);
  CHECK(r.output.find("50% 3, 25% 3, 6.25% 6") != std::string::npos);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "run_config.txt"));
  const auto j = nlohmann::json::parse(spx::io::read_text(dir / "manifest.json"));
  CHECK(j["entries"].size() == 12);
  for (const auto& e : j["entries"]) {
    CHECK(fs::exists(dir / e["depth_path"].get<std::string>()));
    CHECK(fs::exists(dir / e["fringe_lo_path"].get<std::string>()));
  }

  const auto again = scratch("gen_again");
  REQUIRE(run("gen-data --count 12 --seed 4 --size 32 --out " + again.string()).code == 0);
  CHECK(same_tree(dir, again));
  fs::remove_all(again);
  fs::remove_all(dir);
}

TEST_CASE("gen-data rejects a zero count and writes nothing") {
  const auto dir = scratch("gen_zero");
  const auto r = run("gen-data --count 0 --out " + dir.string());
  CHECK(r.code != 0);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(!fs::exists(dir));
}

TEST_CASE("sample with N = 1 round-trips the scene") {
  const auto dir = scratch("sample");
  fs::create_directories(dir);
  spx::Image img(8, 8);
  for (std::size_t i = 0; i < img.size(); ++i) img.values()[i] = static_cast<double>(i % 5) / 4.0;
  spx::io::write_pgm(dir / "scene.pgm", img, spx::io::PgmDepth::Bits16);
  const auto r = run("sample --scene " + (dir / "scene.pgm").string() + " --window 1 --mode raw --out " + (dir / "o").string());
  INFO(r.output);
  REQUIRE(r.code == 0);
  CHECK(spx::io::read_pgm(dir / "o" / "lowres.pgm") == spx::io::read_pgm(dir / "scene.pgm"));
  CHECK(spx::io::read_text(dir / "o" / "trace.csv").rfind("index,value\n", 0) == 0);
  const auto seq = nlohmann::json::parse(spx::io::read_text(dir / "o" / "sequence.json"));
  CHECK(seq["placements"].size() == 64);

  const auto bad = run("sample --scene " + (dir / "scene.pgm").string() + " --window 3 --out " + (dir / "bad").string());
  CHECK(bad.code != 0);
  CHECK(bad.output.find("tiling") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("train, eval and infer on a tiny dataset") {
  const auto dir = scratch("train");
  REQUIRE(run("gen-data --count 8 --seed 1 --size 16 --split-ratio 0.75 --out " + (dir / "data").string()).code == 0);
  const auto manifest = (dir / "data" / "manifest.json").string();
  const auto t = run("train --manifest " + manifest + " --levels 2 --base-channels 2 --batch-size 2 --max-steps 2 --out " +
                     (dir / "model").string());
  INFO(t.output);
  REQUIRE(t.code == 0);
  CHECK(fs::exists(dir / "model" / "model.ckpt"));
  CHECK(fs::exists(dir / "model" / "model.cfg"));
  CHECK(spx::io::read_text(dir / "model" / "loss.csv").rfind("step,epoch,loss\n", 0) == 0);

  const auto e = run("eval --manifest " + manifest + " --model " + (dir / "model").string() + " --out " + (dir / "eval").string());
  INFO(e.output);
  REQUIRE(e.code == 0);
  const auto rep = nlohmann::json::parse(spx::io::read_text(dir / "eval" / "report.json"));
  CHECK(rep["count"] == 2);

  const auto id = run("eval --manifest " + manifest + " --approach identity --split all --out " + (dir / "ident").string());
  REQUIRE(id.code == 0);
  const auto ident = nlohmann::json::parse(spx::io::read_text(dir / "ident" / "report.json"));
  CHECK(ident["count"] == 8);
  CHECK(ident["alpha"] == 0.0);
  CHECK(ident["gamma"] == 0.0);

  const auto lo = nlohmann::json::parse(spx::io::read_text(manifest))["entries"][0]["fringe_lo_path"].get<std::string>();
  const auto inf = run("infer --model " + (dir / "model").string() + " --input " + (dir / "data" / lo).string() +
                       " --out " + (dir / "inf").string());
  INFO(inf.output);
  REQUIRE(inf.code == 0);
  CHECK(spx::io::read_pgm(dir / "inf" / "depth.pgm").height() == 16);

  const auto two = run("train --manifest " + manifest + " --approach two-stage --levels 2 --base-channels 2 --disc-layers 2 "
                       "--batch-size 2 --max-steps 1 --out " + (dir / "two").string());
  INFO(two.output);
  REQUIRE(two.code == 0);
  CHECK(spx::io::read_text(dir / "two" / "loss.csv").rfind("step,epoch,loss,loss_d,loss_g\n", 0) == 0);
  CHECK(fs::exists(dir / "two" / "generator.ckpt"));
  CHECK(fs::exists(dir / "two" / "depth.ckpt"));
  fs::remove_all(dir);
}

TEST_CASE("train reads a key-value config and explicit flags win") {
  const auto dir = scratch("cfg");
  REQUIRE(run("gen-data --count 4 --seed 2 --size 16 --split-ratio 0.5 --out " + (dir / "data").string()).code == 0);
  fs::create_directories(dir);
  spx::io::write_text(dir / "train.cfg", "max_steps = 1\nbatch_size = 2\nlearning_rate = 0.002\n");
  const auto r = run("train --config " + (dir / "train.cfg").string() + " --learning-rate 0.003 --manifest " +
                     (dir / "data" / "manifest.json").string() + " --levels 2 --base-channels 2 --out " + (dir / "m").string());
  INFO(r.output);
  REQUIRE(r.code == 0);
  const auto rc = spx::io::read_text(dir / "m" / "run_config.txt");
  CHECK(rc.find("learning_rate = 0.003") != std::string::npos);
  CHECK(rc.find("max_steps = 1") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("missing inputs fail cleanly") {
  const auto r = run("train --manifest /nonexistent/manifest.json --out /tmp/spx_never");
  CHECK(r.code != 0);
  CHECK(r.output.rfind("error:", 0) == 0);
  CHECK(!fs::exists("/tmp/spx_never"));
  const auto u = run("gen-data --bogus 1");
  CHECK(u.code == 2);
  CHECK(run("").code != 0);
}

TEST_CASE("help lists subcommands and flags") {
  const auto h = run("--help");
  CHECK(h.code == 0);
  for (const char* s : {"gen-data", "sample", "train", "eval", "infer", "nyquist-demo", "compare-patterns"})
    CHECK(h.output.find(s) != std::string::npos);
  const auto t = run("train --help");
  CHECK(t.code == 0);
  for (const char* f : {"--learning-rate", "--batch-size", "--epochs", "--dropout", "--leaky-slope", "--rate-mix",
                        "--seed", "--max-steps", "--approach", "--config"})
    CHECK(t.output.find(f) != std::string::npos);
}

TEST_CASE("nyquist-demo reports the aliasing table") {
  const auto dir = scratch("nyq");
  const auto r = run("nyquist-demo --out " + dir.string());
  INFO(r.output);
  REQUIRE(r.code == 0);
  CHECK(r.output.find("aliased") != std::string::npos);
  const auto j = nlohmann::json::parse(spx::io::read_text(dir / "nyquist.json"));
  CHECK(j["width"] == 210);
  CHECK(j["cases"].size() == 3);
  CHECK(j["cases"][0]["shift"] == 0);
  CHECK(fs::exists(dir / "lowres_M7.pgm"));
  fs::remove_all(dir);
}

TEST_CASE("compare-patterns writes both scores") {
  const auto dir = scratch("cmp");
  const auto r = run("compare-patterns --count 2 --size 16 --out " + dir.string());
  INFO(r.output);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(spx::io::read_text(dir / "comparison.json"));
  CHECK(j["measurements"] == 64);
  CHECK(j["active_per_scene"].size() == 2);
  fs::remove_all(dir);
}
