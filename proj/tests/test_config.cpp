#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <longjump/config.hpp>
#include <longjump/io.hpp>

using namespace longjump;

namespace {
std::string minimal = R"(
[experiment]
name = demo
model = zero_range
scales = 32,64
T = 0.1
replicas = 3
seed = 99

[kernel]
alpha = 1.5

[rate]
kind = indicator

[profile]
kind = step
a = 0.5
b = 1.0
x0 = 0.25
x1 = 0.5
)";
}  // namespace

TEST_CASE("minimal config round-trips through serialize/parse") {
  auto cfg = parse_config(minimal);
  CHECK(cfg.name == "demo");
  CHECK(cfg.scales == std::vector<int>{32, 64});
  CHECK(cfg.replicas == 3);
  CHECK(cfg.seed == 99);
  CHECK(cfg.alpha == 1.5);
  CHECK(cfg.rate_kind == "indicator");
  auto cfg2 = parse_config(cfg.serialize());
  CHECK(cfg2.serialize() == cfg.serialize());
  CHECK(cfg2.hash() == cfg.hash());
}

TEST_CASE("unknown keys are rejected with their line number") {
  std::string bad = "[experiment]\nname = x\n[kernel]\nalpha_ = 1.5\n";
  try {
    parse_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("alpha_") != std::string::npos);
  }
}

TEST_CASE("structural errors carry locations") {
  CHECK_THROWS_AS(parse_config("name = x\n"), ConfigError);  // key outside section
  CHECK_THROWS_AS(parse_config("[experiment]\nname = x\nname = y\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nname = x\nT = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[bogus]\nk = v\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nscales = 64,32\nname = x\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nmodel = zr\nname = x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nT = 1\n"), ConfigError);  // no name
}

TEST_CASE("alpha = 2 pairs with the log-corrected time scale") {
  std::string base = "[experiment]\nname = x\n";
  CHECK_THROWS_AS(parse_config(base + "[kernel]\nalpha = 2.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "time_scale = log_corrected\n[kernel]\nalpha = 1.5\n"),
                  ConfigError);
  auto ok = parse_config(base + "time_scale = log_corrected\n[kernel]\nalpha = 2.0\n");
  CHECK(ok.time_scale == TimeScale::log_corrected);
  // theta(n) = n^2 / log n
  CHECK(ok.theta_for(128) == Catch::Approx(128.0 * 128.0 / std::log(128.0)));
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  std::string text =
      "# leading comment\n; alt comment\n\n[experiment]\n  name   =   spaced  \n";
  auto cfg = parse_config(text);
  CHECK(cfg.name == "spaced");
}

TEST_CASE("hash is sensitive to every field") {
  auto a = parse_config(minimal);
  auto b = a;
  b.seed = 100;
  CHECK(a.hash() != b.hash());
  auto c = a;
  c.T = 0.2;
  CHECK(a.hash() != c.hash());
}

TEST_CASE("CSV artifacts are byte-identical for identical config and seed") {
  auto cfg = parse_config(minimal);
  auto dir = std::filesystem::temp_directory_path() / "longjump_test_csv";
  std::filesystem::remove_all(dir);
  auto write_once = [&](const std::string& name) {
    CsvFile f(dir.string(), name, cfg, "a,b");
    f.row(1, 2.5);
    f.row(3, 4.5);
    return f.path();
  };
  auto p1 = write_once("one.csv");
  auto p2 = write_once("two.csv");
  std::ifstream f1(p1), f2(p2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  // header line carries hash, seed, version
  std::string head = s1.str().substr(0, s1.str().find('\n'));
  CHECK(head.find("config_hash=") != std::string::npos);
  CHECK(head.find("seed=99") != std::string::npos);
  CHECK(head.find("version=") != std::string::npos);
  std::filesystem::remove_all(dir);
}
