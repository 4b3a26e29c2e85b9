// longjump-lab <experiment> --config <path> [--seed S] [--out DIR] [--replicas R]
// exit codes: 0 acceptance predicate holds, 1 predicate fails (or runtime
// failure during the run), 2 usage / config error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <longjump/experiments.hpp>

int main(int argc, char** argv) {
  CLI::App app{"simulator-solver laboratory for long-jump lattice gases"};
  std::string experiment, config_path, out_dir;
  std::uint64_t seed = 0;
  int replicas = 0;
  bool have_seed = false, have_out = false, have_replicas = false;

  app.add_option("experiment", experiment, "experiment name")->required();
  app.add_option("--config", config_path, "path to the .ini config")->required();
  auto* so = app.add_option("--seed", seed, "override the master seed");
  auto* oo = app.add_option("--out", out_dir, "override the output directory");
  auto* ro = app.add_option("--replicas", replicas, "override the replica count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  have_seed = so->count() > 0;
  have_out = oo->count() > 0;
  have_replicas = ro->count() > 0;

  try {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return 2;
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    longjump::ExperimentConfig cfg = longjump::parse_config(buf.str());
    if (cfg.name != experiment) {
      std::cerr << "error: config declares experiment '" << cfg.name
                << "' but '" << experiment << "' was requested\n";
      return 2;
    }
    if (have_seed) cfg.seed = seed;
    if (have_replicas) {
      if (replicas < 1) {
        std::cerr << "error: --replicas must be >= 1\n";
        return 2;
      }
      cfg.replicas = replicas;
    }
    // the environment may override the output directory only
    if (const char* env = std::getenv("LONGJUMP_OUT")) cfg.out = env;
    if (have_out) cfg.out = out_dir;

    longjump::ExperimentReport rep = longjump::run_experiment(cfg);
    for (const auto& line : rep.lines) std::cout << line << "\n";
    std::cout << (rep.pass ? "PASS" : "FAIL") << " " << cfg.name << "\n";
    return rep.pass ? 0 : 1;
  } catch (const longjump::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 1;
  }
}
