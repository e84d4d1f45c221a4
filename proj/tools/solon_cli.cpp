// Experiment runner: `run` executes a simulation from a JSON config and
// writes metrics.csv + summary.json; `check` validates a mechanism tuple.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "solon/solon.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SOLON coded gradient aggregation simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a simulation from a config file");
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string timing = "off";
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override task.seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--threads", threads, "worker threads (1 reproduces N>1 bit-for-bit)")
      ->check(CLI::PositiveNumber);
  run->add_option("--timing", timing,
                  "metrics.csv time columns: off (0, byte-reproducible) or wall")
      ->check(CLI::IsMember({"off", "wall"}));

  auto* check = app.add_subcommand("check", "validate a (P, s, r_c) tuple");
  int workers = 0, byzantine = 0, compression = 0;
  int dim = -1;
  check->add_option("P", workers, "worker count")->required();
  check->add_option("s", byzantine, "adversary bound")->required();
  check->add_option("r_c", compression, "compression ratio")->required();
  check->add_option("--d", dim, "model dimension (reports d_c when given)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const solon::ExperimentConfig cfg = solon::parse_config(config_path);
      if (cfg.mechanism.numerically_risky)
        std::cerr << "warning: r_c = " << cfg.mechanism.compression
                  << " exceeds 14; decoding may lose precision\n";
      return solon::cmd_run(cfg, out_dir,
                            seed_set ? std::optional<std::uint64_t>(seed)
                                     : std::nullopt,
                            threads, timing == "wall", std::cerr);
    }
    const std::string report = solon::check_report(
        workers, byzantine, compression,
        dim >= 0 ? std::optional<int>(dim) : std::nullopt);
    std::cout << report << '\n';
    return report.rfind("feasible", 0) == 0 ? 0 : 2;
  } catch (const solon::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
