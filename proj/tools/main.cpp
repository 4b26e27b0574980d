#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

// Exit codes: 0 all checks pass, 1 check failures, 2 validation errors,
// 3 numerical errors.
int main(int argc, char** argv) {
  CLI::App app{"blochdeck: Bloch decompositions and image-sum kernels on "
               "discrete covering spaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  double tolerance_scale = 0;  // 0: keep the config value
  int threads = 0;             // 0: keep the config value

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (JSON)")
        ->required();
    sub->add_option("--out", out_override, "output directory (overrides config)");
    sub->add_option("--tolerance-scale", tolerance_scale,
                    "multiply all check tolerances");
    sub->add_option("--threads", threads, "worker threads for per-node maps");
  };

  CLI::App* harmonic = app.add_subcommand(
      "check-harmonic", "irrep audits, Parseval and Plancherel-mass checks");
  CLI::App* bloch = app.add_subcommand(
      "bloch", "transform unitarity, inversion and decomposition checks");
  CLI::App* schulman = app.add_subcommand(
      "schulman", "image sums, kernel reconstruction and F/G round trips");
  CLI::App* run = app.add_subcommand("run", "run the command named in the config");
  for (CLI::App* sub : {harmonic, bloch, schulman, run}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = blochdeck::cli::RunConfig::parse_file(config_path);
    if (harmonic->parsed()) cfg.task().command = "check-harmonic";
    if (bloch->parsed()) cfg.task().command = "bloch";
    if (schulman->parsed()) cfg.task().command = "schulman";
    if (tolerance_scale > 0) cfg.task().tolerance_scale = tolerance_scale;
    if (threads > 0) cfg.task().threads = threads;
    std::string outdir =
        out_override.empty() ? cfg.output().directory : out_override;

    auto start = std::chrono::steady_clock::now();
    blochdeck::cli::Report report = blochdeck::cli::run_command(cfg, outdir);
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    report.write(std::cout);
    std::printf("elapsed %.3f s, report written to %s/report.txt\n",
                report.elapsed_seconds, outdir.c_str());
    return report.exit_code();
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}
