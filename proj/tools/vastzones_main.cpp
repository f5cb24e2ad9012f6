#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vastzones/config.hpp"
#include "vastzones/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vastzones: sound zone control experiment runner"};
  app.require_subcommand(1);

  std::vector<std::string> overrides;
  std::string out_dir;
  std::size_t jobs = 1;

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config");
  run->add_option("config", run_config, "Config file")->required();
  run->add_option("--override", overrides, "section.key=value, repeatable");
  run->add_option("--jobs", jobs, "Worker threads for sweep cells");
  run->add_option("--out", out_dir, "Output directory (overrides [output] dir)");

  std::string val_config;
  CLI::App* val = app.add_subcommand("validate", "Validate a config and report findings");
  val->add_option("config", val_config, "Config file")->required();
  val->add_option("--override", overrides, "section.key=value, repeatable");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      vz::ExperimentConfig cfg = vz::parse_config_file(run_config, overrides);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      vz::RunResult res = vz::run_experiment(cfg, jobs == 0 ? 1 : jobs);
      for (const std::string& err : res.errors)
        std::fprintf(stderr, "error: %s\n", err.c_str());
      for (const std::string& f : res.emitted)
        std::printf("wrote %s/%s\n", cfg.out_dir.c_str(), f.c_str());
      return res.exit_code;
    }
    vz::ExperimentConfig cfg = vz::parse_config_file(val_config, overrides);
    const std::vector<vz::Finding> findings = vz::validate_config(cfg);
    bool bad = false;
    for (const vz::Finding& f : findings) {
      std::printf("%s: %s\n", f.error ? "error" : "warning", f.message.c_str());
      bad = bad || f.error;
    }
    if (findings.empty()) std::printf("ok\n");
    return bad ? 2 : 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
