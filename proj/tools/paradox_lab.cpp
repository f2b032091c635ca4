// paradox-lab: runs pre/post-selection toy experiments (quantum three-box,
// card game, ad hoc box, Leifer-Spekkens box, three-slit) from JSON scenario
// files or built-in presets, in exact and Monte Carlo modes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "paradox/scenario.hpp"

namespace {

// 0 ok, 2 validation, 3 engine error, 4 Monte Carlo vs exact hard failure.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitEngine = 3;
constexpr int kExitMcMismatch = 4;

std::string load_scenario_text(const std::string& spec) {
  const auto& names = paradox::preset_names();
  if (std::find(names.begin(), names.end(), spec) != names.end())
    return std::string("{\"scenario\":\"") + spec + "\"}";
  std::ifstream in(spec);
  if (!in) throw paradox::ParseError("cannot open scenario file '" + spec + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paradox-lab: exact and sampled pre/post-selection experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one scenario (JSON file or preset name)");
  std::string scenario_spec;
  std::string mode;
  std::string format = "table";
  std::string out_path;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  run->add_option("scenario", scenario_spec,
                  "scenario JSON file, or one of: three-box, card-game, card-game-notJ, "
                  "adhoc, ls-box, three-slit")
      ->required();
  run->add_option("--mode", mode, "exact, mc or both (default: scenario's, else exact)")
      ->check(CLI::IsMember({"exact", "mc", "montecarlo", "both"}));
  run->add_option("--trials", trials, "Monte Carlo trials (default 100000)");
  run->add_option("--seed", seed, "random seed (default PARADOX_LAB_SEED, else 0)");
  run->add_option("--format", format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
  run->add_option("--out", out_path, "write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string text = load_scenario_text(scenario_spec);
    paradox::Scenario scenario = paradox::parse_scenario(text);

    // Flag > scenario document > environment > 0.
    if (seed) {
      scenario.seed = *seed;
    } else if (!paradox::Json::parse(text).contains("seed")) {
      scenario.seed = paradox::default_seed_from_env();
    }
    if (trials) {
      if (*trials == 0) throw paradox::ValidationError("trials must be positive");
      scenario.trials = *trials;
    }
    if (mode == "exact") {
      scenario.mode = paradox::Mode::Exact;
    } else if (mode == "mc" || mode == "montecarlo") {
      scenario.mode = paradox::Mode::MonteCarlo;
    } else if (mode == "both") {
      scenario.mode = paradox::Mode::Both;
    }

    paradox::ScenarioReport report;
    try {
      report = paradox::run_scenario(scenario);
    } catch (const paradox::Error& e) {
      std::cerr << "engine error in scenario '" << scenario.name << "': " << e.what() << "\n";
      return kExitEngine;
    }

    const auto rendered = paradox::render(report, format == "json"
                                                      ? paradox::RenderFormat::Json
                                                      : paradox::RenderFormat::Table);
    if (out_path.empty()) {
      std::cout << rendered;
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "cannot write '" << out_path << "'\n";
        return kExitEngine;
      }
      out << rendered;
    }

    if (report.comparison && report.comparison->hard_failure) {
      std::cerr << "Monte Carlo tally contradicts the exact law (impossible or sure event "
                   "missed)\n";
      return kExitMcMismatch;
    }
    return kExitOk;
  } catch (const paradox::ParseError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const paradox::ValidationError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const paradox::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEngine;
  }
}
