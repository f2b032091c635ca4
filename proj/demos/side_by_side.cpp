// Runs the quantum three-box and its card-game analog side by side and
// prints the joint and conditional laws, exact and sampled.

#include <iostream>

#include "paradox/scenario.hpp"

int main() {
  for (const char* name : {"three-box", "card-game", "card-game-notJ"}) {
    auto scenario = paradox::parse_scenario(std::string("{\"scenario\":\"") + name +
                                            "\",\"mode\":\"both\",\"trials\":20000}");
    const auto report = paradox::run_scenario(scenario);
    std::cout << paradox::render(report, paradox::RenderFormat::Table) << "\n";
  }
  return 0;
}
