// Writes a simulated capture-history file for the time-dependent CJS model.
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "cpppkit/io.hpp"
#include "cpppkit/models/cjs.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate CJS capture histories"};
  std::vector<double> phi{0.72, 0.45, 0.48, 0.63, 0.60, 0.58};
  std::vector<double> p{0.67, 0.87, 0.88, 0.88, 0.91, 0.90};
  std::vector<std::int64_t> schedule{22, 39, 42, 45, 50, 52, 44};
  std::uint64_t seed = 1;
  app.add_option("--phi", phi, "survival probabilities, k-1 values or one");
  app.add_option("--p", p, "capture probabilities, k-1 values or one");
  app.add_option("--schedule", schedule, "new releases per occasion, k values");
  app.add_option("--seed", seed, "simulation seed");
  CLI11_PARSE(app, argc, argv);

  try {
    cpppkit::RandomStream rng(seed, cpppkit::stream_id(cpppkit::StreamPurpose::simulation, 0));
    const auto data = cpppkit::cjs_simulate({phi, p}, schedule, schedule.size(), rng);
    std::cout << "# simulated CJS T/T histories, seed " << seed << '\n';
    cpppkit::write_capture_histories(std::cout, data);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
