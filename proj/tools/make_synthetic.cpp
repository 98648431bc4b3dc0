// Writes the synthetic datasets used in the examples and tests as CSV.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "renyi_fs/error.hpp"
#include "renyi_fs/synthetic.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Generate synthetic feature-selection datasets"};
  std::string kind = "waveform";
  long long n = 1000;
  int informative = 5;
  int noise = 15;
  std::uint64_t seed = 0;
  std::string output;
  app.add_option("--kind", kind, "waveform | linear")->capture_default_str();
  app.add_option("-n,--samples", n, "Number of rows")->capture_default_str();
  app.add_option("--informative", informative, "Informative columns (linear)")->capture_default_str();
  app.add_option("--noise", noise, "Noise columns (linear)")->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--output", output, "CSV path")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    if (kind == "waveform") {
      renyi_fs::save_csv(renyi_fs::make_waveform(n, seed), output);
    } else if (kind == "linear") {
      renyi_fs::save_csv(renyi_fs::make_linear_synthetic(n, informative, noise, seed), output);
    } else {
      std::cerr << "error: unknown kind '" << kind << "'\n";
      return 2;
    }
  } catch (const renyi_fs::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
