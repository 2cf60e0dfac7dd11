#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "parest/runner.hpp"

namespace {

void print_usage() {
  std::cout << "Usage: parest <config.json> [--seed <u64>] [--out <dir>]\n"
            << "Commands (chosen inside the config): solve | verify | sharpness |\n"
            << "  asymptotic | picard | probe\n"
            << "Exit codes: 0 pass, 1 inequality/convergence failure, 2 invalid input,\n"
            << "  3 resource limit (shift cap, iteration budget)\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_usage();
    return 2;
  }
  std::string config_path;
  parest::cli::RunOverrides overrides;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--help" || arg == "-h") {
      print_usage();
      return 0;
    }
    if (arg == "--seed") {
      if (i + 1 >= argc) {
        std::cerr << "parest: --seed needs a value\n";
        return 2;
      }
      overrides.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--out") {
      if (i + 1 >= argc) {
        std::cerr << "parest: --out needs a value\n";
        return 2;
      }
      overrides.out_dir = argv[++i];
    } else if (config_path.empty()) {
      config_path = arg;
    } else {
      std::cerr << "parest: unexpected argument: " << arg << "\n";
      return 2;
    }
  }
  if (config_path.empty()) {
    print_usage();
    return 2;
  }
  return parest::cli::run(config_path, overrides);
}
