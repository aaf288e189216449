#include <iostream>
#include <string>
#include <vector>

#include "badgeforge/cli.hpp"

namespace {

const char* kUsage = R"(badgeforge — badge-mechanism design toolkit

usage: badgeforge <command> [--config PATH] [--out DIR] [--jobs N] [--seed N]
                  [--<dotted.config.path>=VALUE ...]

commands:
  solve       equilibrium of an absolute-threshold mechanism (thetas or kappas)
  compare     contribution and approximation-ratio table for the standard menu
  reproduce   sweep recipes: median-4 | single-2 | convex-log | leaderboard-concave
  simulate    Monte Carlo estimates, equilibrium and payment-identity checks
  tiebreak    tie-sensitivity analysis over a beta grid (linear status)

Any scalar config field can be overridden from the command line by its dotted
path, e.g. --distribution.kind=long-tail --distribution.H=1000 --n=large.
)";

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    std::cout << kUsage;
    return args.empty() ? 2 : 0;
  }
  return badgeforge::cli::run(args, std::cout, std::cerr);
}
