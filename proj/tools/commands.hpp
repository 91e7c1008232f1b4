#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "seqmatch/gridworld.hpp"
#include "seqmatch/rewards.hpp"

namespace seqmatch::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNonConvergence = 3,
  kExitClaimFailure = 4,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Scenario reproduction on explicit fixtures; the scenario command calls
// this with the built-in ones. Returns kExitClaimFailure if any claim fails.
int run_scenarios(const std::vector<Scenario>& scenarios, const std::filesystem::path& out_dir, int jobs,
                  const RewardParams& params, std::ostream& out);

}  // namespace seqmatch::cli
