#pragma once

#include "cohere/io.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cohere
{
struct CliOptions
{
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out = ".";
  bool strict = false;
};

/// Exit status for an error code: 2 for bad input, 3 for numerical failure, 1 for I/O.
int exit_code(ErrorCode code);

/// Each command validates its whole config before producing any output.
RunOutputs cmd_coherence(json const& cfg, CliOptions const& opt);
RunOutputs cmd_counts(json const& cfg, CliOptions const& opt);
RunOutputs cmd_ordering(json const& cfg, CliOptions const& opt);
RunOutputs cmd_pattern(json const& cfg, CliOptions const& opt);
RunOutputs cmd_reconstruct(json const& cfg, CliOptions const& opt);
RunOutputs cmd_verify(CliOptions const& opt, bool& all_passed);

/// Arguments after the program name: cohere <command> [--config PATH] [--seed U64] [--threads N] [--out DIR] [--strict].
int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

} // namespace cohere
