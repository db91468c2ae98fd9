// SPDX-License-Identifier: Apache-2.0
//
// The workflows behind the command-line tool. Each command reads an
// ExperimentConfig, writes its files atomically and returns an exit code
// plus the text destined for stdout and stderr.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nsfold/config.hpp"

namespace nsfold {

namespace exit_code {
inline constexpr int kCertified = 0;
inline constexpr int kOk = 0;
inline constexpr int kNoCertificate = 1;
inline constexpr int kDegenerate = 2;
inline constexpr int kNumericalFailure = 70;
inline constexpr int kConfigError = 64;
inline constexpr int kIoError = 74;
}  // namespace exit_code

struct CommandOverrides {
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> budget;
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  int exit_code = 0;
  std::string output;
  std::string diagnostics;
};

/// certify, orbit, flow, scan1d, scan2d, limit-cycle, tip.
CommandResult run_command(const std::string& name, ExperimentConfig cfg, const CommandOverrides& ov = {});

/// Thread count: explicit value, else NSFOLD_THREADS, else 1.
std::size_t resolve_threads(std::size_t requested);

}  // namespace nsfold
