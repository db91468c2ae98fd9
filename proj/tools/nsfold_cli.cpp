// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "nsfold/nsfold.h"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::size_t threads = 0;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
};

int exit_for(nsf_status s) {
  if (s == NSF_ERR_IO) return 74;
  if (s == NSF_ERR_CONFIG || s == NSF_ERR_INVALID_ARGUMENT || s == NSF_ERR_DIMENSION_MISMATCH) return 64;
  return 70;
}

int run(const std::string& command, const Flags& f, const CLI::App& sub) {
  nsf_config* cfg = nullptr;
  nsf_status st = nsf_config_load(f.config.c_str(), &cfg);
  if (st != NSF_OK) {
    std::fprintf(stderr, "%s: %s\n", f.config.c_str(), nsf_last_error());
    return exit_for(st);
  }
  nsf_run_options opts{};
  if (!f.out.empty()) opts.out = f.out.c_str();
  opts.threads = f.threads;
  if (sub.count("--budget")) {
    opts.budget = f.budget;
    opts.has_budget = 1;
  }
  if (sub.count("--seed")) {
    opts.seed = f.seed;
    opts.has_seed = 1;
  }
  int code = 0;
  char* output = nullptr;
  char* diagnostics = nullptr;
  st = nsf_run_command(cfg, command.c_str(), &opts, &code, &output, &diagnostics);
  nsf_config_free(cfg);
  if (st != NSF_OK) {
    std::fprintf(stderr, "error: %s\n", nsf_last_error());
    return exit_for(st);
  }
  std::fputs(output, stdout);
  std::fputs(diagnostics, stderr);
  nsf_string_free(output);
  nsf_string_free(diagnostics);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonsmooth fold toolkit: certificates, orbits, flows, scans and tipping runs"};
  app.set_version_flag("--version", std::string(nsf_version()));
  app.require_subcommand(1);

  const char* commands[][2] = {
      {"certify", "classify the bifurcation and print the divergence certificate"},
      {"orbit", "iterate a map and write the orbit as CSV"},
      {"flow", "simulate an ODE, Filippov or hybrid system and write the trajectory"},
      {"scan1d", "sweep one parameter and write branch data"},
      {"scan2d", "classify attractors over a parameter grid and write CSV and heatmaps"},
      {"limit-cycle", "iterate the return map on the switching manifold"},
      {"tip", "drift mu through the fold of the Stommel model"},
  };
  Flags flags;
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", flags.config, "experiment file (JSON)")->required();
    sub->add_option("--out", flags.out, "output path (overrides run.out)");
    sub->add_option("--threads", flags.threads, "worker threads for scans (fallback: NSFOLD_THREADS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--budget", flags.budget, "iteration budget");
    sub->add_option("--seed", flags.seed, "seed for sampled checks");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }
  for (CLI::App* sub : subs) {
    if (sub->parsed()) return run(sub->get_name(), flags, *sub);
  }
  return 64;
}
