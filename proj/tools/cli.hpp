#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "anisolve/solver.hpp"

namespace anisolve::cli {

/// Exit codes shared by the subcommands.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kNotConverged = 2;

struct CommonFlags {
  std::uint64_t seed = 0;
  bool quiet = false;
};

int cmd_solve(const std::filesystem::path& config, const std::filesystem::path& out_dir, const CommonFlags& flags,
              std::ostream& out, std::ostream& err);
int cmd_capacity(const std::filesystem::path& config, const std::filesystem::path& out_dir, const CommonFlags& flags,
                 std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& bundle_dir, const std::filesystem::path& config,
               const std::filesystem::path& out_dir, const CommonFlags& flags, std::ostream& out,
               std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Writes u.csv, w.csv, nu.csv and trace.csv.
void write_bundle(const std::filesystem::path& dir, const SolutionBundle& bundle);
/// Reads u.csv, w.csv and nu.csv written by write_bundle for `problem`.
SolutionBundle read_bundle(const std::filesystem::path& dir, const Problem& problem);

/// Worker cap from ANISOLVE_THREADS, defaulting to the hardware concurrency.
int thread_cap();

}  // namespace anisolve::cli
