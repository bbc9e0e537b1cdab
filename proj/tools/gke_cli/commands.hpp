#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "gke/group.hpp"

namespace gke::cli {

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr const char* kDefaultGroup = "tiny";
inline constexpr const char* kConfigEnvVar = "GKE_CONFIG";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // invariant or verification failure, unexpected attack outcome
  kExitUsage = 2,    // usage, parse or scenario error
  kExitInapplicable = 3,
};

struct Config {
  std::optional<std::string> group_preset;
  std::optional<std::string> group_file;
  std::uint64_t seed = kDefaultSeed;
  std::string scenario;
  std::string out;
  int verbosity = 0;
};

/// Custom groups: a JSON object with p, q, g as decimal or 0x-hex strings.
Group load_group_file(const std::string& path);
Group resolve_group(const Config& config);

int cmd_run(const Config& config, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& transcript_path, const Config& config, std::ostream& out,
               std::ostream& err);
/// Exactly one of transcript_path / single_key_n is set.
int cmd_attack(const std::optional<std::string>& transcript_path,
               std::optional<std::size_t> single_key_n, const Config& config, std::ostream& out,
               std::ostream& err);
int cmd_groups(std::ostream& out);

/// Full command-line entry point; `main` forwards here.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gke::cli
