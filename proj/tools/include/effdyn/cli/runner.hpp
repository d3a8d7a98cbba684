#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "effdyn/cli/config.hpp"

namespace effdyn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitInvariant = 3,
  kExitUsage = 64,
};

struct Options {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool strict = false;
};

/// One numerical check: passes when `value` is within `tolerance`.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// In-memory output of a subcommand; nothing touches the disk until the run
/// has succeeded. Paths are relative to the output directory.
struct Artifacts {
  std::map<std::string, std::string> files;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  void add(std::string name, double value, double tolerance);
  void add_flag(std::string name, bool pass);
  bool all_pass() const;
  void merge(const Artifacts& other, const std::string& prefix);
};

const std::vector<std::string>& subcommands();
std::string usage();

/// Runs one subcommand without any file IO. Throws the library exceptions.
Artifacts execute(const std::string& command, const RunConfig& config, std::size_t threads);

/// manifest.json contents for a finished run.
std::string manifest(const std::string& command, const RunConfig& config, const Artifacts& artifacts);

/// Full run: load config, execute, write artifacts atomically. Never throws.
int run(const Options& options, std::ostream& log);

/// Parses argv with CLI11 and calls run().
int main_entry(int argc, char** argv);

/// "name,value,tolerance,pass" rows.
std::string checks_csv(const std::vector<Check>& checks);

}  // namespace effdyn::cli
