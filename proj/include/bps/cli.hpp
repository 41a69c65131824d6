#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bps {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Plain-text key=value record written next to every output set.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string scenario_dir;
  std::string seed;
  std::string out_dir;
  std::string timestamp;
  std::string version;
  std::string working_dir;  // relative arguments resolve against this
  std::vector<std::string> args;  // full argument list, program name excluded
  std::vector<std::pair<std::string, std::string>> results;

  void write(const std::filesystem::path& path) const;
  static RunManifest read(const std::filesystem::path& path);
};

std::string code_version();

/// Runs one command in-process. `args` excludes the program name. Returns the
/// process exit code: 0 ok, 1 failed verification or run error, 2 usage or
/// configuration error, 3 I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bps
