#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace flexduplex::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfigError = 2, kRuntimeError = 3, kInfeasible = 4 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "FLEXDUPLEX_OUT_DIR";

/// `explicit_dir` if set, else $FLEXDUPLEX_OUT_DIR, else the working directory.
std::filesystem::path output_dir(const std::optional<std::filesystem::path>& explicit_dir);

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  bool write_layout = false;
  bool write_raw_log = false;
};
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

struct SweepOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
};
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);

struct ProvisionOptions {
  std::filesystem::path demands;
  std::optional<long long> total;
  std::optional<double> rho_max;
  std::optional<double> w_target;
};
int cmd_provision(const ProvisionOptions& opts, std::ostream& out, std::ostream& err);

int cmd_bands_list(std::ostream& out);
int cmd_bands_lookup(int band, std::ostream& out, std::ostream& err);
int cmd_bands_check(int band, const std::string& direction, const std::string& scheme, bool json,
                    std::ostream& out, std::ostream& err);

int cmd_print_config(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

}  // namespace flexduplex::cli
