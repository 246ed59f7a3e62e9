#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "flexduplex/engine.hpp"

namespace flexduplex::config {

/// Malformed or inconsistent configuration; `line` is 0 when the problem
/// is not tied to one line.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string source, int line, std::string key, const std::string& message);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Cartesian sweep axes. Scheme names accept the engine names or the short
/// forms ONLY_MENB, FMA and TMA, resolved against each ratio.
struct SweepAxes {
  std::string name;
  std::vector<std::string> schemes;
  std::vector<double> lambda_dl;
  std::vector<double> ratio;
};

struct SweepPoint {
  engine::Scheme scheme;
  double lambda_dl;
  double ratio;
};

struct ExperimentConfig {
  engine::SimConfig sim;
  /// Scheme as written; kept so a dump reproduces the document.
  std::string scheme_name = "ONLY_MENB";
  std::vector<SweepAxes> sweeps;

  /// Points in axis order: sweep section, scheme, lambda_dl, ratio.
  std::vector<SweepPoint> sweep_points() const;
};

/// FMA reuses the lighter FDD carrier: UL when ratio <= 1, DL otherwise.
/// TMA is only defined on the FDD-UL carrier.
engine::Scheme resolve_scheme(std::string_view name, double ratio);

ExperimentConfig parse(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load(const std::filesystem::path& path);

/// Every key with its effective value; parse(dump(c)) reproduces c.
std::string dump(const ExperimentConfig& c);

struct KeyInfo {
  std::string section;
  std::string key;
  std::string description;
};
std::vector<KeyInfo> known_keys();

}  // namespace flexduplex::config
