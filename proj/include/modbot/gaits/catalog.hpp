#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "modbot/cpg/network.hpp"
#include "modbot/gaits/angle_expr.hpp"
#include "modbot/hierarchy/system.hpp"

namespace modbot::gaits {

/// Joints per module on the hardware this catalog targets.
inline constexpr int kJointsPerModule = 5;

struct ModuleGait {
  std::vector<Angle> phase_differences;  ///< n-1
  std::vector<Angle> amplitudes;         ///< n
  std::vector<Angle> offsets;            ///< n
  bool operator==(const ModuleGait&) const = default;
};

struct GaitPreset {
  std::string name;
  std::string description;
  std::vector<ModuleGait> modules;
  std::vector<Angle> module_phase_delays;  ///< m-1
  double period = 0.0;                     ///< s

  int module_count() const { return static_cast<int>(modules.size()); }
  double omega() const;
  bool operator==(const GaitPreset&) const;
};

struct Violation {
  int module = 0;  ///< 1-based, 0 when preset-wide
  int joint = 0;   ///< 1-based, 0 when not joint-specific
  std::string message;
};

/// Semantically invalid catalog content (well-formed JSON, wrong schema).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empty iff every module has n = 5 consistent vectors, delays have length
/// m-1, the period is positive and every joint satisfies |R|+|C| <= 3pi/4.
std::vector<Violation> validate(const GaitPreset& preset);

GaitPreset scale_period(const GaitPreset& preset, double period);

class GaitCatalog {
 public:
  GaitCatalog() = default;
  explicit GaitCatalog(std::vector<GaitPreset> presets) : presets_(std::move(presets)) {}

  /// Empty or whitespace-only text is an empty catalog. Throws ParseError on
  /// malformed JSON and SchemaError on malformed presets or angles.
  static GaitCatalog parse(std::string_view text);
  static GaitCatalog load(const std::filesystem::path& path);
  /// The catalog shipped with the project.
  static const GaitCatalog& shipped();

  const std::vector<GaitPreset>& presets() const { return presets_; }
  std::vector<std::string> names() const;
  /// Throws NotFound listing the available names.
  const GaitPreset& get(std::string_view name) const;

  std::string serialize() const;

 private:
  std::vector<GaitPreset> presets_;
};

/// Looks a preset up in the shipped catalog.
GaitPreset get_preset(std::string_view name);

std::filesystem::path default_catalog_path();

struct GainOptions {
  double mu = cpg::kDefaultMu;
  double amplitude_rate = cpg::kDefaultAmplitudeRate;
  double mu_high = hierarchy::kDefaultMuHigh;
  double gamma = hierarchy::kDefaultGamma;
  cpg::InjectionMode injection = cpg::InjectionMode::kFirstOscillator;
};

/// Module networks with omega = 2pi / period plus the high-level layer.
hierarchy::SystemConfig make_system_config(const GaitPreset& preset, const GainOptions& gains = {});

}  // namespace modbot::gaits
