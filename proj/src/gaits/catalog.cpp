#include "modbot/gaits/catalog.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "modbot/common/angles.hpp"
#include "modbot/common/errors.hpp"

namespace modbot::gaits {

using nlohmann::json;
using nlohmann::ordered_json;

double GaitPreset::omega() const {
  if (!(period > 0.0)) throw InvalidParameter("gait period must be > 0");
  return kTwoPi / period;
}

bool GaitPreset::operator==(const GaitPreset& other) const {
  return name == other.name && description == other.description && modules == other.modules &&
         module_phase_delays == other.module_phase_delays &&
         std::bit_cast<std::uint64_t>(period) == std::bit_cast<std::uint64_t>(other.period);
}

std::vector<Violation> validate(const GaitPreset& preset) {
  std::vector<Violation> out;
  const int m = preset.module_count();
  if (m < 1) out.push_back({0, 0, "preset has no modules"});
  if (!(preset.period > 0.0) || !std::isfinite(preset.period)) {
    out.push_back({0, 0, "period must be a positive number of seconds"});
  }
  if (m >= 1 && static_cast<int>(preset.module_phase_delays.size()) != m - 1) {
    out.push_back({0, 0, "module_phase_delays must have m-1 = " + std::to_string(m - 1) +
                             " entries"});
  }
  for (int j = 0; j < m; ++j) {
    const auto& mod = preset.modules[j];
    bool dims_ok = true;
    if (static_cast<int>(mod.phase_differences.size()) != kJointsPerModule - 1) {
      out.push_back({j + 1, 0, "phase_differences must have 4 entries"});
      dims_ok = false;
    }
    if (static_cast<int>(mod.amplitudes.size()) != kJointsPerModule) {
      out.push_back({j + 1, 0, "amplitudes must have 5 entries"});
      dims_ok = false;
    }
    if (static_cast<int>(mod.offsets.size()) != kJointsPerModule) {
      out.push_back({j + 1, 0, "offsets must have 5 entries"});
      dims_ok = false;
    }
    if (!dims_ok) continue;
    for (int i = 0; i < kJointsPerModule; ++i) {
      const double reach = std::abs(mod.amplitudes[i].value()) + std::abs(mod.offsets[i].value());
      if (reach > kJointLimit + 1e-12) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "|R|+|C| = %.6f rad exceeds the joint range 3pi/4 = %.6f",
                      reach, kJointLimit);
        out.push_back({j + 1, i + 1, buf});
      }
    }
  }
  return out;
}

GaitPreset scale_period(const GaitPreset& preset, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw InvalidParameter("gait period must be > 0");
  }
  GaitPreset out = preset;
  out.period = period;
  return out;
}

namespace {

Angle read_angle(const json& v, const std::string& where) {
  try {
    if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw SchemaError(where + ": non-finite angle");
      return Angle::radians(x);
    }
    if (v.is_string()) return parse_angle(v.get<std::string>());
  } catch (const ParseError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": angle must be a string like \"1/2 pi\" or a number");
}

std::vector<Angle> read_angles(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing '" + key + "'");
  if (!it->is_array()) throw SchemaError(where + "." + key + ": expected an array");
  std::vector<Angle> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    out.push_back(read_angle((*it)[i], where + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw SchemaError(where + ": unknown field '" + key + "'");
  }
}

GaitPreset read_preset(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  reject_unknown(obj, {"name", "description", "period_s", "module_phase_delays", "modules"}, where);
  GaitPreset p;
  if (!obj.contains("name") || !obj["name"].is_string()) {
    throw SchemaError(where + ": missing string 'name'");
  }
  p.name = obj["name"].get<std::string>();
  if (obj.contains("description")) {
    if (!obj["description"].is_string()) throw SchemaError(where + ".description: expected a string");
    p.description = obj["description"].get<std::string>();
  }
  if (!obj.contains("period_s") || !obj["period_s"].is_number()) {
    throw SchemaError(where + ": missing numeric 'period_s'");
  }
  p.period = obj["period_s"].get<double>();
  p.module_phase_delays = obj.contains("module_phase_delays")
                              ? read_angles(obj, "module_phase_delays", where)
                              : std::vector<Angle>{};
  if (!obj.contains("modules") || !obj["modules"].is_array()) {
    throw SchemaError(where + ": missing array 'modules'");
  }
  const auto& mods = obj["modules"];
  for (std::size_t j = 0; j < mods.size(); ++j) {
    const std::string w = where + ".modules[" + std::to_string(j) + "]";
    if (!mods[j].is_object()) throw SchemaError(w + ": expected an object");
    reject_unknown(mods[j], {"phase_differences", "amplitudes", "offsets"}, w);
    p.modules.push_back({read_angles(mods[j], "phase_differences", w),
                         read_angles(mods[j], "amplitudes", w), read_angles(mods[j], "offsets", w)});
  }
  return p;
}

ordered_json write_angles(const std::vector<Angle>& angles) {
  ordered_json arr = ordered_json::array();
  for (const auto& a : angles) {
    if (a.fraction()) {
      arr.push_back(a.to_string());
    } else {
      arr.push_back(a.value());
    }
  }
  return arr;
}

}  // namespace

GaitCatalog GaitCatalog::parse(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return GaitCatalog{};
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("gait catalog is not valid JSON: ") + e.what(),
                     e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!doc.is_object() || !doc.contains("presets") || !doc["presets"].is_array()) {
    throw SchemaError("gait catalog must be an object with a 'presets' array");
  }
  std::vector<GaitPreset> presets;
  const auto& arr = doc["presets"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    presets.push_back(read_preset(arr[i], "presets[" + std::to_string(i) + "]"));
    for (std::size_t k = 0; k + 1 < presets.size(); ++k) {
      if (presets[k].name == presets.back().name) {
        throw SchemaError("duplicate preset name '" + presets.back().name + "'");
      }
    }
  }
  return GaitCatalog(std::move(presets));
}

GaitCatalog GaitCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read gait catalog " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const GaitCatalog& GaitCatalog::shipped() {
  static const GaitCatalog catalog = load(default_catalog_path());
  return catalog;
}

std::vector<std::string> GaitCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& p : presets_) out.push_back(p.name);
  return out;
}

const GaitPreset& GaitCatalog::get(std::string_view name) const {
  for (const auto& p : presets_) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets_) known += (known.empty() ? "" : ", ") + p.name;
  throw NotFound("unknown gait '" + std::string(name) + "'; available: " +
                 (known.empty() ? "(none)" : known));
}

std::string GaitCatalog::serialize() const {
  ordered_json arr = ordered_json::array();
  for (const auto& p : presets_) {
    ordered_json obj;
    obj["name"] = p.name;
    if (!p.description.empty()) obj["description"] = p.description;
    obj["period_s"] = p.period;
    obj["module_phase_delays"] = write_angles(p.module_phase_delays);
    ordered_json mods = ordered_json::array();
    for (const auto& m : p.modules) {
      ordered_json mo;
      mo["phase_differences"] = write_angles(m.phase_differences);
      mo["amplitudes"] = write_angles(m.amplitudes);
      mo["offsets"] = write_angles(m.offsets);
      mods.push_back(std::move(mo));
    }
    obj["modules"] = std::move(mods);
    arr.push_back(std::move(obj));
  }
  ordered_json doc;
  doc["presets"] = std::move(arr);
  return doc.dump(2) + "\n";
}

GaitPreset get_preset(std::string_view name) { return GaitCatalog::shipped().get(name); }

std::filesystem::path default_catalog_path() { return MODBOT_DEFAULT_CATALOG; }

hierarchy::SystemConfig make_system_config(const GaitPreset& preset, const GainOptions& gains) {
  const auto violations = validate(preset);
  if (!violations.empty()) {
    throw InvalidParameter("gait '" + preset.name + "' is invalid: " + violations.front().message);
  }
  const int m = preset.module_count();
  hierarchy::SystemConfig cfg;
  cfg.gamma = gains.gamma;
  cfg.injection = gains.injection;
  cfg.mu_high = Eigen::VectorXd::Constant(m - 1, gains.mu_high);
  cfg.theta_high_des.resize(m - 1);
  for (int j = 0; j + 1 < m; ++j) cfg.theta_high_des[j] = preset.module_phase_delays[j].value();

  for (const auto& mod : preset.modules) {
    auto p = cpg::OscillatorNetworkParams::with_defaults(kJointsPerModule, preset.omega());
    p.mu.setConstant(gains.mu);
    p.a.setConstant(gains.amplitude_rate);
    for (int i = 0; i < kJointsPerModule; ++i) {
      p.amplitude[i] = mod.amplitudes[i].value();
      p.offset[i] = mod.offsets[i].value();
    }
    for (int i = 0; i + 1 < kJointsPerModule; ++i) p.theta_des[i] = mod.phase_differences[i].value();
    cfg.module_params.push_back(std::move(p));
  }
  return cfg;
}

}  // namespace modbot::gaits
