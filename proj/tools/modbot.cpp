// modbot: run CPG gait simulations, validate gait files, export traces.
//
// Exit codes: 0 success, 1 validation failures, 2 usage or input error,
// 3 numeric failure.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "modbot/common/errors.hpp"
#include "modbot/gaits/catalog.hpp"
#include "modbot/sim/direct_run.hpp"
#include "modbot/sim/networked_run.hpp"
#include "modbot/sim/trace_io.hpp"
#include "modbot/transport/mqtt_bridge.hpp"

namespace {

using modbot::gaits::GaitCatalog;

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kInputError = 2;
constexpr int kNumericFailure = 3;

struct SimulateArgs {
  std::string preset;
  std::string file;
  double duration = 10.0;
  double dt = 0.002;
  std::uint64_t seed = 1;
  std::string mode = "direct";
  double loss = 0.0;
  double latency_ms = 5.0;
  double jitter_ms = 0.0;
  std::optional<double> loss_until_ms;
  bool random_init = false;
  std::string out = "modbot_out";
};

// Loads a catalog, reporting failures on stderr. nullopt means exit 2.
std::optional<GaitCatalog> load_catalog(const std::string& path) {
  try {
    return path.empty() ? GaitCatalog::shipped() : GaitCatalog::load(path);
  } catch (const modbot::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const modbot::gaits::SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return std::nullopt;
}

int cmd_gaits_list(const std::string& file) {
  const auto catalog = load_catalog(file);
  if (!catalog) return kInputError;
  std::printf("%-16s %7s %8s  %s\n", "name", "modules", "period_s", "status");
  for (const auto& p : catalog->presets()) {
    const auto violations = modbot::gaits::validate(p);
    const std::string status =
        violations.empty() ? "valid" : "invalid (" + std::to_string(violations.size()) + ")";
    std::printf("%-16s %7d %8.3f  %s\n", p.name.c_str(), p.module_count(), p.period,
                status.c_str());
  }
  return kOk;
}

int cmd_validate(const std::string& path) {
  const auto catalog = load_catalog(path);
  if (!catalog) return kInputError;
  std::size_t total = 0;
  for (const auto& p : catalog->presets()) {
    for (const auto& v : modbot::gaits::validate(p)) {
      ++total;
      std::printf("%s", p.name.c_str());
      if (v.module > 0) std::printf(" module %d", v.module);
      if (v.joint > 0) std::printf(" joint %d", v.joint);
      std::printf(": %s\n", v.message.c_str());
    }
  }
  if (total == 0) {
    std::printf("%zu preset(s), no violations\n", catalog->presets().size());
    return kOk;
  }
  std::printf("%zu violation(s)\n", total);
  return kValidationFailed;
}

int cmd_simulate(const SimulateArgs& args) {
  if (!(args.duration > 0.0)) {
    std::cerr << "error: --duration must be > 0\n";
    return kInputError;
  }
  if (!(args.dt > 0.0)) {
    std::cerr << "error: --dt must be > 0\n";
    return kInputError;
  }
  const auto catalog = load_catalog(args.file);
  if (!catalog) return kInputError;

  modbot::gaits::GaitPreset preset;
  try {
    if (!args.preset.empty()) {
      preset = catalog->get(args.preset);
    } else if (catalog->presets().size() == 1) {
      preset = catalog->presets().front();
    } else {
      std::cerr << "error: --preset is required when the catalog holds "
                << catalog->presets().size() << " presets\n";
      return kInputError;
    }
  } catch (const modbot::NotFound& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  if (const auto violations = modbot::gaits::validate(preset); !violations.empty()) {
    for (const auto& v : violations) std::cerr << "error: " << preset.name << ": " << v.message << '\n';
    return kInputError;
  }

  modbot::sim::DirectRunOptions base;
  base.duration = args.duration;
  base.dt = args.dt;
  base.seed = args.seed;
  base.random_init = args.random_init;
  const modbot::sim::RunDescription desc{preset.name, args.mode, args.seed};

  try {
    const modbot::hierarchy::HierarchicalSystem system(modbot::gaits::make_system_config(preset));
    if (args.mode == "direct") {
      const auto run = modbot::sim::run_direct(system, base);
      modbot::sim::write_direct_artifacts(args.out, desc, run);
      std::printf("%s: %lld steps, residuals intra %.3g / inter %.3g rad -> %s\n",
                  preset.name.c_str(), static_cast<long long>(run.steps),
                  run.final_residuals.max_intra(), run.final_residuals.max_inter(),
                  args.out.c_str());
      return kOk;
    }

    modbot::sim::NetworkedRunOptions opts;
    opts.base = base;
    opts.channel.loss_probability = args.loss;
    opts.channel.latency_ms = args.latency_ms;
    opts.channel.jitter_ms = args.jitter_ms;
    opts.channel.seed = args.seed;
    opts.channel.loss_until_ms = args.loss_until_ms;
    const auto bridge = modbot::transport::MqttBridge::from_environment("modbot-master");
    opts.bridge = bridge.get();
    const auto run = modbot::sim::run_networked(system, opts);
    modbot::sim::write_networked_artifacts(args.out, desc, run);
    std::printf("%s: %lld segments, %lld/%lld messages dropped, interpolation error %.3g "
                "(bound %.3g) -> %s\n",
                preset.name.c_str(), static_cast<long long>(run.segments_sent),
                static_cast<long long>(run.messages_dropped),
                static_cast<long long>(run.messages_sent), run.interpolation.max_error,
                run.interpolation.bound, args.out.c_str());
    return kOk;
  } catch (const modbot::NumericDivergence& e) {
    std::cerr << "error: numeric divergence at t = " << e.time() << " s: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer CPG gait simulator for modular robots"};
  app.require_subcommand(1);

  auto* gaits = app.add_subcommand("gaits", "Gait catalog commands");
  gaits->require_subcommand(1);
  std::string list_file;
  auto* list = gaits->add_subcommand("list", "List presets with validation status");
  list->add_option("--file", list_file, "Catalog file (default: shipped catalog)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a gait file against the joint limits");
  validate->add_option("path", validate_path, "Gait catalog file")->required();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a gait and write traces");
  simulate->add_option("--preset", sim.preset, "Preset name");
  simulate->add_option("--file", sim.file, "Catalog file (default: shipped catalog)");
  simulate->add_option("--duration", sim.duration, "Simulated time, s")->capture_default_str();
  simulate->add_option("--dt", sim.dt, "Integration step, s")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Seed for channel faults and random init")
      ->capture_default_str();
  simulate->add_option("--mode", sim.mode, "direct or networked")
      ->check(CLI::IsMember({"direct", "networked"}))
      ->capture_default_str();
  simulate->add_option("--loss", sim.loss, "Message loss probability in [0, 1)")
      ->capture_default_str();
  simulate->add_option("--latency-ms", sim.latency_ms, "Channel latency")->capture_default_str();
  simulate->add_option("--jitter-ms", sim.jitter_ms, "Uniform jitter half-width")
      ->capture_default_str();
  simulate->add_option("--loss-until-ms", sim.loss_until_ms,
                       "Stop dropping messages sent at or after this time");
  simulate->add_flag("--random-init", sim.random_init, "Start from random phases");
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  if (*list) return cmd_gaits_list(list_file);
  if (*validate) return cmd_validate(validate_path);
  if (*simulate) return cmd_simulate(sim);
  return kInputError;
}
