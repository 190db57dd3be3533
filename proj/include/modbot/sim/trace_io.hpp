#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modbot/sim/direct_run.hpp"
#include "modbot/sim/networked_run.hpp"

namespace modbot::sim {

/// Nine significant digits, negative zero printed as 0.
std::string format_csv_number(double v);

/// Columns: t, q1..qn, phi1..phin, r1..rn.
void write_module_csv(std::ostream& out, const ModuleTrace& trace);

/// Columns: t_ms, q1..q5 (rad), p1..p5 (us), seq_active, holds.
void write_slave_csv(std::ostream& out, const std::vector<runtime::SlaveTraceRow>& rows);

/// One JSON object per bus message: send_us, deliver_us (-1 = dropped), topic, payload.
void write_message_log(std::ostream& out, const std::vector<transport::BusLogEntry>& log);

struct RunDescription {
  std::string preset;
  std::string mode;  ///< "direct" or "networked"
  std::uint64_t seed = 0;
};

nlohmann::json direct_summary(const RunDescription& desc, const DirectRunResult& run);
nlohmann::json networked_summary(const RunDescription& desc, const NetworkedRunResult& run);

/// Writes module_<j>.csv and summary.json (plus slave_<j>.csv and
/// messages.jsonl for networked runs) into `dir`, creating it if needed.
void write_direct_artifacts(const std::filesystem::path& dir, const RunDescription& desc,
                            const DirectRunResult& run);
void write_networked_artifacts(const std::filesystem::path& dir, const RunDescription& desc,
                               const NetworkedRunResult& run);

}  // namespace modbot::sim
