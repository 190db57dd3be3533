#include "modbot/sim/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace modbot::sim {

using nlohmann::json;

std::string format_csv_number(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_module_csv(std::ostream& out, const ModuleTrace& trace) {
  const Eigen::Index n = trace.q.empty() ? 0 : trace.q.front().size();
  out << "t";
  for (const char* prefix : {"q", "phi", "r"}) {
    for (Eigen::Index i = 1; i <= n; ++i) out << ',' << prefix << i;
  }
  out << '\n';
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    std::string line = format_csv_number(trace.t[k]);
    for (const auto* vec : {&trace.q[k], &trace.phi[k], &trace.r[k]}) {
      for (Eigen::Index i = 0; i < n; ++i) {
        line += ',';
        line += format_csv_number((*vec)[i]);
      }
    }
    out << line << '\n';
  }
}

void write_slave_csv(std::ostream& out, const std::vector<runtime::SlaveTraceRow>& rows) {
  out << "t_ms,q1,q2,q3,q4,q5,p1,p2,p3,p4,p5,seq_active,holds\n";
  for (const auto& row : rows) {
    std::string line = std::to_string(row.t_ms);
    for (double q : row.q) line += ',' + format_csv_number(q);
    for (int p : row.command.pulse_us) line += ',' + std::to_string(p);
    line += ',' + std::to_string(row.seq_active) + ',' + std::to_string(row.holds);
    out << line << '\n';
  }
}

void write_message_log(std::ostream& out, const std::vector<transport::BusLogEntry>& log) {
  for (const auto& e : log) {
    // Payloads are already canonical JSON; embed them as strings so the log
    // stays byte-for-byte what went over the wire.
    json line;
    line["send_us"] = e.send_us;
    line["deliver_us"] = e.deliver_us;
    line["topic"] = e.topic;
    line["payload"] = e.payload;
    out << line.dump() << '\n';
  }
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json residual_block(const hierarchy::ConstraintResiduals& r) {
  json j;
  j["intra_module_max"] = r.max_intra();
  j["inter_module_max"] = r.max_inter();
  j["inter_module_partial"] = r.partial;
  return j;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

json direct_summary(const RunDescription& desc, const DirectRunResult& run) {
  json s;
  s["preset"] = desc.preset;
  s["mode"] = desc.mode;
  s["seed"] = desc.seed;
  s["duration_s"] = run.duration;
  s["dt_s"] = run.dt;
  s["steps"] = run.steps;
  s["final_residuals"] = residual_block(run.final_residuals);

  json modules = json::array();
  std::int64_t clamps = 0;
  std::int64_t clamps_late = 0;
  for (std::size_t j = 0; j < run.module_summary.size(); ++j) {
    const auto& m = run.module_summary[j];
    json mj;
    mj["module"] = j;
    mj["terminal_potential"] = m.terminal_potential;
    mj["final_phase_error_max"] = m.final_phase_error;
    mj["convergence_time_s"] = optional_number(m.convergence_time);
    mj["joint_limit_clamps"] = m.clamps;
    mj["joint_limit_clamps_after_transient"] = m.clamps_after_transient;
    mj["max_abs_q"] = m.max_abs_q;
    modules.push_back(std::move(mj));
    clamps += m.clamps;
    clamps_late += m.clamps_after_transient;
  }
  s["modules"] = std::move(modules);
  s["joint_limit_flags"] = {{"clamps", clamps}, {"clamps_after_transient", clamps_late}};
  return s;
}

json networked_summary(const RunDescription& desc, const NetworkedRunResult& run) {
  json s = direct_summary(desc, run.reference);
  json net;
  net["segments_sent"] = run.segments_sent;
  net["messages_sent"] = run.messages_sent;
  net["messages_dropped"] = run.messages_dropped;
  net["messages_delivered"] = run.messages_delivered;
  net["loss_rate_observed"] =
      run.messages_sent > 0 ? static_cast<double>(run.messages_dropped) / run.messages_sent : 0.0;
  net["stale_dropped"] = run.stale_dropped;
  net["overflow_dropped"] = run.overflow_dropped;
  net["duplicates"] = run.duplicates;
  net["malformed"] = run.malformed;
  net["hold_ticks"] = run.holds;
  net["status_received"] = run.status_received;
  net["master_clamped_samples"] = run.master_clamps;
  net["out_of_range_pulses"] = run.out_of_range_pulses;
  json gaps = json::array();
  for (bool g : run.gap_free) gaps.push_back(g);
  net["seq_gap_free"] = std::move(gaps);

  const auto& in = run.interpolation;
  net["interpolation"] = {{"max_error", in.max_error},
                          {"bound", in.bound},
                          {"max_qddot", in.max_qddot},
                          {"within_bound", in.max_error <= in.bound},
                          {"probes", in.probes},
                          {"held_probes", in.held_probes}};
  if (run.recovery.applicable) {
    const auto& r = run.recovery;
    net["recovery"] = {{"from_ms", r.recovered_from_ms},
                       {"max_error", r.max_error},
                       {"probes", r.probes},
                       {"held_probes", r.held_probes},
                       {"gap_free", r.gap_free}};
  }
  s["network"] = std::move(net);
  return s;
}

void write_direct_artifacts(const std::filesystem::path& dir, const RunDescription& desc,
                            const DirectRunResult& run) {
  std::filesystem::create_directories(dir);
  for (std::size_t j = 0; j < run.modules.size(); ++j) {
    auto out = open_out(dir / ("module_" + std::to_string(j) + ".csv"));
    write_module_csv(out, run.modules[j]);
  }
  auto out = open_out(dir / "summary.json");
  out << direct_summary(desc, run).dump(2) << '\n';
}

void write_networked_artifacts(const std::filesystem::path& dir, const RunDescription& desc,
                               const NetworkedRunResult& run) {
  std::filesystem::create_directories(dir);
  for (std::size_t j = 0; j < run.reference.modules.size(); ++j) {
    auto out = open_out(dir / ("module_" + std::to_string(j) + ".csv"));
    write_module_csv(out, run.reference.modules[j]);
  }
  for (std::size_t j = 0; j < run.slave_traces.size(); ++j) {
    auto out = open_out(dir / ("slave_" + std::to_string(j) + ".csv"));
    write_slave_csv(out, run.slave_traces[j]);
  }
  {
    auto out = open_out(dir / "messages.jsonl");
    write_message_log(out, run.log);
  }
  auto out = open_out(dir / "summary.json");
  out << networked_summary(desc, run).dump(2) << '\n';
}

}  // namespace modbot::sim
