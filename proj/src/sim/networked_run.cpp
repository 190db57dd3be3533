#include "modbot/sim/networked_run.hpp"

#include <climits>
#include <cmath>
#include <memory>

#include "modbot/common/angles.hpp"
#include "modbot/common/errors.hpp"
#include "modbot/transport/codec.hpp"

namespace modbot::sim {

namespace {

// Tie-break keys on the event queue: master first, slave timers after any
// delivery at the same instant, read-only probes last.
constexpr int kMasterKey = -1;
constexpr std::int64_t kTimerSeq = LLONG_MAX - 1;
constexpr int kProbeKey = INT_MAX;

std::int64_t to_us(double seconds, const char* what) {
  const double us = seconds * 1e6;
  const auto rounded = std::llround(us);
  if (std::abs(us - static_cast<double>(rounded)) > 1e-6) {
    throw InvalidParameter(std::string(what) + " must be a whole number of microseconds");
  }
  return rounded;
}

double max_second_difference(const DirectRunResult& ref) {
  double best = 0.0;
  const double inv_dt2 = 1.0 / (ref.dt * ref.dt);
  for (const auto& tr : ref.modules) {
    for (std::size_t k = 1; k + 1 < tr.q.size(); ++k) {
      const Eigen::VectorXd d2 = (tr.q[k + 1] - 2.0 * tr.q[k] + tr.q[k - 1]) * inv_dt2;
      best = std::max(best, d2.cwiseAbs().maxCoeff());
    }
  }
  return best;
}

}  // namespace

bool seq_gap_free(const std::vector<runtime::SlaveTraceRow>& rows, std::int64_t from_ms) {
  std::int64_t prev = -1;
  for (const auto& row : rows) {
    if (row.t_ms < from_ms || row.seq_active < 0) continue;
    if (prev >= 0 && row.seq_active != prev && row.seq_active != prev + 1) return false;
    prev = row.seq_active;
  }
  return true;
}

NetworkedRunResult run_networked(const hierarchy::HierarchicalSystem& system,
                                 const NetworkedRunOptions& options) {
  options.channel.validate();
  if (options.timer_period_ms <= 0 || options.status_period_ms <= 0) {
    throw InvalidParameter("timer and status periods must be > 0 ms");
  }

  NetworkedRunResult res;
  res.reference = run_direct(system, options.base);

  const int m = system.modules();
  const std::int64_t dt_us = to_us(options.base.dt, "dt");
  const std::int64_t horizon_us = options.horizon_ms * 1000;
  const std::int64_t duration_ms = std::llround(options.base.duration * 1000.0);
  const std::int64_t duration_us = duration_ms * 1000;

  transport::MasterConfig mcfg{options.horizon_ms, options.sample_period_ms, options.base.dt};
  transport::Master master(system, res.reference.initial_state, mcfg);

  transport::EventQueue events;
  transport::Channel channel(options.channel);
  transport::Bus bus(events, channel);
  bus.attach_bridge(options.bridge);

  std::vector<std::unique_ptr<runtime::Slave>> slaves;
  for (int j = 0; j < m; ++j) {
    runtime::SlaveConfig scfg;
    scfg.module_id = j;
    scfg.timer_period_ms = options.timer_period_ms;
    scfg.capacity = options.capacity;
    slaves.push_back(std::make_unique<runtime::Slave>(scfg));
    runtime::Slave* slave = slaves.back().get();
    bus.subscribe(transport::trajectory_topic(j), [slave, &events](std::string_view payload) {
      slave->on_payload(payload, static_cast<double>(events.now_us()) / 1000.0);
    });
    bus.subscribe(transport::status_topic(j), [&master](std::string_view payload) {
      try {
        master.on_status(transport::decode_status(payload));
      } catch (const ParseError&) {
      }
    });
  }

  for (std::int64_t t = 0; t + options.horizon_ms <= duration_ms; t += options.horizon_ms) {
    events.schedule(t * 1000, kMasterKey, t / options.horizon_ms, [&, t] {
      for (auto& msg : master.tick(t)) {
        const int id = msg.module_id;
        const std::int64_t seq = msg.seq;
        bus.publish(transport::trajectory_topic(id), transport::encode(msg), id, seq);
        ++res.segments_sent;
      }
    });
  }

  std::vector<std::int64_t> status_seq(m, 0);
  for (int j = 0; j < m; ++j) {
    for (std::int64_t t = 0; t < duration_ms; t += options.timer_period_ms) {
      events.schedule(t * 1000, j, kTimerSeq, [&, j, t] {
        slaves[j]->on_timer(t);
        if (t % options.status_period_ms == 0) {
          bus.publish(transport::status_topic(j), transport::encode(slaves[j]->status(t)), j,
                      status_seq[j]++);
        }
      });
    }
  }

  auto& interp = res.interpolation;
  auto& rec = res.recovery;
  rec.applicable = options.channel.loss_until_ms.has_value();
  if (rec.applicable) {
    rec.recovered_from_ms =
        *options.channel.loss_until_ms + 2.0 * static_cast<double>(options.horizon_ms);
  }
  for (std::int64_t t_us = horizon_us; t_us < duration_us; t_us += dt_us) {
    const auto ref_index = static_cast<std::size_t>((t_us - horizon_us) / dt_us);
    if ((t_us - horizon_us) % dt_us != 0 || ref_index >= res.reference.modules.front().q.size()) {
      continue;
    }
    events.schedule(t_us, kProbeKey, 0, [&, t_us, ref_index] {
      const double t_ms = static_cast<double>(t_us) / 1000.0;
      const bool after_recovery = rec.applicable && t_ms >= rec.recovered_from_ms;
      for (int j = 0; j < m; ++j) {
        const auto s = slaves[j]->buffer().peek(t_ms);
        ++interp.probes;
        if (after_recovery) ++rec.probes;
        if (s.held) {
          ++interp.held_probes;
          if (after_recovery) ++rec.held_probes;
          continue;
        }
        const Eigen::VectorXd& ref = res.reference.modules[j].q[ref_index];
        double err = 0.0;
        for (int k = 0; k < transport::kJoints; ++k) err = std::max(err, std::abs(s.q[k] - ref[k]));
        interp.max_error = std::max(interp.max_error, err);
        if (after_recovery) rec.max_error = std::max(rec.max_error, err);
      }
    });
  }

  events.run_until(duration_us);

  interp.max_qddot = max_second_difference(res.reference);
  const double spacing_s = static_cast<double>(options.sample_period_ms) * 1e-3;
  interp.bound = spacing_s * spacing_s / 8.0 * interp.max_qddot;

  res.log = bus.log();
  res.messages_sent = channel.sent();
  res.messages_dropped = channel.dropped();
  res.messages_delivered = bus.delivered();
  res.status_received = master.status_received();
  res.master_clamps = master.clamped_samples();
  for (const auto& slave : slaves) {
    const auto& buf = slave->buffer();
    res.stale_dropped += buf.stale_dropped();
    res.overflow_dropped += buf.overflow_dropped();
    res.duplicates += buf.duplicates();
    res.malformed += slave->malformed();
    res.holds += slave->holds();
    res.gap_free.push_back(seq_gap_free(slave->trace()));
    if (rec.applicable) {
      rec.gap_free = rec.gap_free &&
                     seq_gap_free(slave->trace(), std::llround(rec.recovered_from_ms));
    }
    for (const auto& row : slave->trace()) {
      for (int k = 0; k < transport::kJoints; ++k) {
        if (row.command.pulse_us[k] < runtime::kPulseMinUs ||
            row.command.pulse_us[k] > runtime::kPulseMaxUs) {
          ++res.out_of_range_pulses;
        }
        if (!(std::abs(row.q[k]) <= kJointLimit + 1e-6)) ++res.out_of_range_angles;
      }
    }
    res.slave_traces.push_back(slave->trace());
  }
  return res;
}

}  // namespace modbot::sim
