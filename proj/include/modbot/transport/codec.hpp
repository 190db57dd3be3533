#pragma once

#include <string>
#include <string_view>

#include "modbot/transport/messages.hpp"

namespace modbot::transport {

/// Canonical wire form: compact JSON, fields in the order
/// module_id, seq, start_time_ms, sample_period_ms, samples, angles written
/// with exactly six fractional digits and no exponent.
std::string encode(const TrajectorySegmentMessage& msg);

/// Strict inverse of encode(). Whitespace between tokens and any field order
/// are accepted; unknown or duplicate fields, wrong sample arity, non-integer
/// counters, out-of-range angles and non-finite numbers are rejected with a
/// ParseError carrying the byte offset.
TrajectorySegmentMessage decode(std::string_view bytes);

/// Fields: module_id, last_seq_applied, buffer_depth, clock_ms.
std::string encode(const StatusMessage& msg);
StatusMessage decode_status(std::string_view bytes);

/// Angle exactly as it survives encode/decode.
double quantize_angle(double q);

/// Six-fractional-digit text of an angle, with negative zero normalized.
std::string format_angle(double q);

}  // namespace modbot::transport
