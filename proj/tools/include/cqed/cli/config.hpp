#pragma once

// Run specification for the batch tool and its INI-style config reader.
//
// Sections and keys (units in brackets):
//   [protocol] alpha_sq, correction (bool), phi_mode (shared|independent),
//              gate_mode (instantaneous|envelope)
//   [noise]    phi_max [rad], t_cav [ms], t_atom [ms]; "inf" switches decay off
//   [timing]   preset (compact|transit), window [ms], stage_gap [ms]
//   [beam]     v [m/s], w0 [mm]
//   [run]      n_traj, seed, workers
//   [sweep]    parameter (phi_max|t_cav|alpha_sq), values = a, b, c
//              or start, stop, count

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/protocol.hpp"

namespace cqed::cli {

enum class SweepParameter { phi_max, t_cav, alpha_sq };

std::string_view parameter_name(SweepParameter p) noexcept;
SweepParameter parse_parameter(std::string_view name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::phi_max;
  std::vector<double> values;  // in config units (rad, ms, dimensionless)

  static std::vector<double> linear(double start, double stop, std::size_t count);
  void validate() const;
};

struct RunSpec {
  double alpha_sq = 0.7;
  double phi_max = 0.0;           // rad
  double t_cav_ms = 100.0;        // ms
  double t_atom_ms = 30.0;        // ms
  bool correction = true;
  trajectory::PhiMode phi_mode = trajectory::PhiMode::shared;
  dynamics::PulseMode gate_mode = dynamics::PulseMode::instantaneous;
  protocol::ProtocolTiming timing{};
  double velocity = 500.0;        // m/s
  double waist_mm = 6.0;          // mm
  std::size_t n_traj = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  SweepSpec sweep{SweepParameter::phi_max, {0.0}};

  /// Protocol configuration for one sweep value.
  protocol::ProtocolConfig point_config(double value) const;
  void validate() const;
};

/// Parses and validates a config; missing keys keep their defaults.
/// Throws std::invalid_argument on unknown sections or keys, malformed
/// numbers and out-of-domain values.
RunSpec parse_config(std::string_view text);
RunSpec load_config(const std::string& path);

}  // namespace cqed::cli
