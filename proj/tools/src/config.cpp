#include "cqed/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace cqed::cli {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config: " + key + ": " + what);
}

double to_double(const std::string& key, std::string s) {
  boost::algorithm::trim(s);
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || p != end || std::isnan(v)) fail(key, "not a number: '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, std::string s) {
  boost::algorithm::trim(s);
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || p != end) fail(key, "not a nonnegative integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& key, std::string s) {
  boost::algorithm::trim(s);
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  fail(key, "not a boolean: '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) fail(key, "empty list");
  return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"protocol", {"alpha_sq", "correction", "phi_mode", "gate_mode"}},
      {"noise", {"phi_max", "t_cav", "t_atom"}},
      {"timing", {"preset", "window", "stage_gap"}},
      {"beam", {"v", "w0"}},
      {"run", {"n_traj", "seed", "workers"}},
      {"sweep", {"parameter", "values", "start", "stop", "count"}},
  };
  return s;
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

std::string_view parameter_name(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::phi_max: return "phi_max";
    case SweepParameter::t_cav: return "t_cav";
    case SweepParameter::alpha_sq: return "alpha_sq";
  }
  return "?";
}

SweepParameter parse_parameter(std::string_view name) {
  if (name == "phi_max") return SweepParameter::phi_max;
  if (name == "t_cav") return SweepParameter::t_cav;
  if (name == "alpha_sq") return SweepParameter::alpha_sq;
  throw std::invalid_argument("unknown sweep parameter '" + std::string(name) + "'");
}

std::vector<double> SweepSpec::linear(double start, double stop, std::size_t count) {
  if (count == 0) throw std::invalid_argument("sweep: count must be positive");
  if (count == 1) return {start};
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) {
    v[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  v.back() = stop;
  return v;
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep: grid is empty");
  for (double x : values) {
    const bool ok = parameter == SweepParameter::phi_max  ? finite_nonneg(x)
                    : parameter == SweepParameter::t_cav ? x > 0.0
                                                         : (x >= 0.0 && x <= 1.0);
    if (!ok) {
      throw std::invalid_argument("sweep: value out of domain for " + std::string(parameter_name(parameter)));
    }
  }
}

void RunSpec::validate() const {
  if (!(alpha_sq >= 0.0 && alpha_sq <= 1.0)) fail("alpha_sq", "must lie in [0, 1]");
  if (!finite_nonneg(phi_max)) fail("phi_max", "must be finite and >= 0");
  if (!(t_cav_ms > 0.0)) fail("t_cav", "must be > 0 (inf disables cavity decay)");
  if (!(t_atom_ms > 0.0)) fail("t_atom", "must be > 0 (inf disables atomic decay)");
  if (!(velocity > 0.0) || !std::isfinite(velocity)) fail("v", "must be > 0");
  if (!(waist_mm > 0.0) || !std::isfinite(waist_mm)) fail("w0", "must be > 0");
  if (n_traj == 0) fail("n_traj", "must be >= 1");
  if (workers == 0) fail("workers", "must be >= 1");
  timing.validate();
  sweep.validate();
}

protocol::ProtocolConfig RunSpec::point_config(double value) const {
  double a = alpha_sq, phi = phi_max, tc = t_cav_ms;
  switch (sweep.parameter) {
    case SweepParameter::phi_max: phi = value; break;
    case SweepParameter::t_cav: tc = value; break;
    case SweepParameter::alpha_sq: a = value; break;
  }
  protocol::ProtocolConfig cfg = protocol::ProtocolConfig::from_alpha_sq(a);
  cfg.correction_enabled = correction;
  cfg.noise.phi_max = phi;
  cfg.noise.phi_mode = phi_mode;
  cfg.noise.t_cav = tc * 1e-3;
  cfg.noise.t_atom = t_atom_ms * 1e-3;
  cfg.timing = timing;
  cfg.gate_mode = gate_mode;
  cfg.envelope = {velocity, waist_mm * 1e-3};
  cfg.validate();
  return cfg;
}

RunSpec parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) {
      if (!body.data().empty()) fail(section, "keys must live in a section");
      fail(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) fail(section + "." + key, "unknown key");
    }
  }

  RunSpec spec;
  auto get = [&](const char* path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '.')); };

  if (auto v = get("protocol.alpha_sq")) spec.alpha_sq = to_double("alpha_sq", *v);
  if (auto v = get("protocol.correction")) spec.correction = to_bool("correction", *v);
  if (auto v = get("protocol.phi_mode")) {
    std::string s = boost::algorithm::trim_copy(*v);
    if (s == "shared") spec.phi_mode = trajectory::PhiMode::shared;
    else if (s == "independent") spec.phi_mode = trajectory::PhiMode::independent;
    else fail("phi_mode", "expected shared or independent");
  }
  if (auto v = get("protocol.gate_mode")) {
    std::string s = boost::algorithm::trim_copy(*v);
    if (s == "instantaneous") spec.gate_mode = dynamics::PulseMode::instantaneous;
    else if (s == "envelope") spec.gate_mode = dynamics::PulseMode::envelope;
    else fail("gate_mode", "expected instantaneous or envelope");
  }
  if (auto v = get("noise.phi_max")) spec.phi_max = to_double("phi_max", *v);
  if (auto v = get("noise.t_cav")) spec.t_cav_ms = to_double("t_cav", *v);
  if (auto v = get("noise.t_atom")) spec.t_atom_ms = to_double("t_atom", *v);

  if (auto v = get("timing.preset")) {
    std::string s = boost::algorithm::trim_copy(*v);
    if (s == "compact") spec.timing = {};
    else if (s == "transit") spec.timing = protocol::ProtocolTiming::transit();
    else fail("preset", "expected compact or transit");
  }
  if (auto v = get("timing.window")) spec.timing.window = to_double("window", *v) * 1e-3;
  if (auto v = get("timing.stage_gap")) spec.timing.stage_gap = to_double("stage_gap", *v) * 1e-3;

  if (auto v = get("beam.v")) spec.velocity = to_double("v", *v);
  if (auto v = get("beam.w0")) spec.waist_mm = to_double("w0", *v);

  if (auto v = get("run.n_traj")) spec.n_traj = to_uint("n_traj", *v);
  if (auto v = get("run.seed")) spec.seed = to_uint("seed", *v);
  if (auto v = get("run.workers")) {
    const std::uint64_t w = to_uint("workers", *v);
    if (w > 4096) fail("workers", "too many workers");
    spec.workers = static_cast<unsigned>(w);
  }

  if (auto v = get("sweep.parameter")) spec.sweep.parameter = parse_parameter(boost::algorithm::trim_copy(*v));
  const auto values = get("sweep.values");
  const auto start = get("sweep.start"), stop = get("sweep.stop"), count = get("sweep.count");
  const bool linear = start || stop || count;
  if (values && linear) fail("sweep", "give either values or start/stop/count, not both");
  if (values) {
    spec.sweep.values = to_list("values", *values);
  } else if (linear) {
    if (!(start && stop && count)) fail("sweep", "start, stop and count are all required");
    spec.sweep.values =
        SweepSpec::linear(to_double("start", *start), to_double("stop", *stop), to_uint("count", *count));
  } else {
    switch (spec.sweep.parameter) {
      case SweepParameter::phi_max: spec.sweep.values = {spec.phi_max}; break;
      case SweepParameter::t_cav: spec.sweep.values = {spec.t_cav_ms}; break;
      case SweepParameter::alpha_sq: spec.sweep.values = {spec.alpha_sq}; break;
    }
  }

  spec.validate();
  return spec;
}

RunSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace cqed::cli
