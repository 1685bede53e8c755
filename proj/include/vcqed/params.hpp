#pragma once

// Model parameters. All rates, couplings and detunings are in units of the
// decay rate gamma2 of level c.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vcqed/error.hpp"

namespace vcqed {

enum class Frame { cavity_frame, laser_frame };

inline std::string to_string(Frame f) { return f == Frame::cavity_frame ? "cavity_frame" : "laser_frame"; }

inline Frame parse_frame(std::string_view s) {
  if (s == "cavity_frame" || s == "cavity") return Frame::cavity_frame;
  if (s == "laser_frame" || s == "laser") return Frame::laser_frame;
  throw Error(ErrorKind::Config, "unknown frame '" + std::string(s) + "'");
}

struct ModelParams {
  double g1 = 10.0;
  double g2 = 10.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double eta_ic1 = 2.0;
  double eta_ic2 = 2.0;
  double eta_c1 = 0.0;
  double eta_c2 = 0.0;
  double delta1 = 0.0;   // cavity 1 minus atomic b transition
  double delta2 = 0.0;   // cavity 2 minus atomic c transition
  double delta1L = 0.0;  // cavity 1 minus laser 1
  double delta2L = 0.0;  // cavity 2 minus laser 2
  Frame frame = Frame::cavity_frame;
  int fock_states_1 = 6;
  int fock_states_2 = 6;

  /// Atom-laser detunings; derived, never stored.
  double Delta_b() const noexcept { return delta1L - delta1; }
  double Delta_c() const noexcept { return delta2L - delta2; }

  bool has_drive() const noexcept { return eta_c1 != 0.0 || eta_c2 != 0.0; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

namespace detail {
struct RealField {
  const char* name;
  double ModelParams::*member;
};

inline constexpr std::array<RealField, 14> kRealFields{{
    {"g1", &ModelParams::g1},
    {"g2", &ModelParams::g2},
    {"gamma1", &ModelParams::gamma1},
    {"gamma2", &ModelParams::gamma2},
    {"kappa1", &ModelParams::kappa1},
    {"kappa2", &ModelParams::kappa2},
    {"eta_ic1", &ModelParams::eta_ic1},
    {"eta_ic2", &ModelParams::eta_ic2},
    {"eta_c1", &ModelParams::eta_c1},
    {"eta_c2", &ModelParams::eta_c2},
    {"delta1", &ModelParams::delta1},
    {"delta2", &ModelParams::delta2},
    {"delta1L", &ModelParams::delta1L},
    {"delta2L", &ModelParams::delta2L},
}};

inline double parse_number(std::string_view key, std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorKind::Config, "value '" + s + "' for key '" + std::string(key) + "' is not a number");
  }
  return v;
}
}  // namespace detail

/// Names of every real-valued parameter, in canonical order.
inline std::vector<std::string> real_param_names() {
  std::vector<std::string> names;
  for (const auto& f : detail::kRealFields) names.emplace_back(f.name);
  return names;
}

inline bool is_real_param(std::string_view name) {
  for (const auto& f : detail::kRealFields)
    if (name == f.name) return true;
  return false;
}

inline double get_param(const ModelParams& p, std::string_view name) {
  for (const auto& f : detail::kRealFields)
    if (name == f.name) return p.*(f.member);
  if (name == "fock_states_1") return p.fock_states_1;
  if (name == "fock_states_2") return p.fock_states_2;
  throw Error(ErrorKind::Config, "unknown parameter '" + std::string(name) + "'");
}

/// Sets a parameter by name. The shorthand keys g, kappa, gamma, eta_ic,
/// eta_c, delta, deltaL and fock_states set both modes at once.
inline void set_param(ModelParams& p, std::string_view name, double value) {
  for (const auto& f : detail::kRealFields) {
    if (name == f.name) {
      p.*(f.member) = value;
      return;
    }
  }
  auto both = [&](double ModelParams::*m1, double ModelParams::*m2) {
    p.*m1 = value;
    p.*m2 = value;
  };
  if (name == "g") return both(&ModelParams::g1, &ModelParams::g2);
  if (name == "kappa") return both(&ModelParams::kappa1, &ModelParams::kappa2);
  if (name == "gamma") return both(&ModelParams::gamma1, &ModelParams::gamma2);
  if (name == "eta_ic") return both(&ModelParams::eta_ic1, &ModelParams::eta_ic2);
  if (name == "eta_c") return both(&ModelParams::eta_c1, &ModelParams::eta_c2);
  if (name == "delta") return both(&ModelParams::delta1, &ModelParams::delta2);
  if (name == "deltaL") return both(&ModelParams::delta1L, &ModelParams::delta2L);
  auto as_count = [&](int& target) {
    if (value != std::floor(value)) {
      throw Error(ErrorKind::Config, "'" + std::string(name) + "' must be an integer");
    }
    target = static_cast<int>(value);
  };
  if (name == "fock_states_1") return as_count(p.fock_states_1);
  if (name == "fock_states_2") return as_count(p.fock_states_2);
  if (name == "fock_states") {
    as_count(p.fock_states_1);
    p.fock_states_2 = p.fock_states_1;
    return;
  }
  throw Error(ErrorKind::Config, "unknown parameter '" + std::string(name) + "'");
}

inline bool is_settable_param(std::string_view name) {
  if (is_real_param(name)) return true;
  for (auto s : {"g", "kappa", "gamma", "eta_ic", "eta_c", "delta", "deltaL", "fock_states", "fock_states_1",
                 "fock_states_2"})
    if (name == s) return true;
  return false;
}

/// Applies a "key=value" override. The key "frame" takes a frame name.
inline void apply_override(ModelParams& p, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorKind::Config, "override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string_view key = assignment.substr(0, eq);
  const std::string_view value = assignment.substr(eq + 1);
  if (key == "frame") {
    p.frame = parse_frame(value);
    return;
  }
  set_param(p, key, detail::parse_number(key, value));
}

/// Throws a config error on negative rates, missing truncation, or a coherent
/// drive in the cavity frame.
inline void validate(const ModelParams& p) {
  for (const auto& f : detail::kRealFields) {
    if (!std::isfinite(p.*(f.member))) {
      throw Error(ErrorKind::Config, std::string("parameter '") + f.name + "' is not finite");
    }
  }
  const std::pair<const char*, double> rates[] = {{"gamma1", p.gamma1},   {"gamma2", p.gamma2},
                                                  {"kappa1", p.kappa1},   {"kappa2", p.kappa2},
                                                  {"eta_ic1", p.eta_ic1}, {"eta_ic2", p.eta_ic2}};
  for (const auto& [name, v] : rates) {
    if (v < 0.0) throw Error(ErrorKind::Config, std::string("rate '") + name + "' must be non-negative");
  }
  if (p.fock_states_1 < 1 || p.fock_states_2 < 1) {
    throw Error(ErrorKind::InvalidTruncation, "need at least one Fock state per mode");
  }
  if (p.frame == Frame::cavity_frame && p.has_drive()) {
    throw Error(ErrorKind::Config, "coherent drives require frame = laser_frame");
  }
}

inline nlohmann::ordered_json to_json(const ModelParams& p) {
  nlohmann::ordered_json j;
  for (const auto& f : detail::kRealFields) j[f.name] = p.*(f.member);
  j["frame"] = to_string(p.frame);
  j["fock_states_1"] = p.fock_states_1;
  j["fock_states_2"] = p.fock_states_2;
  return j;
}

/// Reads flat keys from a JSON object; unknown keys are an error unless
/// listed in `ignored`.
inline void merge_json(ModelParams& p, const nlohmann::json& j, const std::vector<std::string>& ignored = {}) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "parameter record must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(ignored.begin(), ignored.end(), key) != ignored.end()) continue;
    if (key == "frame") {
      if (!value.is_string()) throw Error(ErrorKind::Config, "frame must be a string");
      p.frame = parse_frame(value.get<std::string>());
    } else if (is_settable_param(key)) {
      if (!value.is_number()) throw Error(ErrorKind::Config, "value for '" + key + "' must be a number");
      set_param(p, key, value.get<double>());
    } else {
      throw Error(ErrorKind::Config, "unknown configuration key '" + key + "'");
    }
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open configuration file '" + path + "'");
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, "malformed configuration '" + path + "': " + e.what());
  }
}

/// One-line "key=value;..." record used in CSV provenance headers.
inline std::string param_record(const ModelParams& p) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& f : detail::kRealFields) {
    if (!first) os << ';';
    first = false;
    os << f.name << '=' << p.*(f.member);
  }
  os << ";frame=" << to_string(p.frame) << ";fock_states_1=" << p.fock_states_1
     << ";fock_states_2=" << p.fock_states_2;
  return os.str();
}

/// Exchanges every mode-1 parameter with its mode-2 counterpart.
inline ModelParams swap_modes(ModelParams p) {
  std::swap(p.g1, p.g2);
  std::swap(p.gamma1, p.gamma2);
  std::swap(p.kappa1, p.kappa2);
  std::swap(p.eta_ic1, p.eta_ic2);
  std::swap(p.eta_c1, p.eta_c2);
  std::swap(p.delta1, p.delta2);
  std::swap(p.delta1L, p.delta2L);
  std::swap(p.fock_states_1, p.fock_states_2);
  return p;
}

}  // namespace vcqed
