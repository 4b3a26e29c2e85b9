#pragma once
// Line-oriented "key = value" configuration with [section] headers.  Unknown
// keys are errors (reported with their line number); no silent defaults for
// misspellings.

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "measures.hpp"

namespace longjump {

#define LONGJUMP_VERSION "0.1.0"

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TimeScale { alpha_power, log_corrected };

struct ExperimentConfig {
  // [experiment]
  std::string name;
  std::string model = "zero_range";  // exclusion | zero_range
  std::vector<int> scales = {128};
  double T = 0.05;
  int replicas = 1;
  std::uint64_t seed = 1;
  int block_divisor = 64;  // block half-width l = N / block_divisor
  TimeScale time_scale = TimeScale::alpha_power;
  double rho = 1.0;
  double rho_lo = 0.0, rho_hi = 0.0;
  std::vector<double> theta_grid;
  long long events = 1000000;
  std::string out;

  // [kernel]
  int dim = 1;
  double alpha = 1.0;
  double c_scale = 1.0;
  int fold_cutoff = 64;
  std::vector<double> angular;

  // [rate]
  std::string rate_kind = "linear";  // linear | indicator | capped
  int cap_level = 5;

  // [profile]
  std::string profile_kind = "constant";  // constant | step | cosine
  double profile_a = 1.0, profile_b = 0.0, profile_x0 = 0.0, profile_x1 = 0.0;
  int profile_mode = 1;

  KernelSpec kernel_spec() const {
    KernelSpec s;
    s.dim = dim;
    s.alpha = alpha;
    s.c_scale = c_scale;
    s.angular = angular;
    return s;
  }

  RateFunction rate_function() const {
    if (rate_kind == "linear") return RateFunction::linear();
    if (rate_kind == "indicator") return RateFunction::indicator();
    if (rate_kind == "capped") return RateFunction::capped(cap_level);
    throw ConfigError("unknown rate kind: " + rate_kind);
  }

  Profile profile() const {
    if (profile_kind == "constant") return Profile::constant(profile_a);
    if (profile_kind == "step")
      return Profile::step(profile_a, profile_b, profile_x0, profile_x1);
    if (profile_kind == "cosine")
      return Profile::cosine(profile_a, profile_b, profile_mode);
    throw ConfigError("unknown profile kind: " + profile_kind);
  }

  double theta_for(int N) const {
    return time_scale_theta_value(static_cast<double>(N));
  }

  double time_scale_theta_value(double n) const {
    if (time_scale == TimeScale::log_corrected) return n * n / std::log(n);
    return std::pow(n, alpha);
  }

  std::string serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "[experiment]\n";
    os << "name = " << name << "\n";
    os << "model = " << model << "\n";
    os << "scales = " << join_ints(scales) << "\n";
    os << "T = " << T << "\n";
    os << "replicas = " << replicas << "\n";
    os << "seed = " << seed << "\n";
    os << "block_divisor = " << block_divisor << "\n";
    os << "time_scale = "
       << (time_scale == TimeScale::log_corrected ? "log_corrected" : "alpha") << "\n";
    os << "rho = " << rho << "\n";
    os << "rho_lo = " << rho_lo << "\n";
    os << "rho_hi = " << rho_hi << "\n";
    if (!theta_grid.empty()) os << "theta_grid = " << join_doubles(theta_grid) << "\n";
    os << "events = " << events << "\n";
    if (!out.empty()) os << "out = " << out << "\n";
    os << "[kernel]\n";
    os << "dim = " << dim << "\n";
    os << "alpha = " << alpha << "\n";
    os << "c_scale = " << c_scale << "\n";
    os << "fold_cutoff = " << fold_cutoff << "\n";
    if (!angular.empty()) os << "angular = " << join_doubles(angular) << "\n";
    os << "[rate]\n";
    os << "kind = " << rate_kind << "\n";
    os << "cap_level = " << cap_level << "\n";
    os << "[profile]\n";
    os << "kind = " << profile_kind << "\n";
    os << "a = " << profile_a << "\n";
    os << "b = " << profile_b << "\n";
    os << "x0 = " << profile_x0 << "\n";
    os << "x1 = " << profile_x1 << "\n";
    os << "mode = " << profile_mode << "\n";
    return os.str();
  }

  std::uint64_t hash() const {
    // FNV-1a over the canonical serialization
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : serialize()) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  static std::string join_ints(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
  }
  static std::string join_doubles(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
  }
};

namespace detail_cfg {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

inline double to_double(const std::string& v, int line) {
  try {
    std::size_t pos;
    double d = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "not a number: '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line, "not a number: '" + v + "'");
  }
}

inline long long to_int(const std::string& v, int line) {
  try {
    std::size_t pos;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) fail(line, "not an integer: '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line, "not an integer: '" + v + "'");
  }
}

}  // namespace detail_cfg

inline ExperimentConfig parse_config(const std::string& text) {
  using namespace detail_cfg;
  ExperimentConfig cfg;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::set<std::string> seen;
  bool have_name = false;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "experiment" && section != "kernel" && section != "rate" &&
          section != "profile")
        fail(line, "unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (section.empty()) fail(line, "key outside any section");
    std::string full = section + "." + key;
    if (!seen.insert(full).second) fail(line, "duplicate key '" + full + "'");

    if (section == "experiment") {
      if (key == "name") { cfg.name = val; have_name = true; }
      else if (key == "model") {
        if (val != "exclusion" && val != "zero_range")
          fail(line, "model must be exclusion or zero_range");
        cfg.model = val;
      } else if (key == "scales") {
        cfg.scales.clear();
        for (auto& p : split(val, ',')) cfg.scales.push_back(static_cast<int>(to_int(p, line)));
        for (std::size_t i = 1; i < cfg.scales.size(); ++i)
          if (cfg.scales[i] <= cfg.scales[i - 1])
            fail(line, "scales must be strictly increasing");
      } else if (key == "T") cfg.T = to_double(val, line);
      else if (key == "replicas") {
        cfg.replicas = static_cast<int>(to_int(val, line));
        if (cfg.replicas < 1) fail(line, "replicas must be >= 1");
      } else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(val, line));
      else if (key == "block_divisor") cfg.block_divisor = static_cast<int>(to_int(val, line));
      else if (key == "time_scale") {
        if (val == "alpha") cfg.time_scale = TimeScale::alpha_power;
        else if (val == "log_corrected") cfg.time_scale = TimeScale::log_corrected;
        else fail(line, "time_scale must be alpha or log_corrected");
      } else if (key == "rho") cfg.rho = to_double(val, line);
      else if (key == "rho_lo") cfg.rho_lo = to_double(val, line);
      else if (key == "rho_hi") cfg.rho_hi = to_double(val, line);
      else if (key == "theta_grid") {
        cfg.theta_grid.clear();
        for (auto& p : split(val, ',')) cfg.theta_grid.push_back(to_double(p, line));
      } else if (key == "events") cfg.events = to_int(val, line);
      else if (key == "out") cfg.out = val;
      else fail(line, "unknown key '" + key + "' in [experiment]");
    } else if (section == "kernel") {
      if (key == "dim") cfg.dim = static_cast<int>(to_int(val, line));
      else if (key == "alpha") cfg.alpha = to_double(val, line);
      else if (key == "c_scale") cfg.c_scale = to_double(val, line);
      else if (key == "fold_cutoff") cfg.fold_cutoff = static_cast<int>(to_int(val, line));
      else if (key == "angular") {
        cfg.angular.clear();
        for (auto& p : split(val, ',')) cfg.angular.push_back(to_double(p, line));
      } else fail(line, "unknown key '" + key + "' in [kernel]");
    } else if (section == "rate") {
      if (key == "kind") {
        if (val != "linear" && val != "indicator" && val != "capped")
          fail(line, "rate kind must be linear, indicator, or capped");
        cfg.rate_kind = val;
      } else if (key == "cap_level") cfg.cap_level = static_cast<int>(to_int(val, line));
      else fail(line, "unknown key '" + key + "' in [rate]");
    } else if (section == "profile") {
      if (key == "kind") {
        if (val != "constant" && val != "step" && val != "cosine")
          fail(line, "profile kind must be constant, step, or cosine");
        cfg.profile_kind = val;
      } else if (key == "a") cfg.profile_a = to_double(val, line);
      else if (key == "b") cfg.profile_b = to_double(val, line);
      else if (key == "x0") cfg.profile_x0 = to_double(val, line);
      else if (key == "x1") cfg.profile_x1 = to_double(val, line);
      else if (key == "mode") cfg.profile_mode = static_cast<int>(to_int(val, line));
      else fail(line, "unknown key '" + key + "' in [profile]");
    }
  }
  if (!have_name) throw ConfigError("config: missing required key experiment.name");
  // cross-field rule: the alpha=2 borderline runs only with the log-corrected
  // time scale, and vice versa
  if (cfg.alpha == 2.0 && cfg.time_scale != TimeScale::log_corrected)
    throw ConfigError("config: alpha = 2 requires time_scale = log_corrected");
  if (cfg.time_scale == TimeScale::log_corrected && cfg.alpha != 2.0)
    throw ConfigError("config: time_scale = log_corrected requires alpha = 2");
  return cfg;
}

}  // namespace longjump
