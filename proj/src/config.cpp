#include "geodesy/config.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "geodesy/error.hpp"

namespace geodesy {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    invalid_input("config key " + key + ": expected a number, got '" + v + "'");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    invalid_input("config key " + key + ": expected an integer, got '" + v + "'");
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < 0) invalid_input("config key " + key + " must be nonnegative");
  return static_cast<std::size_t>(x);
}

std::vector<std::string> items(const std::string& v) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream ss(v);
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  invalid_input("config key " + key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) invalid_input("config line " + std::to_string(line_no) + " has no '='");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) invalid_input("config line " + std::to_string(line_no) + " has an empty key");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid_input("cannot open config " + path);
  return read_key_values(in);
}

KeyValues merge(KeyValues low, const KeyValues& high) {
  for (const auto& [k, v] : high) low[k] = v;
  return low;
}

ExperimentConfig experiment_config(const KeyValues& values, ExperimentConfig cfg) {
  for (const auto& [key, v] : values) {
    if (key == "surface") {
      cfg.surface = parse_surface(v);
    } else if (key == "mode") {
      cfg.mode = parse_sampling_mode(v);
    } else if (key == "sizes") {
      cfg.sample_sizes.clear();
      for (const auto& s : items(v)) cfg.sample_sizes.push_back(to_count(key, s));
    } else if (key == "radii") {
      cfg.radii.clear();
      for (const auto& s : items(v)) cfg.radii.push_back(to_real(key, s));
    } else if (key == "repeats") {
      cfg.repeats = static_cast<int>(to_integer(key, v));
    } else if (key == "pairs") {
      cfg.pair_subsample = to_count(key, v);
    } else if (key == "landmarks") {
      cfg.landmarks = to_count(key, v);
    } else if (key == "landmark_margin") {
      cfg.landmark_margin = to_real(key, v);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_count(key, v));
    } else if (key == "output") {
      cfg.output_dir = v;
    } else if (key == "tangent_scale") {
      cfg.mesh.tangent_scale = to_real(key, v);
    } else if (key == "net_scale") {
      cfg.mesh.net_scale = to_real(key, v);
    } else if (key == "max_edge_scale") {
      cfg.mesh.max_edge_scale = to_real(key, v);
    } else if (key == "perturb_radius") {
      cfg.mesh.perturb_radius = to_real(key, v);
    } else if (key == "repair_rounds") {
      cfg.mesh.repair_rounds = static_cast<int>(to_integer(key, v));
    } else if (key == "mesh_seed") {
      cfg.mesh.seed = static_cast<std::uint64_t>(to_count(key, v));
    } else if (key == "timing") {
      cfg.record_timing = to_bool(key, v);
    } else {
      invalid_input("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace geodesy
