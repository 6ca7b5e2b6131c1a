#include "uwbfuse/scene_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "uwbfuse/errors.hpp"

namespace uwbfuse {
namespace {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::vector<CurvePoint> parse_pairs(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ConfigError(std::string("power curve needs an array '") + key + "'");
  }
  std::vector<CurvePoint> pts;
  for (const auto& p : j.at(key)) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ConfigError(std::string(key) + ": every entry must be a [number, number] pair");
    }
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

PowerCurve curve_from_json(const json& j) {
  return PowerCurve(parse_pairs(j, "error_curve"), parse_pairs(j, "power_map"));
}

SolverConfig parse_solver(const json& j) {
  SolverConfig c;
  c.max_iterations = get_or(j, "max_iterations", c.max_iterations);
  c.gradient_tolerance = get_or(j, "gradient_tolerance", c.gradient_tolerance);
  c.step_tolerance = get_or(j, "step_tolerance", c.step_tolerance);
  c.initial_damping = get_or(j, "initial_damping", c.initial_damping);
  c.row_weights = get_or(j, "row_weights", c.row_weights);
  return c;
}

}  // namespace

PowerCurve parse_power_curve(const std::string& text) {
  return curve_from_json(parse_json(text, "power curve"));
}

PowerCurve load_power_curve(const std::filesystem::path& path) {
  try {
    return parse_power_curve(read_text(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string power_curve_to_json(const PowerCurve& curve) {
  json j;
  j["error_curve"] = json::array();
  for (const auto& p : curve.error_curve()) j["error_curve"].push_back({p.x, p.y});
  j["power_map"] = json::array();
  for (const auto& p : curve.power_map()) j["power_map"].push_back({p.x, p.y});
  return j.dump(2) + "\n";
}

Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir) {
  const json j = parse_json(text, "scene");
  if (!j.is_object()) throw ConfigError("scene must be a JSON object");

  Scene scene;
  scene.round_interval = get_or(j, "round_interval", scene.round_interval);
  scene.tag_response_delay = get_or(j, "tag_response_delay", scene.tag_response_delay);
  scene.round_spacing = get_or(j, "round_spacing", scene.round_spacing);
  scene.tx_power_dbm = get_or(j, "tx_power_dbm", scene.tx_power_dbm);

  if (j.contains("radio")) {
    const json& r = j.at("radio");
    auto& radio = scene.radio;
    radio.channel = get_or(r, "channel", radio.channel);
    radio.center_frequency_hz = get_or(r, "center_frequency_hz", radio.center_frequency_hz);
    radio.bandwidth_hz = get_or(r, "bandwidth_hz", radio.bandwidth_hz);
    radio.prf_hz = get_or(r, "prf_hz", radio.prf_hz);
    radio.preamble_length = get_or(r, "preamble_length", radio.preamble_length);
    radio.data_rate_bps = get_or(r, "data_rate_bps", radio.data_rate_bps);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    scene.noise.timestamp_jitter_sigma =
        get_or(n, "timestamp_jitter_sigma", scene.noise.timestamp_jitter_sigma);
    scene.noise.power_jitter_sigma = get_or(n, "power_jitter_sigma", scene.noise.power_jitter_sigma);
    scene.noise.frequency_jitter_sigma =
        get_or(n, "frequency_jitter_sigma", scene.noise.frequency_jitter_sigma);
    scene.noise.seed = get_or(n, "seed", scene.noise.seed);
  }

  std::map<std::string, PowerCurve> curves{{"flat", PowerCurve::flat_zero()},
                                           {"synthetic", PowerCurve::synthetic_default()}};
  if (j.contains("curves")) {
    for (const auto& [name, path] : j.at("curves").items()) {
      if (!path.is_string()) throw ConfigError("curves." + name + " must be a file path");
      curves.insert_or_assign(name, load_power_curve(base_dir / path.get<std::string>()));
    }
  }

  if (!j.contains("stations") || !j.at("stations").is_array()) {
    throw ConfigError("scene needs a 'stations' array");
  }
  for (const auto& sj : j.at("stations")) {
    Station s;
    if (!sj.contains("id") || !sj.contains("role") || !sj.contains("position")) {
      throw ConfigError("every station needs id, role and position");
    }
    s.id = get_or(sj, "id", 0);
    s.role = role_from_string(get_or<std::string>(sj, "role", ""));
    const auto pos = get_or<std::vector<double>>(sj, "position", {});
    if (pos.size() != 2 && pos.size() != 3) {
      throw ConfigError("station " + std::to_string(s.id) + ": position needs 2 or 3 values");
    }
    s.position = Eigen::Vector3d(pos[0], pos[1], pos.size() == 3 ? pos[2] : 0.0);
    s.hardware_delay = get_or(sj, "hardware_delay", 0.0);
    if (sj.contains("clock")) {
      const json& c = sj.at("clock");
      s.clock.offset = get_or(c, "offset", s.clock.offset);
      s.clock.frequency_offset = get_or(c, "frequency_offset", s.clock.frequency_offset);
      s.clock.tick = get_or(c, "tick", s.clock.tick);
    }
    const auto curve_name = get_or<std::string>(sj, "power_curve", "flat");
    auto it = curves.find(curve_name);
    if (it == curves.end()) {
      throw ConfigError("station " + std::to_string(s.id) + ": unknown power curve '" +
                        curve_name + "'");
    }
    s.power_curve = it->second;
    if (sj.contains("timestamp_jitter")) {
      scene.noise.station_timestamp_jitter[s.id] = get_or(sj, "timestamp_jitter", 0.0);
    }
    scene.stations.push_back(std::move(s));
  }
  scene.validate();
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  try {
    return parse_scene(read_text(path), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const json j = parse_json(read_text(path), path.string());
  ExperimentConfig c;
  if (!j.contains("scene")) throw ConfigError(path.string() + ": config needs a 'scene' path");
  c.scene = load_scene(path.parent_path() / get_or<std::string>(j, "scene", ""));
  c.n_rounds = get_or(j, "rounds", c.n_rounds);
  c.modes = mode_selection_from_string(get_or<std::string>(j, "mode", "both"));
  c.seed = get_or(j, "seed", c.scene.noise.seed);
  c.output_dir = get_or<std::string>(j, "out", "out");
  c.diagnostics = get_or(j, "diagnostics", c.diagnostics);
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
  return c;
}

}  // namespace uwbfuse
