#include "dfvo/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dfvo/errors.hpp"

namespace dfvo {
namespace {

std::string trim(const std::string& s) {
  const size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Typed accessor over the parsed map that records which keys were
// consumed, so leftovers can be rejected as unknown.
class KeyReader {
 public:
  KeyReader(std::map<std::string, std::string> values, std::string source)
      : values_(std::move(values)), source_(std::move(source)) {}

  template <typename T, typename Parse>
  void get(const std::string& key, T& out, Parse parse) {
    auto it = values_.find(key);
    if (it == values_.end()) return;
    try {
      out = parse(it->second);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidConfig, source_ + ": bad value '" + it->second + "' for key '" + key + "'");
    }
    values_.erase(it);
  }

  void get_double(const std::string& key, double& out) {
    get(key, out, [](const std::string& v) { return std::stod(v); });
  }
  void get_int(const std::string& key, int& out) {
    get(key, out, [](const std::string& v) { return std::stoi(v); });
  }
  void get_u64(const std::string& key, uint64_t& out) {
    get(key, out, [](const std::string& v) { return std::stoull(v); });
  }

  void finish() const {
    if (!values_.empty()) {
      fail(ErrorCode::UnknownKey, source_ + ": unknown key '" + values_.begin()->first + "'");
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

}  // namespace

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::InvalidConfig, path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      fail(ErrorCode::InvalidConfig, path.string() + ":" + std::to_string(line_no) + ": empty key or value");
    }
    if (!values.emplace(key, value).second) {
      fail(ErrorCode::InvalidConfig, path.string() + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return values;
}

TrackerConfig tracker_config_from_file(const std::filesystem::path& path) {
  KeyReader reader(read_key_value_file(path), path.string());
  TrackerConfig config;
  reader.get_double("delta_f", config.delta_f);
  reader.get_int("top_n", config.top_n);
  reader.get_double("cheirality_margin", config.cheirality_margin);
  reader.get_int("border_px", config.border_px);
  reader.get_u64("rng_seed", config.rng_seed);
  reader.get("selection", config.selection, [&](const std::string& v) {
    if (v == "global") return SelectionMode::kGlobal;
    if (v == "grid") return SelectionMode::kGrid;
    fail(ErrorCode::InvalidConfig, path.string() + ": selection must be 'global' or 'grid'");
  });
  reader.get("flow_gate", config.flow_gate, [&](const std::string& v) {
    if (v == "field") return FlowGateMode::kWholeField;
    if (v == "matches") return FlowGateMode::kMatchesOnly;
    fail(ErrorCode::InvalidConfig, path.string() + ": flow_gate must be 'field' or 'matches'");
  });
  reader.get_double("essential.threshold", config.essential.threshold);
  reader.get_int("essential.max_iters", config.essential.max_iters);
  reader.get_double("essential.confidence", config.essential.confidence);
  reader.get_double("pnp.px_threshold", config.pnp.px_threshold);
  reader.get_int("pnp.max_iters", config.pnp.max_iters);
  reader.get_double("pnp.confidence", config.pnp.confidence);
  reader.get_double("scale.rel_tol", config.scale.rel_tol);
  reader.get_double("scale.min_inlier_frac", config.scale.min_inlier_frac);
  reader.get_int("scale.max_iters", config.scale.max_iters);
  reader.get_double("depth_min", config.scale.depth_min);
  reader.get_double("depth_max", config.scale.depth_max);
  reader.finish();
  config.validate();
  return config;
}

SceneConfig scene_config_from_file(const std::filesystem::path& path) {
  KeyReader reader(read_key_value_file(path), path.string());
  SceneConfig config;
  reader.get("profile", config.profile,
             [](const std::string& v) { return motion_profile_from_string(v); });
  reader.get_int("n_frames", config.n_frames);
  reader.get_double("step_m", config.step_m);
  reader.get_double("yaw_deg_per_frame", config.yaw_deg_per_frame);
  reader.get_int("image_width", config.image_width);
  reader.get_int("image_height", config.image_height);
  reader.get_double("fx", config.fx);
  reader.get_double("fy", config.fy);
  reader.get_double("cx", config.cx);
  reader.get_double("cy", config.cy);
  reader.get_u64("rng_seed", config.rng_seed);
  reader.get_int("n_panels", config.n_panels);
  reader.get_double("room_half_width_m", config.room_half_width_m);
  reader.get_double("cylinder_radius_m", config.cylinder_radius_m);
  reader.get_double("flow_noise_px", config.flow_noise_px);
  reader.get_double("depth_noise_rel", config.depth_noise_rel);
  reader.get_double("outlier_fraction", config.outlier_fraction);
  reader.get_double("outlier_mag_px", config.outlier_mag_px);
  reader.finish();
  config.validate();
  return config;
}

}  // namespace dfvo
