#include "rscorrect/tools/manifest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "rscorrect/error.hpp"

namespace rscorrect::tools {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("invalid number for " + what + ": '" + s + "'");
  }
  return v;
}

template <typename Int = long long>
Int to_int(const std::string& s, const std::string& what) {
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("invalid integer for " + what + ": '" + s + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json files_json(const std::vector<FileRecord>& files) {
  json a = json::array();
  for (const auto& f : files) a.push_back({{"name", f.name}, {"sha256", f.sha256}});
  return a;
}

std::vector<FileRecord> files_from(const json& a) {
  std::vector<FileRecord> out;
  for (const auto& f : a) out.push_back({f.at("name").get<std::string>(), f.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

json to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["toolkit_version"] = m.toolkit_version;
  if (m.scan) {
    j["scan"] = {{"height", m.scan->height},
                 {"width", m.scan->width},
                 {"tau", m.scan->tau},
                 {"t_mid", m.scan->t_mid}};
  }
  if (m.scene) j["scene"] = *m.scene;
  j["inputs"] = files_json(m.inputs);
  j["targets"] = m.targets;
  if (m.mid_row) j["mid_row"] = *m.mid_row;
  j["flow"] = {{"pyramid_factor", m.flow.pyramid_factor},
               {"min_level_size", m.flow.min_level_size},
               {"warp_iterations", m.flow.warp_iterations},
               {"smoothness", m.flow.smoothness},
               {"epsilon", m.flow.epsilon},
               {"median_radius", m.flow.median_radius}};
  if (m.correction) {
    json c = {{"fixed_point_iters", m.correction->fixed_point_iters},
              {"mask_eps", m.correction->mask_eps},
              {"injected_flow", m.correction->injected_flow}};
    if (m.correction->delta_t_floor) c["delta_t_floor"] = *m.correction->delta_t_floor;
    j["correction"] = c;
  }
  j["output_dir"] = m.output_dir;
  j["outputs"] = files_json(m.outputs);
  j["results"] = m.results;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    if (j.contains("scan")) {
      const json& s = j["scan"];
      m.scan = ScanRecord{s.at("height").get<int>(), s.at("width").get<int>(),
                          s.at("tau").get<double>(), s.at("t_mid").get<double>()};
    }
    if (j.contains("scene")) m.scene = j["scene"].get<std::string>();
    m.inputs = files_from(j.at("inputs"));
    m.targets = j.at("targets").get<std::vector<int>>();
    if (j.contains("mid_row")) m.mid_row = j["mid_row"].get<int>();
    const json& f = j.at("flow");
    m.flow.pyramid_factor = f.at("pyramid_factor").get<double>();
    m.flow.min_level_size = f.at("min_level_size").get<int>();
    m.flow.warp_iterations = f.at("warp_iterations").get<int>();
    m.flow.smoothness = f.at("smoothness").get<double>();
    m.flow.epsilon = f.at("epsilon").get<double>();
    m.flow.median_radius = f.at("median_radius").get<int>();
    if (j.contains("correction")) {
      const json& c = j["correction"];
      CorrectionRecord rec;
      rec.fixed_point_iters = c.at("fixed_point_iters").get<int>();
      rec.mask_eps = c.at("mask_eps").get<double>();
      rec.injected_flow = c.at("injected_flow").get<bool>();
      if (c.contains("delta_t_floor")) rec.delta_t_floor = c["delta_t_floor"].get<double>();
      m.correction = rec;
    }
    m.output_dir = j.at("output_dir").get<std::string>();
    m.outputs = files_from(j.at("outputs"));
    m.results = j.value("results", json::object());
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

std::string serialize(const RunManifest& m) { return to_json(m).dump(2) + "\n"; }

RunManifest parse_manifest(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  return manifest_from_json(j);
}

SceneSpec parse_scene(const std::string& text, int height, int width) {
  SceneSpec spec;
  spec.height = height;
  spec.width = width;
  const auto colon = text.find(':');
  const std::string kind = trim(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    for (const std::string& item : split(text.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ConfigError("scene parameter '" + item + "' is not key=value");
      }
      const std::string key = trim(item.substr(0, eq));
      if (!kv.emplace(key, trim(item.substr(eq + 1))).second) {
        throw ConfigError("scene parameter '" + key + "' given twice");
      }
    }
  }
  const auto take = [&](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const double v = to_double(it->second, key);
    kv.erase(it);
    return v;
  };
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  if (kind == "static") {
    spec.motion = Translation{0.0, 0.0};
  } else if (kind == "translation") {
    const double vx = take("vx", 0.0);
    spec.motion = Translation{vx, take("vy", 0.0)};
  } else if (kind == "rotation") {
    const double omega = take("omega", 0.0);
    const double x = take("cx", cx);
    spec.motion = Rotation{omega, x, take("cy", cy)};
  } else if (kind == "zoom") {
    const double rate = take("rate", 0.0);
    const double x = take("cx", cx);
    spec.motion = Zoom{rate, x, take("cy", cy)};
  } else {
    throw ConfigError("unknown scene kind '" + kind + "'");
  }
  if (auto it = kv.find("seed"); it != kv.end()) {
    spec.seed = to_int<std::uint64_t>(it->second, "seed");
    kv.erase(it);
  }
  if (auto it = kv.find("margin"); it != kv.end()) {
    const long long margin = to_int(it->second, "margin");
    if (margin < 0 || margin > 4096) throw ConfigError("margin out of range");
    spec.margin = static_cast<int>(margin);
    kv.erase(it);
  }
  if (auto it = kv.find("texture"); it != kv.end()) {
    if (it->second == "noise") spec.texture = TextureKind::ValueNoise;
    else if (it->second == "line") spec.texture = TextureKind::VerticalLine;
    else throw ConfigError("unknown texture '" + it->second + "'");
    kv.erase(it);
  }
  if (!kv.empty()) {
    throw ConfigError("unknown scene parameter '" + kv.begin()->first + "' for " + kind);
  }
  return spec;
}

std::string format_scene(const SceneSpec& spec) {
  std::string s = std::visit(
      [](const auto& mo) -> std::string {
        using T = std::decay_t<decltype(mo)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return "translation:vx=" + fmt(mo.vx) + ",vy=" + fmt(mo.vy);
        } else if constexpr (std::is_same_v<T, Rotation>) {
          return "rotation:omega=" + fmt(mo.omega) + ",cx=" + fmt(mo.cx) + ",cy=" + fmt(mo.cy);
        } else {
          return "zoom:rate=" + fmt(mo.rate) + ",cx=" + fmt(mo.cx) + ",cy=" + fmt(mo.cy);
        }
      },
      spec.motion);
  s += ",seed=" + std::to_string(spec.seed);
  s += std::string(",texture=") + (spec.texture == TextureKind::ValueNoise ? "noise" : "line");
  s += ",margin=" + std::to_string(spec.margin);
  return s;
}

std::vector<int> parse_targets(const std::string& text, int height) {
  if (trim(text).empty()) throw ConfigError("empty target list");
  std::vector<int> rows;
  for (const std::string& tok : split(text, ',')) {
    if (tok.empty()) throw ConfigError("empty entry in target list '" + text + "'");
    int row = 0;
    if (tok == "H") {
      row = height;
    } else if (tok.find_first_of(".eE") != std::string::npos) {
      const double f = to_double(tok, "target");
      if (f < 0.0 || f > 1.0) {
        throw RangeError("fractional target " + tok + " outside [0, 1]");
      }
      row = 1 + static_cast<int>(std::lround(f * (height - 1)));
    } else {
      const long long v = to_int(tok, "target");
      if (v < 1 || v > height) {
        throw RangeError("target row " + tok + " outside 1.." + std::to_string(height));
      }
      row = static_cast<int>(v);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rscorrect::tools
