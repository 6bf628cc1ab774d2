#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rscorrect/flow.hpp"
#include "rscorrect/scene.hpp"

namespace rscorrect::tools {

struct FileRecord {
  std::string name;
  std::string sha256;

  bool operator==(const FileRecord&) const = default;
};

struct ScanRecord {
  int height = 0;
  int width = 0;
  double tau = 0.0;
  double t_mid = 0.0;

  bool operator==(const ScanRecord&) const = default;
};

struct CorrectionRecord {
  int fixed_point_iters = 3;
  std::optional<double> delta_t_floor;
  double mask_eps = 1e-6;
  bool injected_flow = false;

  bool operator==(const CorrectionRecord&) const = default;
};

/// One per command run, written as manifest.json in the output directory.
struct RunManifest {
  std::string command;
  std::string toolkit_version;
  std::optional<ScanRecord> scan;
  std::optional<std::string> scene;
  std::vector<FileRecord> inputs;  // paths as given, with content hashes
  std::vector<int> targets;
  std::optional<int> mid_row;
  FlowParams flow;
  std::optional<CorrectionRecord> correction;
  std::string output_dir;
  std::vector<FileRecord> outputs;
  nlohmann::json results = nlohmann::json::object();

  bool operator==(const RunManifest&) const = default;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

std::string serialize(const RunManifest& m);
RunManifest parse_manifest(const std::string& text);

/// "kind[:key=value,...]" with kind in static, translation (vx, vy),
/// rotation (omega, cx, cy), zoom (rate, cx, cy) and common keys seed,
/// texture (noise | line) and margin. Velocities are per second; centres
/// default to the canvas centre.
SceneSpec parse_scene(const std::string& text, int height, int width);

/// Canonical text for a spec; parse_scene(format_scene(s)) reproduces s.
std::string format_scene(const SceneSpec& spec);

/// Comma-separated rows: integers are 1-based rows, decimals in [0,1] are
/// fractions of the scan mapped to the nearest row, "H" is the last row.
std::vector<int> parse_targets(const std::string& text, int height);

}  // namespace rscorrect::tools
