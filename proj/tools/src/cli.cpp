#include "rscorrect/tools/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rscorrect/correction.hpp"
#include "rscorrect/error.hpp"
#include "rscorrect/formation.hpp"
#include "rscorrect/metrics.hpp"
#include "rscorrect/reconstruction.hpp"
#include "rscorrect/scene.hpp"
#include "rscorrect/tools/io.hpp"
#include "rscorrect/tools/manifest.hpp"
#include "rscorrect/version.hpp"

namespace rscorrect::tools {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kDefaultTargetCount = 9;
constexpr int kDefaultCycleBorder = 16;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(item);
  return out;
}

std::string frame_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gs_%03zu.png", k);
  return buf;
}

ScanConfig make_scan(int h, int w, double tau, double t_mid, ScanDirection dir) {
  ScanConfig s{h, w, tau, dir, t_mid};
  s.validate();
  return s;
}

ScanConfig flipped(ScanConfig s) {
  s.direction = s.direction == ScanDirection::TopToBottom ? ScanDirection::BottomToTop
                                                          : ScanDirection::TopToBottom;
  return s;
}

FileRecord input_record(const std::string& path) {
  return {path, sha256_file(path)};
}

std::pair<int, int> parse_size(const std::string& s) {
  const auto x = s.find('x');
  int w = 0, h = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    w = std::stoi(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    h = std::stoi(s.substr(x + 1), &used);
    if (used != s.size() - x - 1) throw std::invalid_argument(s);
  } catch (const std::logic_error&) {
    throw UsageError("--size expects WIDTHxHEIGHT, got '" + s + "'");
  }
  if (w < 2 || h < 2 || w > 16384 || h > 16384) {
    throw UsageError("--size must lie between 2x2 and 16384x16384");
  }
  return {h, w};
}

// Writes files into the output directory and remembers their hashes.
class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw FormatError("cannot create output directory " + dir);
    }
  }

  void png(const std::string& name, const Frame& f) {
    write_png(dir_ / name, f);
    record(name);
  }
  void flo(const std::string& name, const FlowField& f) {
    write_flo(dir_ / name, f);
    record(name);
  }
  void text(const std::string& name, const std::string& body) {
    std::ofstream os(dir_ / name, std::ios::binary);
    os << body;
    if (!os) throw FormatError("write failed: " + (dir_ / name).string());
    os.close();
    record(name);
  }
  void finish(RunManifest& m) {
    m.outputs = written_;
    text_unrecorded("manifest.json", serialize(m));
  }

 private:
  void record(const std::string& name) { written_.push_back({name, sha256_file(dir_ / name)}); }
  void text_unrecorded(const std::string& name, const std::string& body) {
    std::ofstream os(dir_ / name, std::ios::binary);
    os << body;
    if (!os) throw FormatError("write failed: " + (dir_ / name).string());
  }

  fs::path dir_;
  std::vector<FileRecord> written_;
};

RunManifest base_manifest(const std::string& command, const std::string& out) {
  RunManifest m;
  m.command = command;
  m.toolkit_version = toolkit_version();
  m.output_dir = out;
  return m;
}

struct FlowOptions {
  FlowParams params;

  void add(CLI::App* app) {
    app->add_option("--flow-smoothness", params.smoothness, "Flow smoothness weight")
        ->capture_default_str();
    app->add_option("--flow-warps", params.warp_iterations, "Warps per pyramid level")
        ->capture_default_str();
    app->add_option("--flow-pyramid-factor", params.pyramid_factor, "Pyramid downscale factor")
        ->capture_default_str();
    app->add_option("--flow-min-level", params.min_level_size, "Smallest pyramid side, px")
        ->capture_default_str();
    app->add_option("--flow-median-radius", params.median_radius, "Median filter radius")
        ->capture_default_str();
  }
};

struct CorrectionOptions {
  int iters = 3;
  std::optional<double> delta_t_floor;
  double mask_eps = 1e-6;
  std::string flow_in;

  void add(CLI::App* app) {
    app->add_option("--iters", iters, "Fixed-point row refinement iterations")
        ->capture_default_str();
    app->add_option("--delta-t-floor", delta_t_floor,
                    "Minimum capture-time gap in scan units (default 0.5/(H-1))");
    app->add_option("--mask-eps", mask_eps, "Fusion mask guard")->capture_default_str();
    app->add_option("--flow-in", flow_in,
                    "Injected flows t2b->b2t,b2t->t2b as two .flo files");
  }

  CorrectionParams params(const FlowParams& flow) const {
    CorrectionParams p;
    p.fixed_point_iters = iters;
    p.delta_t_floor = delta_t_floor;
    p.mask_eps = mask_eps;
    p.flow = flow;
    p.validate();
    return p;
  }

  CorrectionRecord record() const {
    return {iters, delta_t_floor, mask_eps, !flow_in.empty()};
  }
};

std::optional<DualFlow> load_flows(const std::string& spec, RunManifest& m) {
  if (spec.empty()) return std::nullopt;
  const auto paths = split_list(spec);
  if (paths.size() != 2) throw UsageError("--flow-in expects two comma-separated .flo files");
  m.inputs.push_back(input_record(paths[0]));
  m.inputs.push_back(input_record(paths[1]));
  return DualFlow{read_flo(paths[0]), read_flo(paths[1])};
}

DualFlow dual_flows(const Frame& a, const Frame& b, const std::optional<DualFlow>& injected,
                    const FlowParams& params) {
  if (injected) {
    for (const FlowField* f : {&injected->t2b_to_b2t, &injected->b2t_to_t2b}) {
      if (f->height != a.height() || f->width != a.width()) {
        throw DimensionError("injected flow grid does not match the images");
      }
    }
    return *injected;
  }
  return {estimate_flow(a, b, params), estimate_flow(b, a, params)};
}

std::vector<int> resolve_targets(const std::string& list, std::optional<int> count, int h) {
  if (!list.empty()) return parse_targets(list, h);
  const int n = count.value_or(kDefaultTargetCount);
  if (n < 1) throw UsageError("--gs-targets must be at least 1");
  return default_target_rows(h, n);
}

// ---------------------------------------------------------------- synthesize

struct SynthesizeArgs {
  std::string scene;
  std::string gs_dir;
  std::string times;
  std::string size = "256x256";
  double tau = 0.0;
  double t_mid = 0.0;
  std::string targets;
  std::optional<int> gs_targets;
  std::string out;
};

GsSequence load_sequence(const std::string& dir, const std::string& times_file,
                         RunManifest& m) {
  std::ifstream is(times_file);
  if (!is) throw FormatError("cannot open times file " + times_file);
  m.inputs.push_back(input_record(times_file));
  GsSequence seq;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string name;
    double t = 0.0;
    if (!(ls >> name)) continue;
    if (!(ls >> t)) {
      throw FormatError(times_file + ":" + std::to_string(lineno) +
                        ": expected '<file> <time>'");
    }
    const std::string path = (fs::path(dir) / name).string();
    m.inputs.push_back(input_record(path));
    seq.frames.push_back(read_png(path));
    seq.times.push_back(t);
  }
  seq.validate();
  return seq;
}

int cmd_synthesize(const SynthesizeArgs& a) {
  RunManifest m = base_manifest("synthesize", a.out);
  Frame i_t2b, i_b2t;
  std::vector<Frame> gs;
  std::optional<DualFlow> oracle;
  int h = 0, w = 0;

  if (!a.scene.empty()) {
    std::tie(h, w) = parse_size(a.size);
    const SceneSpec spec = parse_scene(a.scene, h, w);
    m.scene = format_scene(spec);
    const Scene scene(spec);
    const ScanConfig t2b = make_scan(h, w, a.tau, a.t_mid, ScanDirection::TopToBottom);
    const ScanConfig b2t = flipped(t2b);
    m.targets = resolve_targets(a.targets, a.gs_targets, h);
    i_t2b = scene.render_rs_exact(t2b);
    i_b2t = scene.render_rs_exact(b2t);
    for (int row : m.targets) gs.push_back(scene.render_gs_at(row_time(t2b, row)));
    oracle = DualFlow{scene.exact_flow(t2b, b2t), scene.exact_flow(b2t, t2b)};
  } else {
    const GsSequence seq = load_sequence(a.gs_dir, a.times, m);
    h = seq.frames.front().height();
    w = seq.frames.front().width();
    const ScanConfig t2b = make_scan(h, w, a.tau, a.t_mid, ScanDirection::TopToBottom);
    m.targets = resolve_targets(a.targets, a.gs_targets, h);
    std::tie(i_t2b, i_b2t) = synthesize_dual_pair(seq, t2b, flipped(t2b));
    for (int row : m.targets) gs.push_back(interpolate_gs(seq, row_time(t2b, row)));
  }
  m.scan = ScanRecord{h, w, a.tau, a.t_mid};

  OutputDir out(a.out);
  out.png("I_t2b.png", i_t2b);
  out.png("I_b2t.png", i_b2t);
  for (std::size_t k = 0; k < gs.size(); ++k) out.png(frame_name(k), gs[k]);
  if (oracle) {
    out.flo("oracle_flow_t2b.flo", oracle->t2b_to_b2t);
    out.flo("oracle_flow_b2t.flo", oracle->b2t_to_t2b);
  }
  out.finish(m);
  std::cout << "synthesize: wrote 2 RS frames and " << gs.size() << " GS frames to "
            << a.out << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- correct

struct CorrectArgs {
  std::string t2b;
  std::string b2t;
  std::string targets;
  std::optional<int> gs_targets;
  double tau = 1.0;
  double t_mid = 0.0;
  bool flow_out = false;
  CorrectionOptions correction;
  FlowOptions flow;
  std::string out;
};

int cmd_correct(const CorrectArgs& a) {
  RunManifest m = base_manifest("correct", a.out);
  m.inputs = {input_record(a.t2b), input_record(a.b2t)};
  const Frame i_t2b = read_png(a.t2b);
  const Frame i_b2t = read_png(a.b2t);
  require_same_shape(i_t2b, i_b2t, "correct");
  const int h = i_t2b.height();
  const int w = i_t2b.width();
  make_scan(h, w, a.tau, a.t_mid, ScanDirection::TopToBottom);
  m.scan = ScanRecord{h, w, a.tau, a.t_mid};
  m.targets = resolve_targets(a.targets, a.gs_targets, h);
  m.flow = a.flow.params;
  m.correction = a.correction.record();

  CorrectionParams params = a.correction.params(a.flow.params);
  const auto injected = load_flows(a.correction.flow_in, m);
  params.external_flow = dual_flows(i_t2b, i_b2t, injected, a.flow.params);
  const auto motion = estimate_motion_map(i_t2b, i_b2t, params);

  OutputDir out(a.out);
  json coverage = json::array();
  int total_filled = 0;
  for (std::size_t k = 0; k < m.targets.size(); ++k) {
    const CorrectionResult res = correct_with_motion(i_t2b, i_b2t, motion, m.targets[k], params);
    out.png(frame_name(k), res.frame);
    coverage.push_back({{"frame", frame_name(k)},
                        {"target", m.targets[k]},
                        {"filled", res.coverage.filled}});
    total_filled += res.coverage.filled;
  }
  if (a.flow_out) {
    out.flo("flow_t2b_b2t.flo", params.external_flow->t2b_to_b2t);
    out.flo("flow_b2t_t2b.flo", params.external_flow->b2t_to_t2b);
  }
  m.results = {{"coverage", coverage}};
  out.finish(m);
  std::cout << "correct: wrote " << m.targets.size() << " GS frames to " << a.out
            << " (" << total_filled << " pixels filled from neighbors)\n";
  return kExitOk;
}

// ------------------------------------------------------------ reconstruct-rs

struct ReconstructArgs {
  std::string gs;
  std::optional<int> mid_row;
  double time_scale = 1.0;
  FlowOptions flow;
  std::string out;
};

int cmd_reconstruct(const ReconstructArgs& a) {
  RunManifest m = base_manifest("reconstruct-rs", a.out);
  const auto paths = split_list(a.gs);
  if (paths.size() != 2 && paths.size() != 3) {
    throw UsageError("--gs expects two or three comma-separated frames");
  }
  if (paths.size() == 3 && !a.mid_row) {
    throw UsageError("three-frame reconstruction requires --mid-row");
  }
  if (paths.size() == 2 && a.mid_row) {
    throw UsageError("--mid-row needs a middle frame in --gs");
  }
  std::vector<Frame> g;
  for (const auto& p : paths) {
    m.inputs.push_back(input_record(p));
    g.push_back(read_png(p));
  }
  for (const Frame& f : g) require_same_shape(g.front(), f, "reconstruct-rs");
  m.flow = a.flow.params;
  m.mid_row = a.mid_row;
  if (!(a.time_scale > 0.0)) throw UsageError("--time-scale must be positive");
  m.results = {{"time_scale", a.time_scale}};

  Frame r_t2b, r_b2t;
  if (g.size() == 2) {
    const PairFlows flows = estimate_pair_flows(g[0], g[1], a.flow.params);
    r_t2b = reconstruct_rs_full(g[0], g[1], flows, ScanDirection::TopToBottom, a.time_scale);
    r_b2t = reconstruct_rs_full(g[0], g[1], flows, ScanDirection::BottomToTop, a.time_scale);
  } else {
    if (*a.mid_row < 1 || *a.mid_row > g[0].height()) {
      throw RangeError("--mid-row outside 1.." + std::to_string(g[0].height()));
    }
    const PairFlows sm = estimate_pair_flows(g[0], g[1], a.flow.params);
    const PairFlows me = estimate_pair_flows(g[1], g[2], a.flow.params);
    r_t2b = reconstruct_rs_with_intermediate(g[0], g[1], g[2], sm, me, *a.mid_row,
                                             ScanDirection::TopToBottom, a.time_scale);
    r_b2t = reconstruct_rs_with_intermediate(g[0], g[1], g[2], sm, me, *a.mid_row,
                                             ScanDirection::BottomToTop, a.time_scale);
  }
  OutputDir out(a.out);
  out.png("I_t2b_rec.png", r_t2b);
  out.png("I_b2t_rec.png", r_b2t);
  out.finish(m);
  std::cout << "reconstruct-rs: wrote I_t2b_rec.png and I_b2t_rec.png to " << a.out << "\n";
  return kExitOk;
}

// --------------------------------------------------------------- cycle-check

struct CycleArgs {
  std::string t2b;
  std::string b2t;
  std::optional<int> mid_row;
  int border = kDefaultCycleBorder;
  double control_scale = 2.0;
  CorrectionOptions correction;
  FlowOptions flow;
  std::string out;
};

int cmd_cycle_check(const CycleArgs& a) {
  RunManifest m = base_manifest("cycle-check", a.out);
  m.inputs = {input_record(a.t2b), input_record(a.b2t)};
  const Frame i_t2b = read_png(a.t2b);
  const Frame i_b2t = read_png(a.b2t);
  require_same_shape(i_t2b, i_b2t, "cycle-check");
  const int h = i_t2b.height();
  const int mid = a.mid_row.value_or((h + 1) / 2);
  if (mid < 1 || mid > h) throw RangeError("--mid-row outside 1.." + std::to_string(h));
  if (a.border < 0) throw UsageError("--exclude-border must be non-negative");
  if (!(a.control_scale > 0.0)) throw UsageError("--control-scale must be positive");
  m.mid_row = mid;
  m.targets = {1, mid, h};
  m.flow = a.flow.params;
  m.correction = a.correction.record();

  CorrectionParams params = a.correction.params(a.flow.params);
  const auto injected = load_flows(a.correction.flow_in, m);
  params.external_flow = dual_flows(i_t2b, i_b2t, injected, a.flow.params);
  const auto motion = estimate_motion_map(i_t2b, i_b2t, params);
  const Frame g1 = correct_with_motion(i_t2b, i_b2t, motion, 1, params).frame;
  const Frame gm = correct_with_motion(i_t2b, i_b2t, motion, mid, params).frame;
  const Frame gh = correct_with_motion(i_t2b, i_b2t, motion, h, params).frame;

  // With injected flow the GS-to-GS flows follow from the same motion maps.
  const auto pair = [&](const Frame& ga, const Frame& gb, int ra, int rb) {
    if (injected) {
      return PairFlows{flow_between_targets(motion, ra, rb),
                       flow_between_targets(motion, rb, ra)};
    }
    return estimate_pair_flows(ga, gb, a.flow.params);
  };
  const PairFlows f_full = pair(g1, gh, 1, h);
  const PairFlows f_sm = pair(g1, gm, 1, mid);
  const PairFlows f_me = pair(gm, gh, mid, h);

  const FramePair inputs{i_t2b, i_b2t};
  const FramePair full{
      reconstruct_rs_full(g1, gh, f_full, ScanDirection::TopToBottom),
      reconstruct_rs_full(g1, gh, f_full, ScanDirection::BottomToTop)};
  const FramePair inter{
      reconstruct_rs_with_intermediate(g1, gm, gh, f_sm, f_me, mid, ScanDirection::TopToBottom),
      reconstruct_rs_with_intermediate(g1, gm, gh, f_sm, f_me, mid, ScanDirection::BottomToTop)};
  const FramePair control{
      reconstruct_rs_full(g1, gh, f_full, ScanDirection::TopToBottom, a.control_scale),
      reconstruct_rs_full(g1, gh, f_full, ScanDirection::BottomToTop, a.control_scale)};

  const LossReport rep = cycle_losses(inputs, full, inter, a.border);
  const LossReport ctl = cycle_losses(inputs, control, control, a.border);
  json results = {
      {"l_se", rep.l_se},
      {"l_sme", rep.l_sme},
      {"l_self", rep.l_self},
      {"terms",
       {{"se_t2b", rep.se_t2b},
        {"se_b2t", rep.se_b2t},
        {"sme_t2b", rep.sme_t2b},
        {"sme_b2t", rep.sme_b2t}}},
      {"l_se_control", ctl.l_se},
      {"control_scale", a.control_scale},
      {"mid_row", mid},
      {"border", a.border},
      {"psnr",
       {{"full_t2b", psnr(full.first, i_t2b, a.border)},
        {"full_b2t", psnr(full.second, i_b2t, a.border)},
        {"mid_t2b", psnr(inter.first, i_t2b, a.border)},
        {"mid_b2t", psnr(inter.second, i_b2t, a.border)}}},
      {"ssim",
       {{"full_t2b", ssim(full.first, i_t2b, a.border)},
        {"full_b2t", ssim(full.second, i_b2t, a.border)},
        {"mid_t2b", ssim(inter.first, i_t2b, a.border)},
        {"mid_b2t", ssim(inter.second, i_b2t, a.border)}}}};
  m.results = results;

  OutputDir out(a.out);
  out.png("I_t2b_rec.png", full.first);
  out.png("I_b2t_rec.png", full.second);
  out.png("I_t2b_rec_mid.png", inter.first);
  out.png("I_b2t_rec_mid.png", inter.second);
  out.text("report.json", results.dump(2) + "\n");
  out.finish(m);
  std::cout << results.dump(2) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ evaluate

struct EvaluateArgs {
  std::string pred;
  std::string gt;
  int border = 0;
  std::string out;
};

std::vector<std::string> png_names(const std::string& dir) {
  if (!fs::is_directory(dir)) throw FormatError(dir + " is not a directory");
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") {
      names.push_back(e.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

int cmd_evaluate(const EvaluateArgs& a) {
  if (a.border < 0) throw UsageError("--exclude-border must be non-negative");
  RunManifest m = base_manifest("evaluate", a.out);
  const auto pred = png_names(a.pred);
  const auto gt = png_names(a.gt);
  std::vector<std::string> unmatched;
  std::set_symmetric_difference(pred.begin(), pred.end(), gt.begin(), gt.end(),
                                std::back_inserter(unmatched));
  if (!unmatched.empty()) {
    std::string list;
    for (const auto& n : unmatched) list += (list.empty() ? "" : ", ") + n;
    throw Error("unmatched frames: " + list);
  }
  if (pred.empty()) throw Error("no PNG frames found in " + a.pred);

  json frames = json::array();
  double sum_psnr = 0.0, sum_ssim = 0.0;
  for (const auto& name : pred) {
    const std::string pa = (fs::path(a.pred) / name).string();
    const std::string pb = (fs::path(a.gt) / name).string();
    m.inputs.push_back(input_record(pa));
    m.inputs.push_back(input_record(pb));
    const Frame fa = read_png(pa);
    const Frame fb = read_png(pb);
    const double p = psnr(fa, fb, a.border);
    const double s = ssim(fa, fb, a.border);
    frames.push_back({{"name", name}, {"psnr", p}, {"ssim", s}});
    sum_psnr += p;
    sum_ssim += s;
  }
  const double n = static_cast<double>(pred.size());
  json results = {{"frames", frames},
                  {"count", pred.size()},
                  {"mean_psnr", sum_psnr / n},
                  {"mean_ssim", sum_ssim / n},
                  {"border", a.border}};
  m.results = results;
  OutputDir out(a.out);
  out.text("report.json", results.dump(2) + "\n");
  out.finish(m);
  std::cout << results.dump(2) << "\n";
  return kExitOk;
}

void one_line(std::string& s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Rolling-shutter simulation and dual-reversed RS correction", "rscorrect"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);

  SynthesizeArgs syn;
  auto* s = app.add_subcommand("synthesize", "Render a dual RS pair and GS ground truth");
  auto* scene_opt = s->add_option("--scene", syn.scene, "Parametric scene, e.g. translation:vx=6,vy=0");
  auto* dir_opt = s->add_option("--gs-dir", syn.gs_dir, "Directory of GS frames");
  auto* times_opt = s->add_option("--times", syn.times, "Lines of '<file> <time>' for --gs-dir");
  scene_opt->excludes(dir_opt);
  dir_opt->needs(times_opt);
  times_opt->needs(dir_opt);
  s->add_option("--size", syn.size, "Canvas WIDTHxHEIGHT for --scene")->capture_default_str();
  s->add_option("--tau", syn.tau, "Row readout time, seconds")->required();
  s->add_option("--t-mid", syn.t_mid, "Exposure midpoint, seconds")->capture_default_str();
  auto* st = s->add_option("--targets", syn.targets, "GS rows: integers, fractions in [0,1], or H");
  auto* sc = s->add_option("--gs-targets", syn.gs_targets, "Number of uniformly spaced GS rows (default 9)");
  st->excludes(sc);
  s->add_option("--out", syn.out, "Output directory")->required();

  CorrectArgs cor;
  auto* c = app.add_subcommand("correct", "Correct a dual RS pair to GS frames");
  c->add_option("--t2b", cor.t2b, "Top-to-bottom RS frame")->required()->check(CLI::ExistingFile);
  c->add_option("--b2t", cor.b2t, "Bottom-to-top RS frame")->required()->check(CLI::ExistingFile);
  auto* ct = c->add_option("--targets", cor.targets, "Target rows: integers, fractions in [0,1], or H");
  auto* cc = c->add_option("--gs-targets", cor.gs_targets, "Number of uniformly spaced targets (default 9)");
  ct->excludes(cc);
  c->add_option("--tau", cor.tau, "Row readout time, seconds (recorded only)")->capture_default_str();
  c->add_option("--t-mid", cor.t_mid, "Exposure midpoint, seconds (recorded only)")->capture_default_str();
  c->add_flag("--flow-out", cor.flow_out, "Also write the inter-RS flows as .flo");
  cor.correction.add(c);
  cor.flow.add(c);
  c->add_option("--out", cor.out, "Output directory")->required();

  ReconstructArgs rec;
  auto* r = app.add_subcommand("reconstruct-rs", "Rebuild the dual RS pair from GS frames");
  r->add_option("--gs", rec.gs, "start,end or start,mid,end GS frames")->required();
  r->add_option("--mid-row", rec.mid_row, "Scan row of the middle frame (three-frame mode)");
  r->add_option("--time-scale", rec.time_scale, "Multiplier on the time maps")->capture_default_str();
  rec.flow.add(r);
  r->add_option("--out", rec.out, "Output directory")->required();

  CycleArgs cyc;
  auto* y = app.add_subcommand("cycle-check", "Correct, reconstruct and score against the input");
  y->add_option("--t2b", cyc.t2b, "Top-to-bottom RS frame")->required()->check(CLI::ExistingFile);
  y->add_option("--b2t", cyc.b2t, "Bottom-to-top RS frame")->required()->check(CLI::ExistingFile);
  y->add_option("--mid-row", cyc.mid_row, "Intermediate target row (default centre)");
  y->add_option("--exclude-border", cyc.border, "Border excluded from the scores, px")->capture_default_str();
  y->add_option("--control-scale", cyc.control_scale, "Time-map scale of the control reconstruction")
      ->capture_default_str();
  cyc.correction.add(y);
  cyc.flow.add(y);
  y->add_option("--out", cyc.out, "Output directory")->required();

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "PSNR/SSIM between equally named frames");
  e->add_option("--pred", ev.pred, "Directory of predicted frames")->required();
  e->add_option("--gt", ev.gt, "Directory of reference frames")->required();
  e->add_option("--exclude-border", ev.border, "Border excluded from the scores, px")->capture_default_str();
  e->add_option("--out", ev.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    std::string msg = err.what();
    one_line(msg);
    std::cerr << "rscorrect: error: " << msg << "\n";
    return kExitUsage;
  }

  try {
    if (s->parsed()) {
      if (syn.scene.empty() && syn.gs_dir.empty()) {
        throw UsageError("synthesize needs --scene or --gs-dir with --times");
      }
      return cmd_synthesize(syn);
    }
    if (c->parsed()) return cmd_correct(cor);
    if (r->parsed()) return cmd_reconstruct(rec);
    if (y->parsed()) return cmd_cycle_check(cyc);
    return cmd_evaluate(ev);
  } catch (const UsageError& err) {
    std::string msg = err.what();
    one_line(msg);
    std::cerr << "rscorrect: error: " << msg << "\n";
    return kExitUsage;
  } catch (const Error& err) {
    std::string msg = err.what();
    one_line(msg);
    std::cerr << "rscorrect: error: " << msg << "\n";
    return kExitData;
  } catch (const std::exception& err) {
    std::string msg = err.what();
    one_line(msg);
    std::cerr << "rscorrect: internal error: " << msg << "\n";
    return kExitInternal;
  }
}

}  // namespace rscorrect::tools
