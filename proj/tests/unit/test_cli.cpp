#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "cli_runner.hpp"
#include "helpers.hpp"
#include "rscorrect/metrics.hpp"
#include "rscorrect/tools/io.hpp"
#include "rscorrect/tools/manifest.hpp"
#include "temp_dir.hpp"

using namespace rscorrect;
using namespace rscorrect::tools;
namespace fs = std::filesystem;
using testing::run_cli;

namespace {

// tau = 1/63 s makes scene velocities read as pixels per scan at H=64.
const std::string kTau = "0.015873015873015872";

std::vector<std::string> png_names(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".png") names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

bool single_line_error(const testing::CliResult& r) {
  return r.err.rfind("rscorrect: ", 0) == 0 &&
         std::count(r.err.begin(), r.err.end(), '\n') == 1;
}

void synthesize(const fs::path& out, const std::string& scene,
                std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"synthesize", "--scene", scene, "--size", "64x64",
                                "--tau", kTau, "--out", out.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  const auto r = run_cli(args);
  REQUIRE_MESSAGE(r.code == 0, r.err);
}

}  // namespace

TEST_CASE("synthesize writes the default grid, oracle flows and a manifest") {
  testing::TempDir dir;
  synthesize(dir.path(), "translation:vx=6,vy=0");
  const auto names = png_names(dir.path());
  CHECK(names.size() == 11);
  CHECK(fs::exists(dir / "I_t2b.png"));
  CHECK(fs::exists(dir / "gs_008.png"));
  CHECK_FALSE(fs::exists(dir / "gs_009.png"));
  CHECK(fs::exists(dir / "oracle_flow_t2b.flo"));
  const RunManifest m = parse_manifest(std::string(
      std::istreambuf_iterator<char>(std::ifstream(dir / "manifest.json").rdbuf()), {}));
  CHECK(m.command == "synthesize");
  CHECK(m.targets == std::vector<int>{1, 9, 17, 25, 33, 40, 48, 56, 64});
  REQUIRE(m.scan.has_value());
  CHECK(m.scan->height == 64);
  for (const FileRecord& f : m.outputs) CHECK(sha256_file(dir / f.name) == f.sha256);
}

TEST_CASE("static synthesis produces identical images") {
  testing::TempDir dir;
  synthesize(dir.path(), "static:seed=3");
  const auto names = png_names(dir.path());
  REQUIRE(names.size() == 11);
  const auto ref = read_bytes(dir / names[0]);
  for (const auto& n : names) CHECK(read_png(dir / n) == read_png(dir / names[0]));
  (void)ref;
}

TEST_CASE("synthesize honours --gs-targets and --targets") {
  testing::TempDir a, b;
  synthesize(a.path(), "translation:vx=3", {"--gs-targets", "17"});
  CHECK(png_names(a.path()).size() == 19);
  synthesize(b.path(), "translation:vx=3", {"--targets", "1,0.5,H"});
  CHECK(png_names(b.path()).size() == 5);
}

TEST_CASE("usage and data errors map to exit codes with one-line diagnostics") {
  testing::TempDir dir;
  auto r = run_cli({"synthesize", "--tau", "1", "--out", dir.path().string()});
  CHECK(r.code == kExitUsage);
  CHECK(single_line_error(r));
  r = run_cli({"bogus"});
  CHECK(r.code == kExitUsage);
  CHECK(single_line_error(r));
  r = run_cli({"synthesize", "--scene", "translation:vx=1", "--size", "64", "--tau", "1",
               "--out", dir.path().string()});
  CHECK(r.code == kExitUsage);
  // Scan longer than the margin allows.
  r = run_cli({"synthesize", "--scene", "translation:vx=100", "--size", "64x64", "--tau", "1",
               "--out", dir.path().string()});
  CHECK(r.code == kExitData);
  CHECK(single_line_error(r));
  r = run_cli({"synthesize", "--scene", "translation:vx=1", "--size", "64x64", "--tau", kTau,
               "--targets", "65", "--out", dir.path().string()});
  CHECK(r.code == kExitData);
}

TEST_CASE("synthesize from a GS directory reports coverage gaps") {
  testing::TempDir src, out;
  write_png(src / "a.png", Frame(16, 16, 3, 0.2f));
  write_png(src / "b.png", Frame(16, 16, 3, 0.6f));
  std::ofstream(src / "times.txt") << "a.png -1\nb.png 1\n";
  auto r = run_cli({"synthesize", "--gs-dir", src.path().string(), "--times",
                    (src / "times.txt").string(), "--tau", "0.1", "--out", out.path().string()});
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(read_png(out / "I_t2b.png").at(0, 0, 0) < read_png(out / "I_t2b.png").at(15, 0, 0));
  r = run_cli({"synthesize", "--gs-dir", src.path().string(), "--times",
               (src / "times.txt").string(), "--tau", "1", "--out", out.path().string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("row") != std::string::npos);
}

TEST_CASE("correct writes nine frames by default and accepts injected flow") {
  testing::TempDir syn, est, inj;
  synthesize(syn.path(), "translation:vx=5,vy=2");
  auto r = run_cli({"correct", "--t2b", (syn / "I_t2b.png").string(), "--b2t",
                    (syn / "I_b2t.png").string(), "--flow-out", "--out", est.path().string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(png_names(est.path()).size() == 9);
  CHECK(fs::exists(est / "flow_t2b_b2t.flo"));
  r = run_cli({"correct", "--t2b", (syn / "I_t2b.png").string(), "--b2t",
               (syn / "I_b2t.png").string(), "--flow-in",
               (syn / "oracle_flow_t2b.flo").string() + "," + (syn / "oracle_flow_b2t.flo").string(),
               "--out", inj.path().string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (int k = 0; k < 9; ++k) {
    char name[16];
    std::snprintf(name, sizeof name, "gs_%03d.png", k);
    const Frame truth = read_png(syn / name);
    CHECK(psnr(read_png(inj / name), truth, 8) >= 40.0);
    CHECK(psnr(read_png(est / name), truth, 8) >= 30.0);
  }
  const auto manifest = read_json(inj / "manifest.json");
  CHECK(manifest["results"]["coverage"].size() == 9);
  CHECK(manifest["correction"]["injected_flow"] == true);
}

TEST_CASE("reconstruct-rs arity and identity") {
  testing::TempDir dir, out;
  write_png(dir / "g.png", Frame(32, 32, 3, 0.3f));
  const std::string g = (dir / "g.png").string();
  auto r = run_cli({"reconstruct-rs", "--gs", g, "--out", out.path().string()});
  CHECK(r.code == kExitUsage);
  r = run_cli({"reconstruct-rs", "--gs", g + "," + g + "," + g, "--out", out.path().string()});
  CHECK(r.code == kExitUsage);
  r = run_cli({"reconstruct-rs", "--gs", g + "," + g, "--mid-row", "4", "--out", out.path().string()});
  CHECK(r.code == kExitUsage);
  r = run_cli({"reconstruct-rs", "--gs", g + "," + g, "--out", out.path().string()});
  REQUIRE(r.code == 0);
  CHECK(read_png(out / "I_t2b_rec.png") == read_png(dir / "g.png"));
  CHECK(read_png(out / "I_b2t_rec.png") == read_png(dir / "g.png"));
}

TEST_CASE("reconstruct-rs from synthesized endpoints matches the RS frames") {
  testing::TempDir syn, out, mid;
  synthesize(syn.path(), "translation:vx=6,vy=-3", {"--targets", "1,20,H"});
  auto r = run_cli({"reconstruct-rs", "--gs",
                    (syn / "gs_000.png").string() + "," + (syn / "gs_002.png").string(), "--out",
                    out.path().string()});
  REQUIRE(r.code == 0);
  CHECK(psnr(read_png(out / "I_t2b_rec.png"), read_png(syn / "I_t2b.png"), 8) >= 35.0);
  CHECK(psnr(read_png(out / "I_b2t_rec.png"), read_png(syn / "I_b2t.png"), 8) >= 35.0);
  // Endpoint rows carry the GS rows unchanged.
  CHECK(testing::rows_equal(read_png(out / "I_t2b_rec.png"), 0, read_png(syn / "gs_000.png"), 0));
  CHECK(testing::rows_equal(read_png(out / "I_t2b_rec.png"), 63, read_png(syn / "gs_002.png"), 63));
  r = run_cli({"reconstruct-rs", "--gs",
               (syn / "gs_000.png").string() + "," + (syn / "gs_001.png").string() + "," +
                   (syn / "gs_002.png").string(),
               "--mid-row", "20", "--out", mid.path().string()});
  REQUIRE(r.code == 0);
  CHECK(testing::rows_equal(read_png(mid / "I_t2b_rec.png"), 19, read_png(syn / "gs_001.png"), 19));
}

TEST_CASE("cycle-check on static and moving scenes") {
  testing::TempDir st, stc, mv, mvc;
  synthesize(st.path(), "static:seed=9");
  auto r = run_cli({"cycle-check", "--t2b", (st / "I_t2b.png").string(), "--b2t",
                    (st / "I_b2t.png").string(), "--out", stc.path().string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto s = read_json(stc / "report.json");
  CHECK(s["l_self"].get<double>() <= 1e-3);
  CHECK(s["border"] == 16);
  CHECK(s["mid_row"] == 32);
  CHECK(nlohmann::json::parse(r.out) == s);

  synthesize(mv.path(), "translation:vx=6,vy=2");
  r = run_cli({"cycle-check", "--t2b", (mv / "I_t2b.png").string(), "--b2t",
               (mv / "I_b2t.png").string(), "--flow-in",
               (mv / "oracle_flow_t2b.flo").string() + "," + (mv / "oracle_flow_b2t.flo").string(),
               "--exclude-border", "8", "--out", mvc.path().string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto m = read_json(mvc / "report.json");
  CHECK(m["psnr"]["full_t2b"].get<double>() >= 40.0);
  CHECK(m["psnr"]["full_b2t"].get<double>() >= 40.0);
  CHECK(m["l_se_control"].get<double>() > m["l_se"].get<double>());
  CHECK(m["l_self"].get<double>() == m["l_se"].get<double>() + m["l_sme"].get<double>());
  for (const char* n : {"I_t2b_rec.png", "I_b2t_rec.png", "I_t2b_rec_mid.png", "I_b2t_rec_mid.png"}) {
    CHECK(fs::exists(mvc / n));
  }
}

TEST_CASE("evaluate a directory against itself and against a mismatch") {
  testing::TempDir syn, out, other;
  synthesize(syn.path(), "translation:vx=2");
  auto r = run_cli({"evaluate", "--pred", syn.path().string(), "--gt", syn.path().string(),
                    "--exclude-border", "16", "--out", out.path().string()});
  REQUIRE(r.code == 0);
  const auto rep = read_json(out / "report.json");
  CHECK(rep["count"] == 11);
  CHECK(rep["mean_psnr"].get<double>() == kPsnrCap);
  CHECK(rep["mean_ssim"].get<double>() == 1.0);
  CHECK(rep["border"] == 16);
  write_png(other / "unmatched.png", Frame(64, 64, 3));
  r = run_cli({"evaluate", "--pred", other.path().string(), "--gt", syn.path().string(), "--out",
               out.path().string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("unmatched.png") != std::string::npos);
}

TEST_CASE("identical runs give bit-identical outputs") {
  testing::TempDir a, b, ca, cb;
  synthesize(a.path(), "rotation:omega=0.05,seed=4");
  synthesize(b.path(), "rotation:omega=0.05,seed=4");
  for (const auto& n : png_names(a.path())) CHECK(read_bytes(a / n) == read_bytes(b / n));
  for (const auto* o : {&ca, &cb}) {
    const auto r = run_cli({"correct", "--t2b", (a / "I_t2b.png").string(), "--b2t",
                            (a / "I_b2t.png").string(), "--targets", "1,H", "--out",
                            o->path().string()});
    REQUIRE(r.code == 0);
  }
  CHECK(read_bytes(ca / "gs_000.png") == read_bytes(cb / "gs_000.png"));
  CHECK(read_bytes(ca / "gs_001.png") == read_bytes(cb / "gs_001.png"));
}
