// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "uwimg/commands.hpp"
#include "uwimg/formation.hpp"
#include "uwimg/image_io.hpp"
#include "uwimg/losses.hpp"
#include "uwimg/metrics.hpp"
#include "uwimg/synthesis.hpp"
#include "uwimg/water_types.hpp"

namespace fs = std::filesystem;
using namespace uwimg;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ImagePlane random_image(Rng& rng, std::size_t h, std::size_t w) {
  ImagePlane img(h, w);
  for (double& v : img.values()) v = rng.uniform(0.0, 1.0);
  return img;
}

// Smooth 8-bit-representable scene with per-sample colour and texture.
ImagePlane scene_image(Rng& rng, std::size_t h, std::size_t w) {
  const std::array<double, 3> base{rng.uniform(0.1, 0.5), rng.uniform(0.1, 0.5),
                                   rng.uniform(0.1, 0.5)};
  const double fx = rng.uniform(0.01, 0.1);
  const double fy = rng.uniform(0.01, 0.1);
  ImagePlane img(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double s = 0.5 + 0.5 * std::sin(fx * static_cast<double>(c) + fy * static_cast<double>(r));
      for (std::size_t ch = 0; ch < 3; ++ch) {
        img.at(r, c, ch) = base[ch] + 0.45 * s * static_cast<double>(ch + 1) / 3.0;
      }
    }
  }
  return io::quantize8(img);
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / fmt::format("uwimg_accept_{}_{}", ::getpid(), counter_++);
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- criteria ----------------------------------------------------------------

Outcome check_table() {
  const auto t0 = Clock::now();
  std::ifstream in(fs::path(UWIMG_TEST_DATA) / "jerlov_table1.csv");
  if (!in) return {false, "golden table missing"};
  std::string line;
  std::size_t compared = 0;
  std::size_t mismatched = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string type;
    std::string wl;
    std::string alpha;
    std::string beta;
    std::getline(row, type, ',');
    std::getline(row, wl, ',');
    std::getline(row, alpha, ',');
    std::getline(row, beta, ',');
    const auto parsed = parse_water_type(type);
    if (!parsed) return {false, "unknown water type " + type};
    const auto iop = iop_lookup(*parsed);
    const int nm = std::stoi(wl);
    std::size_t ch = 0;
    while (ch < 3 && kChannelWavelengthsNm[ch] != nm) ++ch;
    if (ch == 3) return {false, "unknown wavelength " + wl};
    mismatched += iop.alpha[ch] != std::stod(alpha);
    mismatched += iop.beta[ch] != std::stod(beta);
    compared += 2;
  }
  const double secs = seconds_since(t0);
  return {compared == 60 && mismatched == 0 && secs < 1.0,
          fmt::format("{} values compared, {} mismatched, {:.3f} s", compared, mismatched, secs)};
}

Outcome check_psnr() {
  const std::vector<std::pair<double, double>> pairs{
      {0.1919, 25.2999}, {0.75428, 19.3555}, {0.37774, 22.3589}, {0.48124, 21.3072},
      {6.461, 10.0278},  {0.53028, 20.8857}, {0.28105, 23.643},  {2.9314, 13.46},
      {0.32374, 23.0288}, {8.2103, 8.9872}};
  double worst = 0.0;
  for (const auto& [mse_reported, psnr_reported] : pairs) {
    worst = std::max(worst, std::abs(metrics::psnr_from_mse(1000.0 * mse_reported) - psnr_reported));
  }
  return {worst <= 0.01, fmt::format("{} pairs, worst deviation {:.5f} dB", pairs.size(), worst)};
}

Outcome check_roundtrip() {
  const auto t0 = Clock::now();
  SynthesisConfig config;
  constexpr std::size_t kSize = 256;
  double worst_abs = 0.0;
  double worst_psnr = std::numeric_limits<double>::infinity();
  std::size_t floored = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(derive_child_seed(2024, i));
    auto params = sample_scene_params(rng, config);
    params.water_type = config.water_types[i % config.water_types.size()];
    const ImagePlane clean = scene_image(rng, kSize, kSize);
    const bool vertical = (i % 2) == 1;
    const DepthMap depth = procedural_depth(
        {vertical ? ProceduralDepth::Kind::VerticalRamp : ProceduralDepth::Kind::HorizontalRamp,
         0.5, 4.5},
        kSize, kSize);
    const auto sample =
        synthesize_sample(clean, depth, params.water_type, params.water_depth, params.background);
    floored += count_floored(sample.transmission, kDefaultTransmissionFloor);
    const ImagePlane restored = restore(sample.degraded, sample.params());
    const auto rv = restored.values();
    const auto cv = clean.values();
    for (std::size_t k = 0; k < rv.size(); ++k) worst_abs = std::max(worst_abs, std::abs(rv[k] - cv[k]));
    worst_psnr = std::min(worst_psnr, metrics::psnr(clean, io::quantize8(restored)));
  }
  const double secs = seconds_since(t0);
  return {worst_abs <= 1e-6 && worst_psnr >= 45.0 && secs < 10.0 && floored == 0,
          fmt::format("max-abs {:.3g}, min PSNR {} dB, {} floored, {:.2f} s", worst_abs,
                      metrics::format_value(worst_psnr), floored, secs)};
}

Outcome check_colorcast() {
  // Gray scene under neutral light.
  const ImagePlane gray(64, 64, 0.5);
  const DepthMap depth =
      procedural_depth({ProceduralDepth::Kind::HorizontalRamp, 0.5, 4.5}, 64, 64);
  const auto s = synthesize_sample(gray, depth, WaterType::III, 10.0, ChannelTriple::uniform(0.8));
  std::array<double, 3> mean{};
  const auto v = s.degraded.values();
  for (std::size_t k = 0; k < v.size(); ++k) mean[k % 3] += v[k];
  const bool means_ordered = mean[0] < mean[1] && mean[1] < mean[2];

  std::vector<std::string> violations;
  for (WaterType t : kAllWaterTypes) {
    const auto alpha = iop_lookup(t).alpha;
    for (double d : {0.1, 1.0, 5.0, 10.0, 20.0}) {
      const auto c = wavelength_attenuation(alpha, d);
      if (!(c.r <= c.g && c.g <= c.b)) {
        violations.emplace_back(to_string(t));
        break;
      }
    }
  }
  std::string list;
  for (const auto& name : violations) list += (list.empty() ? "" : ",") + name;
  return {means_ordered && violations.empty(),
          fmt::format("Type III means R {:.4f} G {:.4f} B {:.4f}; C order violated by [{}]",
                      mean[0] / static_cast<double>(v.size() / 3),
                      mean[1] / static_cast<double>(v.size() / 3),
                      mean[2] / static_cast<double>(v.size() / 3), list)};
}

Outcome check_metrics() {
  Rng rng(99);
  std::size_t bad = 0;
  double worst_ssim = 0.0;
  double worst_pcqi = 0.0;
  double worst_combine = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t h = 16 + rng.index(49);
    const std::size_t w = 16 + rng.index(49);
    const ImagePlane x = random_image(rng, h, w);
    bad += metrics::mse(x, x) != 0.0;
    worst_ssim = std::max(worst_ssim, std::abs(metrics::ssim(x, x) - 1.0));
    worst_pcqi = std::max(worst_pcqi, std::abs(metrics::pcqi(x, x) - 1.0));
    const double b = metrics::blur_metric(x);
    bad += !(b >= 0.0 && b <= 1.0);
    const auto u = metrics::uiqm(x);
    worst_combine = std::max(worst_combine,
                             std::abs(u.uiqm - (0.3282 * u.uicm + 0.2953 * u.uism + 3.5753 * u.uiconm)));
  }
  return {bad == 0 && worst_ssim <= 1e-12 && worst_pcqi <= 1e-12 && worst_combine <= 1e-12,
          fmt::format("100 images, {} identity/range failures, |ssim-1| {:.2g}, |pcqi-1| {:.2g}, "
                      "uiqm combination {:.2g}",
                      bad, worst_ssim, worst_pcqi, worst_combine)};
}

double brute_gradient_loss(const Field& a, const Field& b) {
  double total = 0.0;
  for (std::size_t r = 0; r < a.height(); ++r) {
    for (std::size_t c = 0; c < a.width(); ++c) {
      const double ax = c + 1 < a.width() ? a.at(r, c + 1) - a.at(r, c) : 0.0;
      const double bx = c + 1 < b.width() ? b.at(r, c + 1) - b.at(r, c) : 0.0;
      const double ay = r + 1 < a.height() ? a.at(r + 1, c) - a.at(r, c) : 0.0;
      const double by = r + 1 < b.height() ? b.at(r + 1, c) - b.at(r, c) : 0.0;
      total += (ax - bx) * (ax - bx) + (ay - by) * (ay - by);
    }
  }
  return total;
}

Outcome check_losses() {
  Rng rng(7);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    Field a(8, 8);
    Field b(8, 8);
    for (double& v : a.values()) v = rng.uniform(0.0, 1.0);
    for (double& v : b.values()) v = rng.uniform(0.0, 1.0);
    const double ref = brute_gradient_loss(a, b);
    worst = std::max(worst, std::abs(losses::gradient_loss(a, b) - ref) / ref);
  }
  Field a(2, 2, 0.0);
  a.at(0, 1) = 1.0;
  a.at(1, 1) = 1.0;
  const double worked = losses::gradient_loss(a, Field(2, 2, 0.0));
  return {worst <= 1e-12 && worked == 2.0,
          fmt::format("50 maps, worst relative error {:.2g}; 2x2 example = {}", worst, worked)};
}

Outcome check_determinism() {
  TempDir tmp;
  const fs::path src = tmp.path() / "src";
  fs::create_directories(src);
  Rng rng(5);
  for (int k = 0; k < 3; ++k) {
    const std::string id = fmt::format("scene{}", k);
    io::write_image8(src / (id + ".png"), scene_image(rng, 48, 64));
    io::write_depth_png_mm(
        src / (id + ".depth.png"),
        procedural_depth({ProceduralDepth::Kind::HorizontalRamp, 0.5 + k, 3.0 + k}, 48, 64));
  }
  auto synth = [&](const std::string& name, const std::string& threads) {
    std::ostringstream out;
    std::ostringstream err;
    return cli::run({"uwimg", "synth", "--source", src.string(), "-n", "12", "--size", "32",
                     "--seed", "42", "--threads", threads, "--out", (tmp.path() / name).string()},
                    out, err);
  };
  if (synth("a", "1") != 0 || synth("b", "1") != 0 || synth("c", "4") != 0) {
    return {false, "synth command failed"};
  }
  std::size_t differing = 0;
  std::size_t compared = 0;
  std::vector<fs::path> files{kManifestFile};
  for (std::size_t i = 0; i < 12; ++i) files.push_back(fs::path(sample_dir_name(i)) / kMetaFile);
  for (const auto& f : files) {
    const std::string ref = slurp(tmp.path() / "a" / f);
    for (const char* other : {"b", "c"}) {
      ++compared;
      differing += ref.empty() || slurp(tmp.path() / other / f) != ref;
    }
  }
  return {differing == 0,
          fmt::format("{} file comparisons (rerun and 4 threads), {} differ", compared, differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"table", check_table},         {"psnr", check_psnr},
      {"roundtrip", check_roundtrip}, {"colorcast", check_colorcast},
      {"metrics", check_metrics},     {"losses", check_losses},
      {"determinism", check_determinism}};

  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only NAME]\n";
      return 2;
    }
  }

  int failures = 0;
  bool matched = false;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && only != name) continue;
    matched = true;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << fmt::format("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    failures += !o.pass;
  }
  if (!matched) {
    std::cerr << "unknown criterion: " << only << "\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
