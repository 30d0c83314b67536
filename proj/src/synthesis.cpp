#include "uwimg/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "uwimg/image_io.hpp"

namespace uwimg {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config ----------------------------------------------------------------

void SynthesisConfig::validate() const {
  if (water_types.empty()) throw UsageError("water-types: at least one water type is required");
  if (!(depth_range.lo >= 0.0) || !(depth_range.lo <= depth_range.hi)) {
    throw UsageError("depth-range: need 0 <= min <= max");
  }
  if (!(background_range.lo >= 0.0) || !(background_range.lo <= background_range.hi) ||
      !(background_range.hi <= 1.0)) {
    throw UsageError("background-range: need 0 <= min <= max <= 1");
  }
  if (output_height == 0 || output_width == 0) throw UsageError("size: must be positive");
}

json to_json(const SynthesisConfig& config) {
  json types = json::array();
  for (WaterType t : config.water_types) types.push_back(std::string(to_string(t)));
  return json{{"water_types", types},
              {"depth_range", {config.depth_range.lo, config.depth_range.hi}},
              {"background_range", {config.background_range.lo, config.background_range.hi}},
              {"output_size", {config.output_height, config.output_width}},
              {"seed", config.seed},
              {"shared_background", config.shared_background}};
}

namespace {

Range range_from_json(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) {
    throw DataError(fmt::format("{}: expected [min, max]", key));
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

SynthesisConfig synthesis_config_from_json(const json& j) {
  SynthesisConfig config;
  try {
    if (j.contains("water_types")) {
      config.water_types.clear();
      for (const auto& label : j.at("water_types")) {
        const auto type = parse_water_type(label.get<std::string>());
        if (!type) throw DataError("water_types: unknown type " + label.dump());
        config.water_types.push_back(*type);
      }
    }
    if (j.contains("depth_range")) config.depth_range = range_from_json(j["depth_range"], "depth_range");
    if (j.contains("background_range")) {
      config.background_range = range_from_json(j["background_range"], "background_range");
    }
    if (j.contains("output_size")) {
      config.output_height = j["output_size"].at(0).get<std::size_t>();
      config.output_width = j["output_size"].at(1).get<std::size_t>();
    }
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("shared_background")) config.shared_background = j["shared_background"].get<bool>();
  } catch (const json::exception& e) {
    throw DataError(std::string("synthesis config: ") + e.what());
  }
  return config;
}

// ---- sampling --------------------------------------------------------------

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::size_t Rng::index(std::size_t n) {
  // Slight modulo bias is irrelevant for n of a handful of water types.
  return static_cast<std::size_t>(engine_() % n);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_child_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ index);
}

SceneParams sample_scene_params(Rng& rng, const SynthesisConfig& config) {
  SceneParams p;
  p.water_type = config.water_types[rng.index(config.water_types.size())];
  p.water_depth = rng.uniform(config.depth_range.lo, config.depth_range.hi);
  if (config.shared_background) {
    p.background = ChannelTriple::uniform(
        rng.uniform(config.background_range.lo, config.background_range.hi));
  } else {
    for (std::size_t ch = 0; ch < 3; ++ch) {
      p.background[ch] = rng.uniform(config.background_range.lo, config.background_range.hi);
    }
  }
  return p;
}

// ---- metadata --------------------------------------------------------------

json to_json(const SceneMeta& meta) {
  return json{{"water_type", std::string(to_string(meta.water_type))},
              {"D", meta.water_depth},
              {"C", {meta.attenuation.r, meta.attenuation.g, meta.attenuation.b}},
              {"B", {meta.background.r, meta.background.g, meta.background.b}},
              {"seed", meta.seed},
              {"source", meta.source}};
}

namespace {

ChannelTriple triple_from_json(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw DataError(fmt::format("{}: expected [r, g, b]", key));
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

SceneMeta scene_meta_from_json(const json& j) {
  try {
    SceneMeta meta;
    const auto label = j.at("water_type").get<std::string>();
    const auto type = parse_water_type(label);
    if (!type) throw DataError("unknown water_type " + label);
    meta.water_type = *type;
    meta.water_depth = j.at("D").get<double>();
    meta.attenuation = triple_from_json(j, "C");
    meta.background = triple_from_json(j, "B");
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.source = j.value("source", std::string{});
    return meta;
  } catch (const json::exception& e) {
    throw DataError(std::string("scene meta: ") + e.what());
  }
}

SceneMeta read_meta(const fs::path& meta_path) {
  std::ifstream in(meta_path);
  if (!in) throw IoError("cannot open " + meta_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("cannot parse " + meta_path.string() + ": " + e.what());
  }
  try {
    return scene_meta_from_json(j);
  } catch (const DataError& e) {
    throw DataError(meta_path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

// ---- synthesis -------------------------------------------------------------

SceneSample synthesize_sample(const ImagePlane& clean, const DepthMap& depth,
                              WaterType water_type, double water_depth,
                              const ChannelTriple& background, const SynthesisOptions& options) {
  require_same_shape(clean, depth, "synthesize_sample");
  const IopTriple iop = iop_lookup(water_type);

  SceneSample s;
  s.clean = options.storage_exact ? io::quantize8(clean) : clean;
  s.attenuation = wavelength_attenuation(iop.alpha, water_depth);
  s.background = background;
  s.transmission = transmission_from_depth(iop.beta, depth);
  if (options.storage_exact) {
    for (double& t : s.transmission.values()) t = io::quantize16(t);
  }
  s.degraded = degrade(s.clean, s.params());
  s.meta.water_type = water_type;
  s.meta.water_depth = water_depth;
  s.meta.attenuation = s.attenuation;
  s.meta.background = background;
  return s;
}

ProceduralDepth ProceduralDepth::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("depth spec '" + spec + "': expected KIND:ARGS");
  const std::string kind = spec.substr(0, colon);
  std::istringstream args(spec.substr(colon + 1));
  ProceduralDepth p;
  char comma = 0;
  if (kind == "const") {
    p.kind = Kind::Constant;
    args >> p.a;
    p.b = p.a;
  } else if (kind == "hramp" || kind == "vramp") {
    p.kind = kind == "hramp" ? Kind::HorizontalRamp : Kind::VerticalRamp;
    args >> p.a >> comma >> p.b;
    if (comma != ',') throw UsageError("depth spec '" + spec + "': expected A,B");
  } else {
    throw UsageError("depth spec '" + spec + "': unknown kind " + kind);
  }
  if (args.fail() || !(args >> std::ws).eof()) {
    throw UsageError("depth spec '" + spec + "': malformed numbers");
  }
  return p;
}

DepthMap procedural_depth(const ProceduralDepth& spec, std::size_t height, std::size_t width) {
  if (!(spec.a >= 0.0) || !(spec.b >= 0.0)) throw DomainError("procedural depth must be >= 0");
  if (spec.kind != ProceduralDepth::Kind::Constant && spec.a > spec.b) {
    throw DomainError("procedural depth ramp needs start <= end");
  }
  DepthMap d(height, width);
  const auto lerp = [&](std::size_t i, std::size_t n) {
    return n == 1 ? spec.a
                  : spec.a + (spec.b - spec.a) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      switch (spec.kind) {
        case ProceduralDepth::Kind::Constant: d.at(r, c) = spec.a; break;
        case ProceduralDepth::Kind::HorizontalRamp: d.at(r, c) = lerp(c, width); break;
        case ProceduralDepth::Kind::VerticalRamp: d.at(r, c) = lerp(r, height); break;
      }
    }
  }
  return d;
}

// ---- dataset ---------------------------------------------------------------

std::vector<RgbdSource> load_sources(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("source directory not found: " + dir.string());
  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto& p = entry.path();
    const std::string name = p.filename().string();
    if (p.extension() == ".png" && !name.ends_with(".depth.png")) images.push_back(p);
  }
  std::sort(images.begin(), images.end());

  std::vector<RgbdSource> sources;
  for (const auto& img : images) {
    const std::string stem = img.stem().string();
    fs::path depth_path = dir / (stem + ".depth.png");
    if (!fs::exists(depth_path)) depth_path = dir / (stem + ".pfm");
    if (!fs::exists(depth_path)) {
      throw DataError("no depth map (" + stem + ".depth.png or " + stem + ".pfm) for " +
                      img.string());
    }
    RgbdSource src{stem, io::read_image(img), io::read_depth(depth_path)};
    require_same_shape(src.image, src.depth, img.string().c_str());
    sources.push_back(std::move(src));
  }
  return sources;
}

std::string sample_dir_name(std::size_t index) { return fmt::format("sample_{:06d}", index); }

void write_sample(const fs::path& dir, const SceneSample& sample) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  io::write_image8(dir / kCleanFile, sample.clean);
  io::write_image8(dir / kDegradedFile, sample.degraded);
  io::write_transmission16(dir / kTransmissionFile, sample.transmission);
  write_json_file(dir / kMetaFile, to_json(sample.meta));
}

SceneSample read_sample(const fs::path& dir) {
  SceneSample s;
  s.meta = read_meta(dir / kMetaFile);
  s.clean = io::read_image(dir / kCleanFile);
  s.degraded = io::read_image(dir / kDegradedFile);
  s.transmission = io::read_transmission16(dir / kTransmissionFile);
  s.attenuation = s.meta.attenuation;
  s.background = s.meta.background;
  require_same_shape(s.clean, s.degraded, dir.string().c_str());
  require_same_shape(s.clean, s.transmission, dir.string().c_str());
  return s;
}

std::vector<SampleRecord> generate_dataset(std::span<const RgbdSource> sources, std::size_t n,
                                           const SynthesisConfig& config, const fs::path& out_dir,
                                           std::size_t threads) {
  config.validate();
  if (sources.empty()) throw UsageError("source: no image/depth pairs found");
  if (n == 0) throw UsageError("count: must be >= 1");

  // Resize each source once; samples only differ in the drawn parameters.
  std::vector<std::pair<ImagePlane, DepthMap>> resized;
  resized.reserve(sources.size());
  for (const auto& src : sources) {
    require_same_shape(src.image, src.depth, src.id.c_str());
    resized.emplace_back(io::resize_bilinear(src.image, config.output_height, config.output_width),
                         io::resize_bilinear(src.depth, config.output_height, config.output_width));
  }

  std::vector<SampleRecord> records(n);
  const auto make_one = [&](std::size_t i) {
    const std::size_t which = i % sources.size();
    const std::uint64_t seed = derive_child_seed(config.seed, i);
    Rng rng(seed);
    const SceneParams p = sample_scene_params(rng, config);
    SceneSample s = synthesize_sample(resized[which].first, resized[which].second, p.water_type,
                                      p.water_depth, p.background, {.storage_exact = true});
    s.meta.seed = seed;
    s.meta.source = sources[which].id;
    const std::string name = sample_dir_name(i);
    write_sample(out_dir / name, s);
    records[i] = {name, s.meta};
  };

  threads = std::clamp<std::size_t>(threads, 1, n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) make_one(i);
    return records;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            make_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

json make_manifest(const SynthesisConfig& config, std::span<const SampleRecord> records) {
  json samples = json::array();
  for (const auto& rec : records) {
    json entry = to_json(rec.meta);
    entry["dir"] = rec.dir;
    samples.push_back(std::move(entry));
  }
  return json{{"config", to_json(config)}, {"count", records.size()}, {"samples", samples}};
}

}  // namespace uwimg
