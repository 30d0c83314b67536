#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "uwimg/formation.hpp"
#include "uwimg/raster.hpp"
#include "uwimg/water_types.hpp"

namespace uwimg {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SynthesisConfig {
  std::vector<WaterType> water_types{WaterType::II, WaterType::III, WaterType::C1,
                                     WaterType::C3};
  Range depth_range{2.0, 10.0};       // water depth D, meters
  Range background_range{0.5, 1.0};  // B per channel
  std::size_t output_height = 256;
  std::size_t output_width = 256;
  std::uint64_t seed = 0;
  /// Draw one background scalar and replicate it instead of one per channel.
  bool shared_background = false;

  /// Throws UsageError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const SynthesisConfig& config);
SynthesisConfig synthesis_config_from_json(const nlohmann::json& j);

/// Seedable generator. Uniform draws use the top 53 bits of a 64-bit
/// Mersenne Twister, so sequences are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [lo, hi); exactly lo when lo == hi.
  double uniform(double lo, double hi);
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Child seed for sample `index` under `master`; independent of generation order.
std::uint64_t derive_child_seed(std::uint64_t master, std::uint64_t index);

struct SceneParams {
  WaterType water_type = WaterType::I;
  double water_depth = 0.0;
  ChannelTriple background;
};

SceneParams sample_scene_params(Rng& rng, const SynthesisConfig& config);

struct SceneMeta {
  WaterType water_type = WaterType::I;
  double water_depth = 0.0;
  ChannelTriple attenuation;
  ChannelTriple background;
  std::uint64_t seed = 0;
  std::string source;

  bool operator==(const SceneMeta&) const = default;
};

nlohmann::json to_json(const SceneMeta& meta);
/// Throws DataError on missing keys or wrong types.
SceneMeta scene_meta_from_json(const nlohmann::json& j);

struct SceneSample {
  ImagePlane clean;
  ImagePlane degraded;
  TransmissionMap transmission;
  ChannelTriple attenuation;
  ChannelTriple background;
  SceneMeta meta;

  RestorationParams params() const { return {attenuation, background, transmission}; }
};

struct SynthesisOptions {
  /// Snap clean to 8 bits and T to 16 bits before degrading, so the written
  /// files reproduce the degraded image up to its own 8-bit rounding.
  bool storage_exact = false;
};

SceneSample synthesize_sample(const ImagePlane& clean, const DepthMap& depth,
                              WaterType water_type, double water_depth,
                              const ChannelTriple& background,
                              const SynthesisOptions& options = {});

struct ProceduralDepth {
  enum class Kind { Constant, HorizontalRamp, VerticalRamp };
  Kind kind = Kind::Constant;
  double a = 0.0;  // constant value, or ramp start
  double b = 0.0;  // ramp end

  /// Parses "const:C", "hramp:A,B" or "vramp:A,B".
  static ProceduralDepth parse(const std::string& spec);
};

DepthMap procedural_depth(const ProceduralDepth& spec, std::size_t height, std::size_t width);

// ---- dataset ---------------------------------------------------------------

struct RgbdSource {
  std::string id;
  ImagePlane image;
  DepthMap depth;
};

/// Source pairs in `dir`: NAME.png with NAME.depth.png (16-bit mm) or NAME.pfm.
/// Sorted by name; throws DataError for an image without depth.
std::vector<RgbdSource> load_sources(const std::filesystem::path& dir);

inline constexpr const char* kCleanFile = "clean.png";
inline constexpr const char* kDegradedFile = "degraded.png";
inline constexpr const char* kTransmissionFile = "trans.png";
inline constexpr const char* kMetaFile = "meta.json";
inline constexpr const char* kManifestFile = "manifest.json";

std::string sample_dir_name(std::size_t index);

void write_sample(const std::filesystem::path& dir, const SceneSample& sample);
/// Reads the on-disk tuple back; clean and degraded are the stored 8-bit values.
SceneSample read_sample(const std::filesystem::path& dir);

SceneMeta read_meta(const std::filesystem::path& meta_path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

struct SampleRecord {
  std::string dir;
  SceneMeta meta;
};

/// Writes n samples under out_dir; sample i uses source i % sources.size().
/// Samples are distributed over `threads` workers; output does not depend on it.
std::vector<SampleRecord> generate_dataset(std::span<const RgbdSource> sources, std::size_t n,
                                           const SynthesisConfig& config,
                                           const std::filesystem::path& out_dir,
                                           std::size_t threads = 1);

nlohmann::json make_manifest(const SynthesisConfig& config,
                             std::span<const SampleRecord> records);

}  // namespace uwimg
