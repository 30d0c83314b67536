#include "uwimg/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "uwimg/errors.hpp"
#include "uwimg/formation.hpp"
#include "uwimg/image_io.hpp"
#include "uwimg/metrics.hpp"
#include "uwimg/synthesis.hpp"
#include "uwimg/water_types.hpp"

namespace uwimg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads {"subcommand": {"flag-name": value, ...}} so every flag has a config
// file equivalent; CLI11 applies these only to flags absent from the command line.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, "", {}, items);
    return items;
  }

 private:
  static void flatten(const json& j, const std::string& name, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    if (j.is_object()) {
      if (!name.empty()) parents.push_back(name);
      for (const auto& [key, value] : j.items()) flatten(value, key, parents, items);
      return;
    }
    CLI::ConfigItem item;
    item.name = name;
    item.parents = std::move(parents);
    if (j.is_string()) {
      item.inputs = {j.get<std::string>()};
    } else if (j.is_boolean()) {
      item.inputs = {j.get<bool>() ? "true" : "false"};
    } else if (j.is_number()) {
      item.inputs = {j.dump()};
    } else if (j.is_array()) {
      for (const auto& v : j) item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      throw CLI::ConversionError("unsupported config value for " + name);
    }
    items.push_back(std::move(item));
  }
};

std::vector<double> parse_numbers(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--{}: '{}' is not a number", flag, item));
    }
  }
  return values;
}

ChannelTriple parse_triple(const std::string& text, const std::string& flag) {
  const auto v = parse_numbers(text, flag);
  if (v.size() == 1) return ChannelTriple::uniform(v[0]);
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw UsageError(fmt::format("--{}: expected one value or r,g,b", flag));
}

Range parse_range(const std::string& text, const std::string& flag) {
  const auto v = parse_numbers(text, flag);
  if (v.size() != 2) throw UsageError(fmt::format("--{}: expected MIN,MAX", flag));
  return {v[0], v[1]};
}

std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) {
      const auto s = std::stoul(text);
      return {s, s};
    }
    return {std::stoul(text.substr(0, x)), std::stoul(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw UsageError("--size: expected N or HxW, got '" + text + "'");
  }
}

void require_unit_triple(const ChannelTriple& t, const std::string& flag) {
  for (std::size_t ch = 0; ch < 3; ++ch) {
    if (!(t[ch] >= 0.0 && t[ch] <= 1.0)) {
      throw UsageError(fmt::format("--{}: components must lie in [0,1]", flag));
    }
  }
}

WaterType parse_type_flag(const std::string& label, const std::string& flag) {
  const auto t = parse_water_type(label);
  if (!t) {
    throw UsageError(fmt::format("--{}: unknown water type '{}' (expected I, IA, IB, II, III, "
                                 "1C, 3C, 5C, 7C or 9C)",
                                 flag, label));
  }
  return *t;
}

std::vector<WaterType> parse_type_list(const std::string& text) {
  std::vector<WaterType> types;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) types.push_back(parse_type_flag(item, "water-types"));
  return types;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
}

// ---- table -----------------------------------------------------------------

void cmd_table(const std::string& format, std::ostream& out) {
  if (format == "csv") {
    out << "water_type,alpha_650,alpha_525,alpha_450,beta_650,beta_525,beta_450\n";
    for (WaterType t : kAllWaterTypes) {
      const auto iop = iop_lookup(t);
      fmt::print(out, "{},{},{},{},{},{},{}\n", to_string(t), iop.alpha.r, iop.alpha.g,
                 iop.alpha.b, iop.beta.r, iop.beta.g, iop.beta.b);
    }
    return;
  }
  fmt::print(out, "{:<6}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}\n", "type", "a650", "a525", "a450",
             "b650", "b525", "b450");
  for (WaterType t : kAllWaterTypes) {
    const auto iop = iop_lookup(t);
    fmt::print(out, "{:<6}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}\n", to_string(t), iop.alpha.r,
               iop.alpha.g, iop.alpha.b, iop.beta.r, iop.beta.g, iop.beta.b);
  }
  out << "(coefficients in 1/m)\n";
}

// ---- degrade ---------------------------------------------------------------

struct DegradeArgs {
  std::string clean;
  std::string depth;
  std::string depth_spec;
  std::string water_type;
  double water_depth = 0.0;
  std::string background = "1";
  std::string size;
  std::string out;
};

void cmd_degrade(const DegradeArgs& a, std::ostream& err) {
  if (a.depth.empty() == a.depth_spec.empty()) {
    throw UsageError("--depth / --depth-spec: give exactly one depth source");
  }
  const WaterType type = parse_type_flag(a.water_type, "water-type");
  if (!(a.water_depth >= 0.0) || !std::isfinite(a.water_depth)) {
    throw UsageError("--water-depth: must be >= 0");
  }
  const ChannelTriple background = parse_triple(a.background, "background");
  require_unit_triple(background, "background");

  ImagePlane clean = io::read_image(a.clean);
  DepthMap depth;
  if (!a.depth.empty()) {
    depth = io::read_depth(a.depth);
    require_same_shape(clean, depth, "degrade");
  } else {
    ProceduralDepth spec = ProceduralDepth::parse(a.depth_spec);
    if (!(spec.a >= 0.0 && spec.b >= 0.0) ||
        (spec.kind != ProceduralDepth::Kind::Constant && spec.a > spec.b)) {
      throw UsageError("--depth-spec: values must be >= 0 with start <= end");
    }
    depth = procedural_depth(spec, clean.height(), clean.width());
  }
  if (!a.size.empty()) {
    const auto [h, w] = parse_size(a.size);
    clean = io::resize_bilinear(clean, h, w);
    depth = io::resize_bilinear(depth, h, w);
  }

  SceneSample s = synthesize_sample(clean, depth, type, a.water_depth, background,
                                    {.storage_exact = true});
  s.meta.source = fs::path(a.clean).stem().string();
  write_sample(a.out, s);
  fmt::print(err, "degrade: wrote {} ({}x{}, type {}, D={} m)\n", a.out, s.clean.height(),
             s.clean.width(), to_string(type), a.water_depth);
}

// ---- restore ---------------------------------------------------------------

struct RestoreArgs {
  std::string degraded;
  std::string meta;
  std::string trans;
  std::string attenuation;
  std::string background;
  std::optional<double> uniform_t;
  std::string out;
  bool no_clamp = false;
  double t_min = kDefaultTransmissionFloor;
  std::string reference;
  std::string report;
};

void cmd_restore(const RestoreArgs& a, std::ostream& err) {
  const ImagePlane observed = io::read_image(a.degraded);

  std::optional<ChannelTriple> attenuation;
  std::optional<ChannelTriple> background;
  fs::path trans_path = a.trans;
  if (!a.meta.empty()) {
    const SceneMeta meta = read_meta(a.meta);
    attenuation = meta.attenuation;
    background = meta.background;
    if (trans_path.empty() && !a.uniform_t) {
      trans_path = fs::path(a.meta).parent_path() / kTransmissionFile;
    }
  }
  if (!a.attenuation.empty()) attenuation = parse_triple(a.attenuation, "attenuation");
  if (!a.background.empty()) background = parse_triple(a.background, "background");
  if (!attenuation || !background || (trans_path.empty() && !a.uniform_t)) {
    throw UsageError("restore needs --meta or all of --attenuation, --background and "
                     "--trans/--transmission");
  }
  for (std::size_t ch = 0; ch < 3; ++ch) {
    if (!((*attenuation)[ch] > 0.0)) throw UsageError("--attenuation: components must be > 0");
  }
  if (!(a.t_min > 0.0 && a.t_min <= 1.0)) throw UsageError("--t-min: must lie in (0,1]");

  TransmissionMap t;
  if (a.uniform_t) {
    if (!(*a.uniform_t > 0.0 && *a.uniform_t <= 1.0)) {
      throw UsageError("--transmission: must lie in (0,1]");
    }
    t = TransmissionMap(observed.height(), observed.width(), *a.uniform_t);
  } else {
    t = io::read_transmission16(trans_path);
  }

  const RestorationParams params{*attenuation, *background, std::move(t)};
  const std::size_t floored = count_floored(params.transmission, a.t_min);
  const ImagePlane restored =
      restore(observed, params, {.transmission_floor = a.t_min, .clamp = !a.no_clamp});
  if (floored > 0) {
    fmt::print(err, "restore: transmission floored at {} for {} of {} samples\n", a.t_min,
               floored, params.transmission.values().size());
  }
  if (a.no_clamp) {
    const auto v = restored.values();
    const auto outside = std::count_if(v.begin(), v.end(), [](double x) { return x < 0.0 || x > 1.0; });
    fmt::print(err, "restore: {} values outside [0,1] (saturated in the 8-bit output)\n", outside);
  }
  io::write_image8(a.out, restored);

  if (!a.report.empty()) {
    std::optional<ImagePlane> ref;
    if (!a.reference.empty()) ref = io::read_image(a.reference);
    const auto report = metrics::evaluate(restored, ref ? &*ref : nullptr);
    write_text(a.report, metrics::to_json(report).dump(2) + "\n");
  }
  fmt::print(err, "restore: wrote {}\n", a.out);
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string source;
  std::size_t count = 1;
  std::string out;
  std::string water_types = "II,III,1C,3C";
  std::string depth_range = "2,10";
  std::string background_range = "0.5,1";
  std::string size = "256";
  std::uint64_t seed = 0;
  bool shared_background = false;
  std::size_t threads = 1;
};

void cmd_synth(const SynthArgs& a, std::ostream& err) {
  SynthesisConfig config;
  config.water_types = parse_type_list(a.water_types);
  config.depth_range = parse_range(a.depth_range, "depth-range");
  config.background_range = parse_range(a.background_range, "background-range");
  std::tie(config.output_height, config.output_width) = parse_size(a.size);
  config.seed = a.seed;
  config.shared_background = a.shared_background;
  config.validate();
  if (a.count == 0) throw UsageError("--count: must be >= 1");

  const auto sources = load_sources(a.source);
  if (sources.empty()) throw UsageError("--source: no NAME.png + depth pairs in " + a.source);

  ensure_directory(a.out);
  const auto records = generate_dataset(sources, a.count, config, a.out, a.threads);
  write_json_file(fs::path(a.out) / kManifestFile, make_manifest(config, records));
  fmt::print(err, "synth: wrote {} samples from {} sources to {}\n", records.size(),
             sources.size(), a.out);
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> images;
  std::vector<std::string> refs;
  std::string dataset;
  std::string metrics = "all";
  std::string format = "csv";
  std::string out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (a.images.empty()) throw UsageError("eval: no input images");
  if (!a.refs.empty() && a.refs.size() != a.images.size()) {
    throw UsageError("--ref: give one reference per image");
  }
  if (!a.refs.empty() && !a.dataset.empty()) throw UsageError("--ref and --dataset are exclusive");
  const auto selection = metrics::MetricSelection::parse(a.metrics);

  std::ostringstream csv;
  json rows = json::array();
  csv << metrics::csv_header() << '\n';
  int status = kSuccess;

  for (std::size_t i = 0; i < a.images.size(); ++i) {
    const fs::path image_path = a.images[i];
    fs::path ref_path;
    if (!a.refs.empty()) ref_path = a.refs[i];
    if (!a.dataset.empty()) ref_path = fs::path(a.dataset) / image_path.stem() / kCleanFile;
    const std::string name = image_path.stem().string();

    json row{{"name", name}};
    try {
      const ImagePlane image = io::read_image(image_path);
      std::optional<ImagePlane> ref;
      if (!ref_path.empty()) ref = io::read_image(ref_path);
      const auto report = metrics::evaluate(image, ref ? &*ref : nullptr, selection);
      csv << metrics::csv_row(name, report) << '\n';
      row["metrics"] = metrics::to_json(report);
    } catch (const ShapeError& e) {
      fmt::print(err, "eval: {}: {}\n", name, e.what());
      csv << metrics::csv_row(name, {}) << '\n';
      row["error"] = e.what();
      status = std::max<int>(status, kData);
    } catch (const DomainError& e) {
      fmt::print(err, "eval: {}: {}\n", name, e.what());
      csv << metrics::csv_row(name, {}) << '\n';
      row["error"] = e.what();
      status = std::max<int>(status, kData);
    }
    rows.push_back(std::move(row));
  }

  const std::string text = a.format == "json" ? rows.dump(2) + "\n" : csv.str();
  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
  }
  return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Underwater image synthesis, restoration and quality metrics"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with per-subcommand flag defaults");

  std::string table_format = "text";
  auto* table = app.add_subcommand("table", "Print the Jerlov absorption/scattering table");
  table->add_option("--format", table_format)->check(CLI::IsMember({"text", "csv"}));

  DegradeArgs dg;
  auto* degrade_cmd = app.add_subcommand("degrade", "Degrade one clean image");
  degrade_cmd->add_option("--clean", dg.clean, "Clean RGB PNG")->required();
  degrade_cmd->add_option("--depth", dg.depth, "Scene depth: 16-bit PNG in mm, or PFM in m");
  degrade_cmd->add_option("--depth-spec", dg.depth_spec,
                          "Procedural depth: const:C | hramp:A,B | vramp:A,B (meters)");
  degrade_cmd->add_option("--water-type", dg.water_type, "Jerlov type")->required();
  degrade_cmd->add_option("--water-depth,-D", dg.water_depth, "Water depth D in meters")->required();
  degrade_cmd->add_option("--background,-B", dg.background, "Background light: v or r,g,b");
  degrade_cmd->add_option("--size", dg.size, "Resize to N or HxW first");
  degrade_cmd->add_option("--out", dg.out, "Output sample directory")->required();

  RestoreArgs rs;
  auto* restore_cmd = app.add_subcommand("restore", "Invert the formation model");
  restore_cmd->add_option("--degraded", rs.degraded, "Observed RGB PNG")->required();
  restore_cmd->add_option("--meta", rs.meta, "meta.json with C and B (trans.png alongside)");
  restore_cmd->add_option("--trans", rs.trans, "16-bit transmission PNG");
  restore_cmd->add_option("--attenuation,-C", rs.attenuation, "Attenuation: v or r,g,b");
  restore_cmd->add_option("--background,-B", rs.background, "Background light: v or r,g,b");
  restore_cmd->add_option("--transmission,-T", rs.uniform_t, "Uniform transmission");
  restore_cmd->add_option("--out", rs.out, "Restored PNG")->required();
  restore_cmd->add_flag("--no-clamp", rs.no_clamp, "Keep values outside [0,1] for reporting");
  restore_cmd->add_option("--t-min", rs.t_min, "Transmission floor");
  restore_cmd->add_option("--reference", rs.reference, "Clean reference for --report");
  restore_cmd->add_option("--report", rs.report, "Write a metric report (JSON)");

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--source", sy.source, "Directory of NAME.png + NAME.depth.png|NAME.pfm")
      ->required();
  synth_cmd->add_option("--count,-n", sy.count, "Number of samples")->required();
  synth_cmd->add_option("--out", sy.out, "Output directory")->required();
  synth_cmd->add_option("--water-types", sy.water_types, "Comma list of Jerlov types");
  synth_cmd->add_option("--depth-range", sy.depth_range, "Water depth MIN,MAX (m)");
  synth_cmd->add_option("--background-range", sy.background_range, "Background MIN,MAX");
  synth_cmd->add_option("--size", sy.size, "Output N or HxW");
  synth_cmd->add_option("--seed", sy.seed, "Master seed");
  synth_cmd->add_flag("--shared-background", sy.shared_background,
                      "One background scalar for all channels");
  synth_cmd->add_option("--threads", sy.threads, "Worker threads");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score images");
  eval_cmd->add_option("images", ev.images, "Images to score")->required();
  eval_cmd->add_option("--ref", ev.refs, "Reference per image (full-reference metrics)");
  eval_cmd->add_option("--dataset", ev.dataset, "Use DATASET/<stem>/clean.png as reference");
  eval_cmd->add_option("--metrics", ev.metrics, "Comma list: mse,psnr,ssim,pcqi,blur,uiqm|all");
  eval_cmd->add_option("--format", ev.format)->check(CLI::IsMember({"csv", "json"}));
  eval_cmd->add_option("--out", ev.out, "Write the report here instead of stdout");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*table) cmd_table(table_format, out);
    if (*degrade_cmd) cmd_degrade(dg, err);
    if (*restore_cmd) cmd_restore(rs, err);
    if (*synth_cmd) cmd_synth(sy, err);
    if (*eval_cmd) return cmd_eval(ev, out, err);
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const IoError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kIo;
  } catch (const DataError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kData;
  } catch (const DomainError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kData;
  }
  return kSuccess;
}

}  // namespace uwimg::cli
