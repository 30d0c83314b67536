#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace uwimg {

/// Three per-channel scalars in R, G, B order. R, G and B sample the
/// spectrum at 650 nm, 525 nm and 450 nm respectively.
struct ChannelTriple {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  double operator[](std::size_t ch) const { return ch == 0 ? r : (ch == 1 ? g : b); }
  double& operator[](std::size_t ch) { return ch == 0 ? r : (ch == 1 ? g : b); }
  bool operator==(const ChannelTriple&) const = default;

  static constexpr ChannelTriple uniform(double v) { return {v, v, v}; }
};

inline constexpr std::array<int, 3> kChannelWavelengthsNm{650, 525, 450};

/// Jerlov optical water classes: open ocean I..III, coastal 1C..9C.
enum class WaterType { I, IA, IB, II, III, C1, C3, C5, C7, C9 };

inline constexpr std::array<WaterType, 10> kAllWaterTypes{
    WaterType::I,   WaterType::IA, WaterType::IB, WaterType::II, WaterType::III,
    WaterType::C1, WaterType::C3, WaterType::C5, WaterType::C7, WaterType::C9};

/// Canonical label as printed in the Jerlov tables ("I", "IA", ..., "9C").
std::string_view to_string(WaterType type);
std::optional<WaterType> parse_water_type(std::string_view label);

/// Absorption (alpha) and scattering (beta) coefficients in 1/m.
struct IopTriple {
  ChannelTriple alpha;
  ChannelTriple beta;
};

IopTriple iop_lookup(WaterType type);

}  // namespace uwimg
