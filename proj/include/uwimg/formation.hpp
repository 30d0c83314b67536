#pragma once

#include <cstddef>

#include "uwimg/raster.hpp"
#include "uwimg/water_types.hpp"

namespace uwimg {

/// Floor applied to the transmission before dividing in restore().
inline constexpr double kDefaultTransmissionFloor = 1e-3;

struct RestorationParams {
  ChannelTriple attenuation;  // C, per channel in (0,1]
  ChannelTriple background;   // B, per channel in [0,1]
  TransmissionMap transmission;
};

struct RestoreOptions {
  double transmission_floor = kDefaultTransmissionFloor;
  bool clamp = true;
};

/// C = exp(-alpha * water_depth), water_depth being the surface-object path in meters.
ChannelTriple wavelength_attenuation(const ChannelTriple& alpha, double water_depth);

/// T(x) = exp(-beta * d(x)) per channel.
TransmissionMap transmission_from_depth(const ChannelTriple& beta, const DepthMap& depth);

/// J = E_in * C (unit reflectance).
ImagePlane object_irradiance(const ImagePlane& e_in, const ChannelTriple& attenuation);

/// I = (E_in * C) * T + (1 - T) * B.
ImagePlane degrade(const ImagePlane& e_in, const RestorationParams& params);

/// E = (I - B * (1 - T)) / (C * T), with T floored at options.transmission_floor.
ImagePlane restore(const ImagePlane& observed, const RestorationParams& params,
                   const RestoreOptions& options = {});

/// Number of (pixel, channel) transmission samples below the floor.
std::size_t count_floored(const TransmissionMap& transmission,
                          double floor = kDefaultTransmissionFloor);

/// Clamps every intensity into [0,1].
void clamp_unit(ImagePlane& image);

}  // namespace uwimg
