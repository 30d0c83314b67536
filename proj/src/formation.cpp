#include "uwimg/formation.hpp"

#include <algorithm>
#include <cmath>

namespace uwimg {

namespace {

void require_nonnegative(const ChannelTriple& t, const char* what) {
  for (std::size_t ch = 0; ch < 3; ++ch) {
    if (!(t[ch] >= 0.0) || !std::isfinite(t[ch])) {
      throw DomainError(std::string(what) + " components must be finite and >= 0");
    }
  }
}

}  // namespace

ChannelTriple wavelength_attenuation(const ChannelTriple& alpha, double water_depth) {
  if (!(water_depth >= 0.0) || !std::isfinite(water_depth)) {
    throw DomainError("water depth must be finite and >= 0");
  }
  require_nonnegative(alpha, "absorption");
  return {std::exp(-alpha.r * water_depth), std::exp(-alpha.g * water_depth),
          std::exp(-alpha.b * water_depth)};
}

TransmissionMap transmission_from_depth(const ChannelTriple& beta, const DepthMap& depth) {
  require_nonnegative(beta, "scattering");
  TransmissionMap t(depth.height(), depth.width());
  for (std::size_t r = 0; r < depth.height(); ++r) {
    for (std::size_t c = 0; c < depth.width(); ++c) {
      const double d = depth.at(r, c);
      if (!(d >= 0.0) || !std::isfinite(d)) {
        throw DomainError("scene depth must be finite and >= 0");
      }
      for (std::size_t ch = 0; ch < 3; ++ch) t.at(r, c, ch) = std::exp(-beta[ch] * d);
    }
  }
  return t;
}

ImagePlane object_irradiance(const ImagePlane& e_in, const ChannelTriple& attenuation) {
  ImagePlane out = e_in;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= attenuation[i % 3];
  return out;
}

ImagePlane degrade(const ImagePlane& e_in, const RestorationParams& params) {
  require_same_shape(e_in, params.transmission, "degrade");
  const auto src = e_in.values();
  const auto t = params.transmission.values();
  ImagePlane out(e_in.height(), e_in.width());
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::size_t ch = i % 3;
    dst[i] = (src[i] * params.attenuation[ch]) * t[i] + (1.0 - t[i]) * params.background[ch];
  }
  return out;
}

ImagePlane restore(const ImagePlane& observed, const RestorationParams& params,
                   const RestoreOptions& options) {
  require_same_shape(observed, params.transmission, "restore");
  for (std::size_t ch = 0; ch < 3; ++ch) {
    if (!(params.attenuation[ch] > 0.0)) {
      throw DomainError("wavelength attenuation components must be > 0");
    }
  }
  const auto src = observed.values();
  const auto t = params.transmission.values();
  ImagePlane out(observed.height(), observed.width());
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::size_t ch = i % 3;
    const double tt = std::max(t[i], options.transmission_floor);
    dst[i] = (src[i] - params.background[ch] * (1.0 - tt)) / (params.attenuation[ch] * tt);
  }
  if (options.clamp) clamp_unit(out);
  return out;
}

std::size_t count_floored(const TransmissionMap& transmission, double floor) {
  const auto t = transmission.values();
  return static_cast<std::size_t>(
      std::count_if(t.begin(), t.end(), [floor](double v) { return v < floor; }));
}

void clamp_unit(ImagePlane& image) {
  for (double& v : image.values()) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace uwimg
