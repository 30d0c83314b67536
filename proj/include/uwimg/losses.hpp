#pragma once

#include <span>

#include "uwimg/raster.hpp"

namespace uwimg::losses {

/// Forward differences; the last column of gx and the last row of gy are zero.
struct GradientPair {
  Field gx;
  Field gy;
};

GradientPair gradients(const Field& m);

/// How each per-pixel gradient difference enters the gradient loss.
enum class GradientNorm {
  Squared,   // sum of squared differences (default)
  Absolute,  // sum of absolute differences
};

/// Sum over pixels and channels of the horizontal and vertical gradient differences.
double gradient_loss(const TransmissionMap& t_hat, const TransmissionMap& t,
                     GradientNorm norm = GradientNorm::Squared);
double gradient_loss(const Field& t_hat, const Field& t,
                     GradientNorm norm = GradientNorm::Squared);

/// Mean absolute difference on the [0,1] scale.
double l1_pixel(const ImagePlane& a, const ImagePlane& b);
double l1_mean(std::span<const double> a, std::span<const double> b);

/// Gradient loss plus mean absolute difference of the maps.
double transmission_objective(const TransmissionMap& t_hat, const TransmissionMap& t,
                              GradientNorm norm = GradientNorm::Squared);
double transmission_objective(const Field& t_hat, const Field& t,
                              GradientNorm norm = GradientNorm::Squared);

/// Mean absolute difference of the concatenated (attenuation, background) 6-vectors.
double cb_loss(std::span<const double> pred, std::span<const double> truth);

}  // namespace uwimg::losses
