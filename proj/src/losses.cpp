#include "uwimg/losses.hpp"

#include <cmath>
#include <string>

namespace uwimg::losses {

namespace {

template <std::size_t C, class Tag>
double gradient_loss_impl(const Raster<C, Tag>& a, const Raster<C, Tag>& b, GradientNorm norm) {
  require_same_shape(a, b, "gradient_loss");
  const auto penalty = [norm](double d) { return norm == GradientNorm::Squared ? d * d : std::abs(d); };
  const std::size_t h = a.height();
  const std::size_t w = a.width();
  double sum = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      for (std::size_t ch = 0; ch < C; ++ch) {
        if (c + 1 < w) {
          sum += penalty((a.at(r, c + 1, ch) - a.at(r, c, ch)) - (b.at(r, c + 1, ch) - b.at(r, c, ch)));
        }
        if (r + 1 < h) {
          sum += penalty((a.at(r + 1, c, ch) - a.at(r, c, ch)) - (b.at(r + 1, c, ch) - b.at(r, c, ch)));
        }
      }
    }
  }
  return sum;
}

}  // namespace

GradientPair gradients(const Field& m) {
  GradientPair g{Field(m.height(), m.width()), Field(m.height(), m.width())};
  for (std::size_t r = 0; r < m.height(); ++r) {
    for (std::size_t c = 0; c < m.width(); ++c) {
      if (c + 1 < m.width()) g.gx.at(r, c) = m.at(r, c + 1) - m.at(r, c);
      if (r + 1 < m.height()) g.gy.at(r, c) = m.at(r + 1, c) - m.at(r, c);
    }
  }
  return g;
}

double gradient_loss(const TransmissionMap& t_hat, const TransmissionMap& t, GradientNorm norm) {
  return gradient_loss_impl(t_hat, t, norm);
}

double gradient_loss(const Field& t_hat, const Field& t, GradientNorm norm) {
  return gradient_loss_impl(t_hat, t, norm);
}

double l1_mean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("l1: length mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ShapeError("l1: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double l1_pixel(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "l1_pixel");
  return l1_mean(a.values(), b.values());
}

double transmission_objective(const TransmissionMap& t_hat, const TransmissionMap& t,
                              GradientNorm norm) {
  return gradient_loss(t_hat, t, norm) + l1_mean(t_hat.values(), t.values());
}

double transmission_objective(const Field& t_hat, const Field& t, GradientNorm norm) {
  return gradient_loss(t_hat, t, norm) + l1_mean(t_hat.values(), t.values());
}

double cb_loss(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != 6 || truth.size() != 6) {
    throw ShapeError("cb_loss: expected two 6-vectors (attenuation then background)");
  }
  return l1_mean(pred, truth);
}

}  // namespace uwimg::losses
