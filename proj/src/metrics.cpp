#include "uwimg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace uwimg::metrics {

namespace {

void require_min_size(const ImagePlane& image, std::size_t min_side, const char* what) {
  if (image.height() < min_side || image.width() < min_side) {
    throw DomainError(fmt::format("{}: image {}x{} is smaller than the {}-pixel minimum", what,
                                  image.height(), image.width(), min_side));
  }
}

std::vector<double> gaussian_kernel(std::size_t size, double sigma) {
  std::vector<double> k(size);
  const double half = (static_cast<double>(size) - 1.0) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double x = static_cast<double>(i) - half;
    k[i] = std::exp(-(x * x) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Separable correlation keeping only fully-overlapping positions.
Field filter_valid(const Field& src, const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t oh = src.height() - n + 1;
  const std::size_t ow = src.width() - n + 1;
  Field horiz(src.height(), ow);
  for (std::size_t r = 0; r < src.height(); ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * src.at(r, c + i);
      horiz.at(r, c) = acc;
    }
  }
  Field out(oh, ow);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * horiz.at(r + i, c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

Field multiply(const Field& a, const Field& b) {
  Field out = a;
  auto o = out.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bv[i];
  return out;
}

/// Local Gaussian-weighted means, variances and covariance of two fields.
struct LocalStats {
  Field mu_a, mu_b, var_a, var_b, cov;
};

LocalStats local_stats(const Field& a, const Field& b) {
  const auto k = gaussian_kernel(kGaussianWindow, kGaussianSigma);
  LocalStats s{filter_valid(a, k), filter_valid(b, k), filter_valid(multiply(a, a), k),
               filter_valid(multiply(b, b), k), filter_valid(multiply(a, b), k)};
  auto ma = s.mu_a.values();
  auto mb = s.mu_b.values();
  auto va = s.var_a.values();
  auto vb = s.var_b.values();
  auto cv = s.cov.values();
  for (std::size_t i = 0; i < ma.size(); ++i) {
    va[i] -= ma[i] * ma[i];
    vb[i] -= mb[i] * mb[i];
    cv[i] -= ma[i] * mb[i];
  }
  return s;
}

// Mirror index for half-sample symmetric borders: d c b a | a b c d | d c b a.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  while (i < 0 || i >= sn) i = i < 0 ? -i - 1 : 2 * sn - i - 1;
  return static_cast<std::size_t>(i);
}

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
}

}  // namespace

Field luminance255(const ImagePlane& image) {
  Field y(image.height(), image.width());
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      y.at(r, c) = 255.0 * (0.299 * image.at(r, c, 0) + 0.587 * image.at(r, c, 1) +
                            0.114 * image.at(r, c, 2));
    }
  }
  return y;
}

// ---- full reference --------------------------------------------------------

double mse(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "mse");
  const auto av = a.values();
  const auto bv = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = 255.0 * (av[i] - bv[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(av.size());
}

double psnr_from_mse(double mse_255) {
  if (mse_255 <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kDynamicRange * kDynamicRange / mse_255);
}

double psnr(const ImagePlane& a, const ImagePlane& b) { return psnr_from_mse(mse(a, b)); }

double ssim(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "ssim");
  require_min_size(a, kGaussianWindow, "ssim");
  const LocalStats s = local_stats(luminance255(a), luminance255(b));
  const double c1 = (kSsimK1 * kDynamicRange) * (kSsimK1 * kDynamicRange);
  const double c2 = (kSsimK2 * kDynamicRange) * (kSsimK2 * kDynamicRange);
  const auto ma = s.mu_a.values();
  const auto mb = s.mu_b.values();
  const auto va = s.var_a.values();
  const auto vb = s.var_b.values();
  const auto cv = s.cov.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    sum += ((2.0 * ma[i] * mb[i] + c1) * (2.0 * cv[i] + c2)) /
           ((ma[i] * ma[i] + mb[i] * mb[i] + c1) * (va[i] + vb[i] + c2));
  }
  return sum / static_cast<double>(ma.size());
}

double pcqi(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "pcqi");
  require_min_size(a, kGaussianWindow, "pcqi");
  // Constants of the reference implementation: C = 3, L = 256 gray levels.
  constexpr double kC = 3.0;
  constexpr double kLevels = 256.0;
  const LocalStats s = local_stats(luminance255(a), luminance255(b));
  const auto ma = s.mu_a.values();
  const auto mb = s.mu_b.values();
  const auto va = s.var_a.values();
  const auto vb = s.var_b.values();
  const auto cv = s.cov.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const double var_a = std::max(0.0, va[i]);
    const double var_b = std::max(0.0, vb[i]);
    const double intensity = std::exp(-std::abs(ma[i] - mb[i]) / kLevels);
    const double contrast = (4.0 / std::numbers::pi) * std::atan((cv[i] + kC) / (var_a + kC));
    const double structure = (cv[i] + kC) / (std::sqrt(var_a) * std::sqrt(var_b) + kC);
    sum += intensity * contrast * structure;
  }
  return sum / static_cast<double>(ma.size());
}

// ---- no reference ----------------------------------------------------------

double blur_metric(const ImagePlane& image) {
  require_min_size(image, kBlurFilterLength, "blur_metric");
  const Field f = luminance255(image);
  const std::size_t h = f.height();
  const std::size_t w = f.width();
  constexpr auto half = static_cast<std::ptrdiff_t>(kBlurFilterLength / 2);

  // Strong 1-D box re-blur along each direction, replicate borders.
  Field blur_h(h, w);
  Field blur_v(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double sh = 0.0;
      double sv = 0.0;
      for (std::ptrdiff_t k = -half; k <= half; ++k) {
        sh += f.at(r, clamp_index(static_cast<std::ptrdiff_t>(c) + k, w));
        sv += f.at(clamp_index(static_cast<std::ptrdiff_t>(r) + k, h), c);
      }
      blur_h.at(r, c) = sh / static_cast<double>(kBlurFilterLength);
      blur_v.at(r, c) = sv / static_cast<double>(kBlurFilterLength);
    }
  }

  // Neighbour-difference sums over the interior, original vs re-blurred.
  double sum_dh = 0.0, sum_vh = 0.0, sum_dv = 0.0, sum_vv = 0.0;
  for (std::size_t r = 1; r + 1 < h; ++r) {
    for (std::size_t c = 1; c + 1 < w; ++c) {
      const double d_fh = std::abs(f.at(r, c) - f.at(r, c - 1));
      const double d_bh = std::abs(blur_h.at(r, c) - blur_h.at(r, c - 1));
      sum_dh += d_fh;
      sum_vh += std::max(0.0, d_fh - d_bh);
      const double d_fv = std::abs(f.at(r, c) - f.at(r - 1, c));
      const double d_bv = std::abs(blur_v.at(r, c) - blur_v.at(r - 1, c));
      sum_dv += d_fv;
      sum_vv += std::max(0.0, d_fv - d_bv);
    }
  }
  // No variation at all: nothing to lose, report the sharp end of the scale.
  const double blur_h_score = sum_dh > 0.0 ? (sum_dh - sum_vh) / sum_dh : 0.0;
  const double blur_v_score = sum_dv > 0.0 ? (sum_dv - sum_vv) / sum_dv : 0.0;
  return std::max(blur_h_score, blur_v_score);
}

double uiqm_combine(double uicm_v, double uism_v, double uiconm_v) {
  return kUicmWeight * uicm_v + kUismWeight * uism_v + kUiconmWeight * uiconm_v;
}

namespace {

// Asymmetric alpha-trimmed mean plus the spread about it.
std::pair<double, double> trimmed_stats(std::vector<double> values) {
  const std::size_t k = values.size();
  std::sort(values.begin(), values.end());
  const auto trim_lo = static_cast<std::size_t>(std::ceil(kUicmTrim * static_cast<double>(k)));
  const auto trim_hi = static_cast<std::size_t>(std::floor(kUicmTrim * static_cast<double>(k)));
  double mu = 0.0;
  if (trim_lo + trim_hi < k) {
    for (std::size_t i = trim_lo; i < k - trim_hi; ++i) mu += values[i];
    mu /= static_cast<double>(k - trim_lo - trim_hi);
  }
  double var = 0.0;
  for (double v : values) var += (v - mu) * (v - mu);
  return {mu, var / static_cast<double>(k)};
}

Field sobel_magnitude(const Field& f) {
  const std::size_t h = f.height();
  const std::size_t w = f.width();
  const auto px = [&](std::size_t r, std::size_t c, int dr, int dc) {
    return f.at(reflect(static_cast<std::ptrdiff_t>(r) + dr, h),
                reflect(static_cast<std::ptrdiff_t>(c) + dc, w));
  };
  Field mag(h, w);
  double peak = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double gx = (px(r, c, -1, 1) + 2.0 * px(r, c, 0, 1) + px(r, c, 1, 1)) -
                        (px(r, c, -1, -1) + 2.0 * px(r, c, 0, -1) + px(r, c, 1, -1));
      const double gy = (px(r, c, 1, -1) + 2.0 * px(r, c, 1, 0) + px(r, c, 1, 1)) -
                        (px(r, c, -1, -1) + 2.0 * px(r, c, -1, 0) + px(r, c, -1, 1));
      mag.at(r, c) = std::hypot(gx, gy);
      peak = std::max(peak, mag.at(r, c));
    }
  }
  if (peak > 0.0) {
    for (double& v : mag.values()) v *= 255.0 / peak;
  }
  return mag;
}

double eme(const Field& f) {
  const std::size_t bx = f.width() / kUiqmBlock;
  const std::size_t by = f.height() / kUiqmBlock;
  double sum = 0.0;
  for (std::size_t i = 0; i < by; ++i) {
    for (std::size_t j = 0; j < bx; ++j) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t r = i * kUiqmBlock; r < (i + 1) * kUiqmBlock; ++r) {
        for (std::size_t c = j * kUiqmBlock; c < (j + 1) * kUiqmBlock; ++c) {
          lo = std::min(lo, f.at(r, c));
          hi = std::max(hi, f.at(r, c));
        }
      }
      if (lo > 0.0 && hi > 0.0) sum += std::log(hi / lo);
    }
  }
  return 2.0 / static_cast<double>(bx * by) * sum;
}

}  // namespace

double uicm(const ImagePlane& image) {
  require_min_size(image, kUiqmBlock, "uicm");
  std::vector<double> rg;
  std::vector<double> yb;
  rg.reserve(image.pixel_count());
  yb.reserve(image.pixel_count());
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      const double red = 255.0 * image.at(r, c, 0);
      const double green = 255.0 * image.at(r, c, 1);
      const double blue = 255.0 * image.at(r, c, 2);
      rg.push_back(red - green);
      yb.push_back(0.5 * (red + green) - blue);
    }
  }
  const auto [mu_rg, var_rg] = trimmed_stats(std::move(rg));
  const auto [mu_yb, var_yb] = trimmed_stats(std::move(yb));
  return -0.0268 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb) +
         0.1586 * std::sqrt(var_rg + var_yb);
}

double uism(const ImagePlane& image) {
  require_min_size(image, kUiqmBlock, "uism");
  constexpr std::array<double, 3> kLuma{0.299, 0.587, 0.114};
  double total = 0.0;
  for (std::size_t ch = 0; ch < 3; ++ch) {
    Field channel = channel_of(image, ch);
    for (double& v : channel.values()) v *= 255.0;
    const Field edges = multiply(sobel_magnitude(channel), channel);
    total += kLuma[ch] * eme(edges);
  }
  return total;
}

double uiconm(const ImagePlane& image) {
  require_min_size(image, kUiqmBlock, "uiconm");
  const std::size_t bx = image.width() / kUiqmBlock;
  const std::size_t by = image.height() / kUiqmBlock;
  double sum = 0.0;
  for (std::size_t i = 0; i < by; ++i) {
    for (std::size_t j = 0; j < bx; ++j) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t r = i * kUiqmBlock; r < (i + 1) * kUiqmBlock; ++r) {
        for (std::size_t c = j * kUiqmBlock; c < (j + 1) * kUiqmBlock; ++c) {
          for (std::size_t ch = 0; ch < 3; ++ch) {
            lo = std::min(lo, 255.0 * image.at(r, c, ch));
            hi = std::max(hi, 255.0 * image.at(r, c, ch));
          }
        }
      }
      const double top = hi - lo;
      const double bottom = hi + lo;
      if (top > 0.0 && bottom > 0.0) sum += (top / bottom) * std::log(top / bottom);
    }
  }
  return -sum / static_cast<double>(bx * by);
}

UiqmScores uiqm(const ImagePlane& image) {
  UiqmScores s;
  s.uicm = uicm(image);
  s.uism = uism(image);
  s.uiconm = uiconm(image);
  s.uiqm = uiqm_combine(s.uicm, s.uism, s.uiconm);
  return s;
}

// ---- reports ---------------------------------------------------------------

MetricSelection MetricSelection::parse(std::string_view list) {
  MetricSelection sel{false, false, false, false, false, false};
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    if (item == "mse") sel.mse = true;
    else if (item == "psnr") sel.psnr = true;
    else if (item == "ssim") sel.ssim = true;
    else if (item == "pcqi") sel.pcqi = true;
    else if (item == "blur") sel.blur = true;
    else if (item == "uiqm" || item == "uicm" || item == "uism" || item == "uiconm") sel.uiqm = true;
    else if (item == "all") sel = MetricSelection{};
    else throw UsageError("metrics: unknown metric '" + item + "'");
  }
  return sel;
}

std::optional<double> MetricReport::get(std::string_view name) const {
  const auto it = entries.find(name);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

MetricReport evaluate(const ImagePlane& image, const ImagePlane* reference,
                      const MetricSelection& sel) {
  MetricReport rep;
  if (reference != nullptr) {
    require_same_shape(image, *reference, "evaluate");
    if (sel.mse || sel.psnr) {
      const double m = mse(*reference, image);
      if (sel.mse) rep.entries["mse"] = m;
      if (sel.psnr) rep.entries["psnr"] = psnr_from_mse(m);
    }
    if (sel.ssim) rep.entries["ssim"] = ssim(*reference, image);
    if (sel.pcqi) rep.entries["pcqi"] = pcqi(*reference, image);
  }
  if (sel.blur) rep.entries["blur"] = blur_metric(image);
  if (sel.uiqm) {
    const UiqmScores s = uiqm(image);
    rep.entries["uicm"] = s.uicm;
    rep.entries["uism"] = s.uism;
    rep.entries["uiconm"] = s.uiconm;
    rep.entries["uiqm"] = s.uiqm;
  }
  return rep;
}

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : report.entries) {
    if (std::isfinite(value)) {
      j[name] = value;
    } else {
      j[name] = format_value(value);
    }
  }
  return j;
}

std::string csv_header() {
  std::string out = "name";
  for (auto name : kMetricNames) {
    out += ',';
    out += name;
  }
  return out;
}

std::string csv_row(std::string_view name, const MetricReport& report) {
  std::string out(name);
  for (auto metric : kMetricNames) {
    out += ',';
    if (const auto v = report.get(metric)) out += format_value(*v);
  }
  return out;
}

}  // namespace uwimg::metrics
