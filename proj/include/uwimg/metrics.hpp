#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "uwimg/raster.hpp"

namespace uwimg::metrics {

// UIQM weights for colorfulness, sharpness and contrast.
inline constexpr double kUicmWeight = 0.3282;
inline constexpr double kUismWeight = 0.2953;
inline constexpr double kUiconmWeight = 3.5753;

// SSIM / PCQI window.
inline constexpr std::size_t kGaussianWindow = 11;
inline constexpr double kGaussianSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;
inline constexpr double kDynamicRange = 255.0;

inline constexpr std::size_t kBlurFilterLength = 9;
inline constexpr std::size_t kUiqmBlock = 8;
inline constexpr double kUicmTrim = 0.1;

/// Rec.601 luma on the 0-255 scale.
Field luminance255(const ImagePlane& image);

/// Mean squared error on the 0-255 scale over all pixels and channels.
double mse(const ImagePlane& a, const ImagePlane& b);
/// 10 log10(255^2 / mse); +infinity for identical images.
double psnr_from_mse(double mse_255);
double psnr(const ImagePlane& a, const ImagePlane& b);

/// Mean SSIM over all fully-contained 11x11 Gaussian windows of the luma.
double ssim(const ImagePlane& a, const ImagePlane& b);

/// Patch-based contrast quality index of `b` against reference `a`.
double pcqi(const ImagePlane& a, const ImagePlane& b);

/// No-reference blur in [0,1]; 0 is sharpest.
double blur_metric(const ImagePlane& image);

struct UiqmScores {
  double uicm = 0.0;
  double uism = 0.0;
  double uiconm = 0.0;
  double uiqm = 0.0;
};

double uiqm_combine(double uicm, double uism, double uiconm);
double uicm(const ImagePlane& image);
double uism(const ImagePlane& image);
double uiconm(const ImagePlane& image);
UiqmScores uiqm(const ImagePlane& image);

// ---- reports ---------------------------------------------------------------

/// Column order of the batch CSV after "name".
inline constexpr std::array<std::string_view, 9> kMetricNames{
    "mse", "psnr", "ssim", "pcqi", "blur", "uicm", "uism", "uiconm", "uiqm"};

struct MetricSelection {
  bool mse = true, psnr = true, ssim = true, pcqi = true, blur = true, uiqm = true;

  /// Comma list of metric names; "uiqm" (or any sub-measure) selects all four UIQM columns.
  static MetricSelection parse(std::string_view list);
  bool any_full_reference() const { return mse || psnr || ssim || pcqi; }
};

struct MetricReport {
  std::map<std::string, double, std::less<>> entries;

  std::optional<double> get(std::string_view name) const;
};

/// Evaluates the selected metrics; full-reference ones only when a reference is given.
MetricReport evaluate(const ImagePlane& image, const ImagePlane* reference,
                      const MetricSelection& selection = {});

/// Numbers as JSON numbers; infinite PSNR as the string "inf".
nlohmann::json to_json(const MetricReport& report);
std::string format_value(double v);
std::string csv_header();
std::string csv_row(std::string_view name, const MetricReport& report);

}  // namespace uwimg::metrics
