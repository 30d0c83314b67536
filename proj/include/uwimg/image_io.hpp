#pragma once

#include <cstddef>
#include <filesystem>

#include "uwimg/raster.hpp"

namespace uwimg::io {

/// Reads an 8- or 16-bit PNG (gray, RGB or RGBA) into [0,1] RGB.
ImagePlane read_image(const std::filesystem::path& path);
/// Writes 8-bit RGB; values are clamped to [0,1] and rounded to k/255.
void write_image8(const std::filesystem::path& path, const ImagePlane& image);

/// 16-bit RGB PNG with T scaled by 65535.
void write_transmission16(const std::filesystem::path& path, const TransmissionMap& t);
TransmissionMap read_transmission16(const std::filesystem::path& path);

/// 16-bit grayscale PNG holding millimeters; returned in meters.
DepthMap read_depth_png_mm(const std::filesystem::path& path);
void write_depth_png_mm(const std::filesystem::path& path, const DepthMap& depth);

/// Portable float map, single channel ("Pf"); either byte order on read.
DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const DepthMap& depth);

/// Dispatches on extension: ".pfm" or 16-bit PNG in millimeters.
DepthMap read_depth(const std::filesystem::path& path);

/// Value after one 8-bit store/load cycle.
double quantize8(double v);
ImagePlane quantize8(const ImagePlane& image);
/// Value after one 16-bit store/load cycle.
double quantize16(double v);

ImagePlane resize_bilinear(const ImagePlane& image, std::size_t height, std::size_t width);
DepthMap resize_bilinear(const DepthMap& depth, std::size_t height, std::size_t width);

}  // namespace uwimg::io
