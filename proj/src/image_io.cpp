#include "uwimg/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>
#include <fstream>
#include <sstream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace uwimg::io {

namespace fs = std::filesystem;

namespace {

cv::Mat load_unchanged(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("cannot open " + path.string() + ": no such file");
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw IoError("cannot decode image " + path.string());
  return m;
}

void store(const fs::path& path, const cv::Mat& m) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

double max_code(int depth) {
  switch (depth) {
    case CV_8U: return 255.0;
    case CV_16U: return 65535.0;
    default: return 0.0;
  }
}

// Converts 1/3/4-channel BGR(A) input to RGB doubles code / max_code, the
// same expression quantize8/quantize16 use.
template <class R>
R to_rgb_raster(const cv::Mat& m, const fs::path& path) {
  const double denom = max_code(m.depth());
  if (denom == 0.0) throw DataError("unsupported bit depth in " + path.string());
  const int channels = m.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    throw DataError("unsupported channel count in " + path.string());
  }
  R out(static_cast<std::size_t>(m.rows), static_cast<std::size_t>(m.cols));
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        const int src_ch = channels == 1 ? 0 : 2 - ch;
        const double code = m.depth() == CV_8U
                                ? m.ptr<std::uint8_t>(r)[c * channels + src_ch]
                                : m.ptr<std::uint16_t>(r)[c * channels + src_ch];
        out.at(r, c, ch) = code / denom;
      }
    }
  }
  return out;
}

template <class R>
cv::Mat to_bgr_mat(const R& raster, int type, double scale, double min_code) {
  cv::Mat m(static_cast<int>(raster.height()), static_cast<int>(raster.width()), type);
  const double max_code = scale;
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        const double v = std::clamp(raster.at(r, c, 2 - ch), 0.0, 1.0);
        const double code = std::max(std::round(v * scale), min_code);
        if (type == CV_8UC3) {
          m.ptr<cv::Vec3b>(r)[c][ch] = static_cast<std::uint8_t>(std::min(code, max_code));
        } else {
          m.ptr<cv::Vec3w>(r)[c][ch] = static_cast<std::uint16_t>(std::min(code, max_code));
        }
      }
    }
  }
  return m;
}

// Bilinear with half-pixel centres and edge clamping (the usual INTER_LINEAR
// convention), evaluated in double precision.
template <class R>
R resize_impl(const R& src, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw DomainError("resize target must be positive");
  if (src.height() == height && src.width() == width) return src;
  struct Tap {
    std::size_t i0, i1;
    double w1;
  };
  const auto taps = [](std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t o = 0; o < out; ++o) {
      const double x = std::clamp((static_cast<double>(o) + 0.5) * scale - 0.5, 0.0,
                                  static_cast<double>(in - 1));
      const auto i0 = static_cast<std::size_t>(std::floor(x));
      t[o] = {i0, std::min(i0 + 1, in - 1), x - static_cast<double>(i0)};
    }
    return t;
  };
  const auto ty = taps(src.height(), height);
  const auto tx = taps(src.width(), width);
  R dst(height, width);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      for (std::size_t ch = 0; ch < R::kChannels; ++ch) {
        const double top = (1.0 - tx[c].w1) * src.at(ty[r].i0, tx[c].i0, ch) +
                           tx[c].w1 * src.at(ty[r].i0, tx[c].i1, ch);
        const double bottom = (1.0 - tx[c].w1) * src.at(ty[r].i1, tx[c].i0, ch) +
                              tx[c].w1 * src.at(ty[r].i1, tx[c].i1, ch);
        dst.at(r, c, ch) = (1.0 - ty[r].w1) * top + ty[r].w1 * bottom;
      }
    }
  }
  return dst;
}

}  // namespace

double quantize8(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

ImagePlane quantize8(const ImagePlane& image) {
  ImagePlane out = image;
  for (double& v : out.values()) v = quantize8(v);
  return out;
}

double quantize16(double v) {
  return std::max(std::round(std::clamp(v, 0.0, 1.0) * 65535.0), 1.0) / 65535.0;
}

ImagePlane read_image(const fs::path& path) {
  return to_rgb_raster<ImagePlane>(load_unchanged(path), path);
}

void write_image8(const fs::path& path, const ImagePlane& image) {
  store(path, to_bgr_mat(image, CV_8UC3, 255.0, 0.0));
}

void write_transmission16(const fs::path& path, const TransmissionMap& t) {
  // A zero code would leave the (0,1] range, so the smallest code is 1.
  store(path, to_bgr_mat(t, CV_16UC3, 65535.0, 1.0));
}

TransmissionMap read_transmission16(const fs::path& path) {
  const cv::Mat m = load_unchanged(path);
  if (m.depth() != CV_16U || m.channels() != 3) {
    throw DataError("transmission map must be 16-bit RGB: " + path.string());
  }
  return to_rgb_raster<TransmissionMap>(m, path);
}

DepthMap read_depth_png_mm(const fs::path& path) {
  const cv::Mat m = load_unchanged(path);
  if (m.depth() != CV_16U || m.channels() != 1) {
    throw DataError("depth PNG must be 16-bit grayscale (millimeters): " + path.string());
  }
  DepthMap out(static_cast<std::size_t>(m.rows), static_cast<std::size_t>(m.cols));
  for (int r = 0; r < m.rows; ++r) {
    const auto* row = m.ptr<std::uint16_t>(r);
    for (int c = 0; c < m.cols; ++c) out.at(r, c) = row[c] / 1000.0;
  }
  return out;
}

void write_depth_png_mm(const fs::path& path, const DepthMap& depth) {
  cv::Mat m(static_cast<int>(depth.height()), static_cast<int>(depth.width()), CV_16UC1);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      const double mm = std::clamp(std::round(depth.at(r, c) * 1000.0), 0.0, 65535.0);
      m.ptr<std::uint16_t>(r)[c] = static_cast<std::uint16_t>(mm);
    }
  }
  store(path, m);
}

DepthMap read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  std::size_t width = 0;
  std::size_t height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  if (!in || magic != "Pf" || width == 0 || height == 0 || scale == 0.0) {
    throw DataError("malformed PFM header in " + path.string());
  }
  in.get();  // single whitespace byte before the raster
  std::vector<float> buf(width * height);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) throw DataError("truncated PFM raster in " + path.string());

  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;
  if (file_little != host_little) {
    for (float& f : buf) {
      auto bits = std::bit_cast<std::uint32_t>(f);
      bits = (bits >> 24) | ((bits >> 8) & 0xff00u) | ((bits << 8) & 0xff0000u) | (bits << 24);
      f = std::bit_cast<float>(bits);
    }
  }
  DepthMap out(height, width);
  // PFM rows run bottom to top.
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) out.at(height - 1 - r, c) = buf[r * width + c];
  }
  return out;
}

void write_pfm(const fs::path& path, const DepthMap& depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const double scale = std::endian::native == std::endian::little ? -1.0 : 1.0;
  out << "Pf\n" << depth.width() << ' ' << depth.height() << '\n' << scale << '\n';
  std::vector<float> buf(depth.pixel_count());
  for (std::size_t r = 0; r < depth.height(); ++r) {
    for (std::size_t c = 0; c < depth.width(); ++c) {
      buf[r * depth.width() + c] = static_cast<float>(depth.at(depth.height() - 1 - r, c));
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw IoError("cannot write " + path.string());
}

DepthMap read_depth(const fs::path& path) {
  if (path.extension() == ".pfm") return read_pfm(path);
  return read_depth_png_mm(path);
}

ImagePlane resize_bilinear(const ImagePlane& image, std::size_t height, std::size_t width) {
  return resize_impl(image, height, width);
}

DepthMap resize_bilinear(const DepthMap& depth, std::size_t height, std::size_t width) {
  return resize_impl(depth, height, width);
}

}  // namespace uwimg::io
