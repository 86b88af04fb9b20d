#include "isty/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace isty {
namespace {

double max_code(int depth) { return depth == CV_16U ? 65535.0 : 255.0; }

DecodedImage from_mat(const cv::Mat& m, const std::string& origin) {
  if (m.empty()) throw LoadError("cannot decode image: " + origin);
  if (m.depth() != CV_8U && m.depth() != CV_16U) {
    throw FormatError("unsupported image depth (need 8 or 16 bit): " + origin);
  }
  const double scale = 1.0 / max_code(m.depth());
  const int ch = m.channels();
  DecodedImage out;
  out.bit_depth = m.depth() == CV_16U ? 16 : 8;
  out.rgb = ViewImage(m.cols, m.rows);
  if (ch == 2 || ch == 4) out.alpha = Raster<1>(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      double px[4];
      for (int c = 0; c < ch; ++c) {
        px[c] = m.depth() == CV_16U ? m.ptr<std::uint16_t>(y)[x * ch + c]
                                    : m.ptr<std::uint8_t>(y)[x * ch + c];
      }
      if (ch <= 2) {
        for (int c = 0; c < 3; ++c) out.rgb.at(x, y, c) = static_cast<float>(px[0] * scale);
      } else {
        // imgcodecs hands back BGR(A)
        out.rgb.at(x, y, 0) = static_cast<float>(px[2] * scale);
        out.rgb.at(x, y, 1) = static_cast<float>(px[1] * scale);
        out.rgb.at(x, y, 2) = static_cast<float>(px[0] * scale);
      }
      if (out.alpha) out.alpha->at(x, y) = static_cast<float>(px[ch - 1] * scale);
    }
  }
  return out;
}

Raster<1> gray_from_mat(const cv::Mat& m, const std::string& origin) {
  if (m.empty()) throw LoadError("cannot decode image: " + origin);
  if (m.channels() != 1) throw FormatError("expected single-channel image: " + origin);
  if (m.depth() != CV_8U && m.depth() != CV_16U) {
    throw FormatError("unsupported image depth: " + origin);
  }
  const double scale = 1.0 / max_code(m.depth());
  Raster<1> out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) {
      const double v = m.depth() == CV_16U ? m.ptr<std::uint16_t>(y)[x]
                                           : m.ptr<std::uint8_t>(y)[x];
      out.at(x, y) = static_cast<float>(v * scale);
    }
  return out;
}

template <typename T>
T quantize(float v, double maxv) {
  const double q = std::round(std::clamp(static_cast<double>(v), 0.0, 1.0) * maxv);
  return static_cast<T>(q);
}

cv::Mat to_mat(const ViewImage* rgb, const Raster<1>* gray, const Raster<1>* alpha,
               int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ArgumentError("bit depth must be 8 or 16");
  const int depth = bit_depth == 16 ? CV_16U : CV_8U;
  const int w = rgb ? rgb->width() : gray->width();
  const int h = rgb ? rgb->height() : gray->height();
  const int ch = rgb ? (alpha ? 4 : 3) : 1;
  cv::Mat m(h, w, CV_MAKETYPE(depth, ch));
  const double maxv = max_code(depth);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float px[4];
      if (rgb) {
        px[0] = rgb->at(x, y, 2);
        px[1] = rgb->at(x, y, 1);
        px[2] = rgb->at(x, y, 0);
        if (alpha) px[3] = alpha->at(x, y);
      } else {
        px[0] = gray->at(x, y);
      }
      for (int c = 0; c < ch; ++c) {
        if (depth == CV_16U)
          m.ptr<std::uint16_t>(y)[x * ch + c] = quantize<std::uint16_t>(px[c], maxv);
        else
          m.ptr<std::uint8_t>(y)[x * ch + c] = quantize<std::uint8_t>(px[c], maxv);
      }
    }
  return m;
}

std::vector<std::uint8_t> encode(const cv::Mat& m) {
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", m, buf)) throw FormatError("PNG encode failed");
  return buf;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed: " + path.string());
}

}  // namespace

DecodedImage read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw LoadError("missing image: " + path.string());
  return from_mat(cv::imread(path.string(), cv::IMREAD_UNCHANGED), path.string());
}

DecodedImage decode_image(const std::vector<std::uint8_t>& bytes) {
  return from_mat(cv::imdecode(bytes, cv::IMREAD_UNCHANGED), "<memory>");
}

Raster<1> read_gray(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw LoadError("missing image: " + path.string());
  return gray_from_mat(cv::imread(path.string(), cv::IMREAD_GRAYSCALE | cv::IMREAD_ANYDEPTH),
                       path.string());
}

Raster<1> decode_gray(const std::vector<std::uint8_t>& bytes) {
  return gray_from_mat(cv::imdecode(bytes, cv::IMREAD_GRAYSCALE | cv::IMREAD_ANYDEPTH),
                       "<memory>");
}

std::vector<std::uint8_t> encode_png(const ViewImage& img, int bit_depth) {
  return encode(to_mat(&img, nullptr, nullptr, bit_depth));
}
std::vector<std::uint8_t> encode_png(const Raster<1>& img, int bit_depth) {
  return encode(to_mat(nullptr, &img, nullptr, bit_depth));
}
std::vector<std::uint8_t> encode_png(const ViewImage& rgb, const Raster<1>& alpha,
                                     int bit_depth) {
  require_same_extent(rgb, alpha, "encode_png");
  return encode(to_mat(&rgb, nullptr, &alpha, bit_depth));
}

void write_png(const std::filesystem::path& path, const ViewImage& img, int bit_depth) {
  write_bytes(path, encode_png(img, bit_depth));
}
void write_png(const std::filesystem::path& path, const Raster<1>& img, int bit_depth) {
  write_bytes(path, encode_png(img, bit_depth));
}
void write_png(const std::filesystem::path& path, const ViewImage& rgb,
               const Raster<1>& alpha, int bit_depth) {
  write_bytes(path, encode_png(rgb, alpha, bit_depth));
}

}  // namespace isty
