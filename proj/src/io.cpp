#include "partbench/io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "partbench/error.hpp"

namespace partbench {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(mode[0] == 'r' ? "missing-input" : "io-error", path);
  return f;
}

std::uint8_t to_byte(float v) {
  if (!(v > 0)) return 0;
  if (v >= 1) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0f));
}

void write_png_rows(const std::string& path, int width, int height, int bit_depth, int color_type,
                    const std::vector<std::vector<std::uint8_t>>& rows) {
  auto f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw Error("io-error", "png init " + path);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("io-error", "png write " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (const auto& row : rows) png_write_row(png, const_cast<png_bytep>(row.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Decodes any PNG to 8-bit RGB rows.
std::vector<std::vector<std::uint8_t>> read_png_rgb8(const std::string& path, int& width, int& height) {
  auto f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw Error("io-error", "png init " + path);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("io-error", "png read " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  auto color = png_get_color_type(png, info);
  auto depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  std::vector<std::vector<std::uint8_t>> rows(height, std::vector<std::uint8_t>(png_get_rowbytes(png, info)));
  for (auto& row : rows) png_read_row(png, row.data(), nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return rows;
}

}  // namespace

void write_png(const std::string& path, const Image& img) {
  std::vector<std::vector<std::uint8_t>> rows(img.height, std::vector<std::uint8_t>(img.width * 3));
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width * 3; ++c) rows[r][c] = to_byte(img.data[img.index(r, 0) + c]);
  write_png_rows(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

Image read_png(const std::string& path) {
  int w = 0, h = 0;
  auto rows = read_png_rgb8(path, w, h);
  Image img(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w * 3; ++c) img.data[img.index(r, 0) + c] = rows[r][c] / 255.0f;
  return img;
}

void write_mask_png(const std::string& path, const Mask& m) {
  std::vector<std::vector<std::uint8_t>> rows(m.height(), std::vector<std::uint8_t>((m.width() + 7) / 8, 0));
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c)
      if (m.get(r, c)) rows[r][c / 8] |= static_cast<std::uint8_t>(0x80 >> (c % 8));
  write_png_rows(path, m.width(), m.height(), 1, PNG_COLOR_TYPE_GRAY, rows);
}

Mask read_mask_png(const std::string& path) {
  int w = 0, h = 0;
  auto rows = read_png_rgb8(path, w, h);
  Mask m(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (rows[r][c * 3] >= 128) m.set(r, c);
  return m;
}

Image quantize8(const Image& img) {
  Image out = img;
  for (auto& v : out.data) v = to_byte(v) / 255.0f;
  return out;
}

void write_pfm(const std::string& path, const DepthMap& depth) {
  std::ostringstream header;
  header << "Pf\n" << depth.width << " " << depth.height << "\n-1.0\n";
  auto h = header.str();
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  bytes.reserve(bytes.size() + depth.data.size() * 4);
  // PFM stores rows bottom to top.
  for (int r = depth.height - 1; r >= 0; --r)
    for (int c = 0; c < depth.width; ++c) {
      float v = depth.get(r, c);
      if (std::isinf(v)) v = kPfmInfinity;
      std::uint32_t u;
      std::memcpy(&u, &v, 4);
      for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
    }
  write_bytes(path, bytes);
}

DepthMap read_pfm(const std::string& path) {
  auto bytes = read_bytes(path);
  std::size_t pos = 0;
  auto token = [&] {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  if (token() != "Pf") throw Error("bad-format", "not a grayscale PFM: " + path);
  int w = std::stoi(token());
  int h = std::stoi(token());
  double scale = std::stod(token());
  if (scale >= 0) throw Error("bad-format", "big-endian PFM unsupported: " + path);
  ++pos;  // single whitespace after the scale
  if (bytes.size() - pos < static_cast<std::size_t>(w) * h * 4) throw Error("bad-format", "truncated PFM: " + path);
  DepthMap d(h, w);
  for (int r = h - 1; r >= 0; --r)
    for (int c = 0; c < w; ++c) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * b);
      float v;
      std::memcpy(&v, &u, 4);
      d.set(r, c, v >= kPfmInfinity ? std::numeric_limits<float>::infinity() : v);
    }
  return d;
}

Rle rle_encode(const Mask& m) {
  Rle r{m.height(), m.width(), {}};
  bool current = false;
  std::uint32_t run = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.get(i) != current) {
      r.counts.push_back(run);
      run = 0;
      current = !current;
    }
    ++run;
  }
  r.counts.push_back(run);
  return r;
}

Mask rle_decode(const Rle& r) {
  Mask m(r.height, r.width);
  std::size_t i = 0;
  bool v = false;
  for (auto n : r.counts) {
    if (i + n > m.size()) throw Error("bad-format", "RLE runs exceed mask size");
    if (v)
      for (std::uint32_t k = 0; k < n; ++k) m.set(i + k);
    i += n;
    v = !v;
  }
  if (i != m.size()) throw Error("bad-format", "RLE runs do not cover the mask");
  return m;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing-input", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io-error", path);
  out << text;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  auto s = read_text(path);
  return {s.begin(), s.end()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io-error", path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace partbench
