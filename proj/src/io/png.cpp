#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include "gcops/error.hpp"
#include "gcops/io/image_io.hpp"

namespace gcops::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open(const std::filesystem::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return f;
}

void on_error(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

// Encodes rows (already in PNG byte order) into an in-memory buffer.
std::string encode(std::size_t width, std::size_t height, int bit_depth, int color_type,
                   const std::vector<std::uint8_t>& bytes) {
  std::string message, out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
  if (!png) throw Error(ErrorCode::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t stride = width * std::size_t(channels) * std::size_t(bit_depth / 8);
  std::vector<png_bytep> rows(height);
  for (std::size_t y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(bytes.data() + y * stride);

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Io, "PNG encoding failed: " + message);
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t n) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<char*>(data), n);
      },
      [](png_structp) {});
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

Stack read_png(const std::filesystem::path& path) {
  File f = open(path, "rb");
  std::uint8_t sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw Error(ErrorCode::Io, path.string() + ": not a PNG file");

  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
  if (!png) throw Error(ErrorCode::Io, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  Stack st;
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::Io, path.string() + ": " + message);
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (depth == 16) png_set_swap(png);  // host order on little-endian
  png_read_update_info(png, info);

  st.width = png_get_image_width(png, info);
  st.height = png_get_image_height(png, info);
  st.pages = 1;
  const int out_depth = png_get_bit_depth(png, info);
  st.type = out_depth == 16 ? SampleType::U16 : SampleType::U8;
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * st.height);
  rows.resize(st.height);
  for (std::size_t y = 0; y < st.height; ++y) rows[y] = buffer.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  st.values.resize(st.width * st.height);
  for (std::size_t y = 0; y < st.height; ++y)
    for (std::size_t x = 0; x < st.width; ++x) {
      const std::uint8_t* p = rows[y];
      st.values[y * st.width + x] =
          out_depth == 16 ? double(std::uint16_t(p[2 * x] | p[2 * x + 1] << 8)) : double(p[x]);
    }
  return st;
}

void write_png_gray(const std::filesystem::path& path, const Stack& stack, SampleType type) {
  if (stack.pages != 1) throw Error(ErrorCode::InvalidArgument, "PNG holds a single plane");
  if (type == SampleType::F32)
    throw Error(ErrorCode::InvalidArgument, "PNG cannot store floating-point samples");
  const bool wide = type == SampleType::U16;
  std::vector<std::uint8_t> bytes;
  bytes.reserve(stack.values.size() * (wide ? 2 : 1));
  for (double v : stack.values) {
    if (wide) {
      const auto s = std::uint16_t(std::clamp(std::lround(v), 0L, 65535L));
      bytes.push_back(std::uint8_t(s >> 8));
      bytes.push_back(std::uint8_t(s));
    } else {
      bytes.push_back(std::uint8_t(std::clamp(std::lround(v), 0L, 255L)));
    }
  }
  write_file_atomic(path, encode(stack.width, stack.height, wide ? 16 : 8, PNG_COLOR_TYPE_GRAY,
                                 bytes));
}

void write_png_rgb(const std::filesystem::path& path, std::size_t width, std::size_t height,
                   const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != width * height * 3)
    throw Error(ErrorCode::InvalidArgument, "rgb buffer does not match the image size");
  write_file_atomic(path, encode(width, height, 8, PNG_COLOR_TYPE_RGB, rgb));
}

}  // namespace gcops::io
