#include "scami/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "scami/errors.hpp"

namespace scami {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Raster::Raster(int w, int h, std::array<double, 3> fill)
    : width(w), height(h) {
  if (w < 1 || h < 1) throw std::domain_error("raster dimensions must be >= 1");
  pixels.assign(std::size_t(w) * std::size_t(h), fill);
}

Raster load_raster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() < 2) throw FormatError("'" + path + "' is too short");
  in.close();
  if (magic[0] == 'P' && magic[1] == '6') return load_ppm(path);
  if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P')
    return load_png(path);
  throw FormatError("'" + path + "' is neither PNG nor PPM (P6)");
}

Raster load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open '" + path + "'");

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8))
    throw FormatError("'" + path + "' is not a PNG file");

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<unsigned char> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path + "' is not a valid PNG");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if ((color_type & PNG_COLOR_MASK_ALPHA) ||
      png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path + "': alpha channels are not supported");
  }

  // Normalize everything to 8- or 16-bit RGB.
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (color_type == PNG_COLOR_TYPE_GRAY) png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (channels != 3 || (depth != 8 && depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path + "': unsupported PNG layout");
  }

  const std::size_t stride = png_get_rowbytes(png, info);
  data.resize(stride * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = data.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Raster r{int(w), int(h)};
  for (png_uint_32 y = 0; y < h; ++y) {
    const unsigned char* row = data.data() + y * stride;
    for (png_uint_32 x = 0; x < w; ++x) {
      std::array<double, 3> px;
      if (depth == 8) {
        px = {row[3 * x] / 255.0, row[3 * x + 1] / 255.0,
              row[3 * x + 2] / 255.0};
      } else {
        auto sample = [&](std::size_t i) {
          return (row[6 * x + 2 * i] << 8 | row[6 * x + 2 * i + 1]) / 65535.0;
        };
        px = {sample(0), sample(1), sample(2)};
      }
      for (double& c : px) c = clamp01(c);
      r.at(int(x), int(y)) = px;
    }
  }
  return r;
}

namespace {

// PPM header token reader: skips whitespace and '#' comments.
int ppm_token(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF &&
         (c == '#' || std::isspace(static_cast<unsigned char>(c)))) {
    if (c == '#') {
      while (c != '\n' && c != EOF) c = in.get();
    }
    c = in.get();
  }
  if (c == EOF) throw FormatError("'" + path + "': truncated PPM header");
  in.unget();
  int value = 0;
  if (!(in >> value) || value < 0)
    throw FormatError("'" + path + "': bad PPM header field");
  return value;
}

}  // namespace

Raster load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char m0 = 0, m1 = 0;
  in.get(m0).get(m1);
  if (m0 != 'P' || m1 != '6')
    throw FormatError("'" + path + "' is not a binary PPM (P6)");
  const int w = ppm_token(in, path);
  const int h = ppm_token(in, path);
  const int maxval = ppm_token(in, path);
  if (w < 1 || h < 1) throw FormatError("'" + path + "': bad PPM dimensions");
  if (maxval != 255)
    throw FormatError("'" + path + "': only maxval 255 PPMs are supported");
  in.get();  // single whitespace before raster data

  std::vector<unsigned char> data(std::size_t(w) * h * 3);
  in.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size()));
  if (std::size_t(in.gcount()) != data.size())
    throw FormatError("'" + path + "': truncated PPM pixel data");

  Raster r(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = (std::size_t(y) * w + x) * 3;
      r.at(x, y) = {clamp01(data[i] / 255.0), clamp01(data[i + 1] / 255.0),
                    clamp01(data[i + 2] / 255.0)};
    }
  }
  return r;
}

namespace {

unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::lround(clamp01(v) * 255.0));
}

}  // namespace

void save_ppm(const Raster& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "P6\n" << r.width << " " << r.height << "\n255\n";
  std::vector<unsigned char> data;
  data.reserve(r.pixels.size() * 3);
  for (const auto& px : r.pixels) {
    data.push_back(to_byte(px[0]));
    data.push_back(to_byte(px[1]));
    data.push_back(to_byte(px[2]));
  }
  out.write(reinterpret_cast<const char*>(data.data()),
            std::streamsize(data.size()));
  if (!out) throw IoError("cannot write '" + path + "'");
}

void save_png(const Raster& r, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write '" + path + "'");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed for '" + path + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, png_uint_32(r.width), png_uint_32(r.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<unsigned char> row(std::size_t(r.width) * 3);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const auto& px = r.at(x, y);
      row[3 * x] = to_byte(px[0]);
      row[3 * x + 1] = to_byte(px[1]);
      row[3 * x + 2] = to_byte(px[2]);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace scami
