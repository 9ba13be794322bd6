#pragma once

// File formats: PNG (via libpng's simplified API), binary PPM (P6) rasters,
// and binary PGM (P5) class maps.

#include <png.h>

#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "pcfit/error.hpp"
#include "pcfit/imaging.hpp"
#include "pcfit/scoring.hpp"

namespace pcfit {

using Bytes = std::vector<std::uint8_t>;

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw DecodeError("error reading " + path.string());
  return data;
}

/// Writes the whole buffer in one go; the file is only created once the
/// payload has been fully encoded.
inline void write_file(const std::filesystem::path& path, const Bytes& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DecodeError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw DecodeError("error writing " + path.string());
}

// ---------------------------------------------------------------------------
// PNG

inline bool looks_like_png(const Bytes& data) {
  return data.size() >= 8 && png_sig_cmp(data.data(), 0, 8) == 0;
}

/// Decodes any 8-bit or 16-bit PNG to RGB; alpha is dropped, not composited.
inline RgbImage decode_png(const Bytes& data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, data.data(), data.size())) {
    throw DecodeError(std::string("invalid PNG: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw DecodeError("PNG has zero size");
  }
  Bytes buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    throw DecodeError(std::string("invalid PNG: ") + image.message);
  }
  RgbImage out(static_cast<long>(image.width), static_cast<long>(image.height));
  std::size_t i = 0;
  for (long y = 0; y < out.height(); ++y) {
    for (long x = 0; x < out.width(); ++x, i += 4) out.at(x, y) = Rgb{buffer[i], buffer[i + 1], buffer[i + 2]};
  }
  return out;
}

inline Bytes encode_png(const RgbImage& raster) {
  if (raster.empty()) throw DecodeError("cannot encode an empty raster");
  Bytes pixels;
  pixels.reserve(raster.pixels().size() * 3);
  for (const Rgb& c : raster.pixels()) {
    pixels.push_back(c.r);
    pixels.push_back(c.g);
    pixels.push_back(c.b);
  }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width());
  image.height = static_cast<png_uint_32>(raster.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw DecodeError(std::string("PNG encode failed: ") + image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw DecodeError(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

// ---------------------------------------------------------------------------
// Netpbm

namespace detail {

/// Header fields of a binary Netpbm file; `offset` points at the first sample.
struct NetpbmHeader {
  char kind = 0;  // '5' or '6'
  long width = 0;
  long height = 0;
  long maxval = 0;
  std::size_t offset = 0;
};

inline NetpbmHeader parse_netpbm_header(const Bytes& data) {
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6')) {
    throw DecodeError("not a binary PGM/PPM file");
  }
  NetpbmHeader h;
  h.kind = static_cast<char>(data[1]);
  std::size_t pos = 2;
  auto next_number = [&]() -> long {
    for (;;) {
      while (pos < data.size() && std::isspace(data[pos])) ++pos;
      if (pos < data.size() && data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= data.size() || !std::isdigit(data[pos])) throw DecodeError("malformed Netpbm header");
    long v = 0;
    while (pos < data.size() && std::isdigit(data[pos])) {
      v = v * 10 + (data[pos] - '0');
      if (v > 1'000'000'000L) throw DecodeError("Netpbm header value too large");
      ++pos;
    }
    return v;
  };
  h.width = next_number();
  h.height = next_number();
  h.maxval = next_number();
  if (pos >= data.size() || !std::isspace(data[pos])) throw DecodeError("malformed Netpbm header");
  h.offset = pos + 1;
  if (h.width <= 0 || h.height <= 0) throw DecodeError("Netpbm image has zero size");
  if (h.maxval <= 0 || h.maxval > 255) throw DecodeError("only 8-bit Netpbm files are supported");
  const std::size_t channels = h.kind == '6' ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height) * channels;
  if (data.size() - h.offset < need) throw DecodeError("Netpbm pixel data is truncated");
  return h;
}

inline Bytes netpbm_header(char kind, long width, long height) {
  const std::string head = std::string("P") + kind + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  return Bytes(head.begin(), head.end());
}

}  // namespace detail

inline RgbImage decode_ppm(const Bytes& data) {
  const auto h = detail::parse_netpbm_header(data);
  if (h.kind != '6') throw DecodeError("expected a P6 PPM raster");
  RgbImage out(h.width, h.height);
  auto scale = [&](std::uint8_t v) {
    return static_cast<std::uint8_t>((static_cast<long>(v) * 255 + h.maxval / 2) / h.maxval);
  };
  std::size_t i = h.offset;
  for (long y = 0; y < h.height; ++y) {
    for (long x = 0; x < h.width; ++x, i += 3) out.at(x, y) = Rgb{scale(data[i]), scale(data[i + 1]), scale(data[i + 2])};
  }
  return out;
}

inline Bytes encode_ppm(const RgbImage& raster) {
  Bytes out = detail::netpbm_header('6', raster.width(), raster.height());
  for (const Rgb& c : raster.pixels()) {
    out.push_back(c.r);
    out.push_back(c.g);
    out.push_back(c.b);
  }
  return out;
}

/// Class map sample values: 0 Black, 1 Red, 2 Green, 3 Grey, 255 Other.
inline std::uint8_t class_map_value(PixelClass c) {
  switch (c) {
    case PixelClass::Black: return 0;
    case PixelClass::Red: return 1;
    case PixelClass::Green: return 2;
    case PixelClass::Grey: return 3;
    case PixelClass::Other: return 255;
  }
  return 255;
}

inline LabeledImage decode_class_map(const Bytes& data) {
  const auto h = detail::parse_netpbm_header(data);
  if (h.kind != '5') throw DecodeError("expected a P5 PGM class map");
  if (h.maxval != 255) throw DecodeError("class map must have maxval 255");
  std::vector<PixelClass> labels;
  labels.reserve(static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height));
  for (std::size_t i = 0; i < static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height); ++i) {
    const std::uint8_t v = data[h.offset + i];
    switch (v) {
      case 0: labels.push_back(PixelClass::Black); break;
      case 1: labels.push_back(PixelClass::Red); break;
      case 2: labels.push_back(PixelClass::Green); break;
      case 3: labels.push_back(PixelClass::Grey); break;
      case 255: labels.push_back(PixelClass::Other); break;
      default:
        throw DecodeError("class map value " + std::to_string(v) + " at pixel " + std::to_string(i) +
                          " is not one of 0, 1, 2, 3, 255");
    }
  }
  return LabeledImage(h.width, h.height, std::move(labels));
}

inline Bytes encode_class_map(const LabeledImage& image) {
  Bytes out = detail::netpbm_header('5', image.width(), image.height());
  for (PixelClass c : image.labels()) out.push_back(class_map_value(c));
  return out;
}

// ---------------------------------------------------------------------------
// Path-level helpers

inline RgbImage load_raster(const std::filesystem::path& path) {
  const Bytes data = read_file(path);
  if (looks_like_png(data)) return decode_png(data);
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '6') return decode_ppm(data);
  throw DecodeError(path.string() + ": unsupported raster format (expected PNG or P6 PPM)");
}

/// Loads a labeled image from a PNG/PPM raster (decoded with `palette`) or a
/// P5 class map.
inline LabeledImage load_labeled_image(const std::filesystem::path& path, const ClassPalette& palette) {
  const Bytes data = read_file(path);
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '5') return decode_class_map(data);
  if (looks_like_png(data)) return decode_label_image(decode_png(data), palette);
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '6') return decode_label_image(decode_ppm(data), palette);
  throw DecodeError(path.string() + ": unsupported image format (expected PNG, P6 PPM or P5 class map)");
}

inline void save_png(const std::filesystem::path& path, const RgbImage& raster) { write_file(path, encode_png(raster)); }

inline void save_class_map(const std::filesystem::path& path, const LabeledImage& image) {
  write_file(path, encode_class_map(image));
}

}  // namespace pcfit
