#pragma once

// PNG and baseline JPEG codecs over libpng / libjpeg. Everything here works
// on 8-bit samples; Raster floats are rounded and clamped on the way out.

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/raster.hpp"

namespace tamperscope::imaging {

using Bytes = std::vector<std::uint8_t>;

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io,
          "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

/// Writes to a temporary sibling and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path,
                              const void* data, std::size_t size) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::Io,
            "cannot write " + tmp.string());
    out.write(static_cast<const char*>(data),
              static_cast<std::streamsize>(size));
    require(static_cast<bool>(out), ErrorKind::Io,
            "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorKind::Io,
          "cannot rename " + tmp.string() + ": " + ec.message());
}

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& text) {
  write_file_atomic(path, text.data(), text.size());
}

inline void write_file_atomic(const std::filesystem::path& path, const Bytes& b) {
  write_file_atomic(path, b.data(), b.size());
}

// ---------------------------------------------------------------- PNG

inline Raster decode_png(const Bytes& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    fail(ErrorKind::UnsupportedFormat,
         std::string("PNG decode failed: ") + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    fail(ErrorKind::UnsupportedFormat,
         std::string("PNG decode failed: ") + image.message);
  }
  std::vector<float> samples(buf.begin(), buf.end());
  return Raster(static_cast<int>(image.width), static_cast<int>(image.height),
                channels, std::move(samples));
}

inline Bytes encode_png_u8(const std::uint8_t* data, int width, int height,
                           int channels) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr))
    fail(ErrorKind::Io, std::string("PNG encode failed: ") + image.message);
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, data, 0,
                                 nullptr))
    fail(ErrorKind::Io, std::string("PNG encode failed: ") + image.message);
  out.resize(size);
  return out;
}

inline Bytes encode_png(const Raster& img) {
  const auto u8 = img.to_u8();
  return encode_png_u8(u8.data(), img.width(), img.height(), img.channels());
}

inline Bytes encode_png(const Grid<std::uint8_t>& plane) {
  return encode_png_u8(plane.vec().data(), plane.width(), plane.height(), 1);
}

// --------------------------------------------------------------- JPEG

namespace detail {

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline void jpeg_silence(j_common_ptr, int) {}

// The setjmp frames below hold only C objects; results leave through
// caller-owned buffers so nothing with a destructor is skipped on longjmp.
inline bool jpeg_compress_raw(const std::uint8_t* pixels, int width,
                              int height, int channels, int quality,
                              unsigned char** outBuf, unsigned long* outSize,
                              char* message) {
  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, outBuf, outSize);
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = channels;
  cinfo.in_color_space = channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(
        pixels + static_cast<std::size_t>(cinfo.next_scanline) * width *
                     channels);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

struct JpegHeader {
  int width = 0, height = 0, channels = 0;
};

// Two-phase decode: the first call (out == nullptr) reads the header only.
inline bool jpeg_decompress_raw(const std::uint8_t* data, std::size_t size,
                                JpegHeader* header, std::uint8_t* out,
                                char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.emit_message = jpeg_silence;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  const bool gray = cinfo.num_components == 1;
  cinfo.out_color_space = gray ? JCS_GRAYSCALE : JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  header->width = static_cast<int>(cinfo.image_width);
  header->height = static_cast<int>(cinfo.image_height);
  header->channels = gray ? 1 : 3;
  if (out == nullptr) {
    jpeg_destroy_decompress(&cinfo);
    return true;
  }
  jpeg_start_decompress(&cinfo);
  const std::size_t stride =
      static_cast<std::size_t>(cinfo.output_width) * cinfo.output_components;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out + static_cast<std::size_t>(cinfo.output_scanline) * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

}  // namespace detail

/// Baseline JPEG at the given quality (standard tables, libjpeg quality
/// scaling, 4:2:0 chroma for colour input).
inline Bytes encode_jpeg(const Raster& img, int quality) {
  require(quality >= 1 && quality <= 100, ErrorKind::Argument,
          "JPEG quality must be in 1..100, got " + std::to_string(quality));
  const auto u8 = img.to_u8();
  unsigned char* buf = nullptr;
  unsigned long size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = detail::jpeg_compress_raw(u8.data(), img.width(),
                                            img.height(), img.channels(),
                                            quality, &buf, &size, message);
  Bytes out;
  if (ok) out.assign(buf, buf + size);
  std::free(buf);
  if (!ok) fail(ErrorKind::Io, std::string("JPEG encode failed: ") + message);
  return out;
}

inline Raster decode_jpeg(const Bytes& bytes) {
  char message[JMSG_LENGTH_MAX] = {};
  detail::JpegHeader hdr;
  if (!detail::jpeg_decompress_raw(bytes.data(), bytes.size(), &hdr, nullptr,
                                   message))
    fail(ErrorKind::UnsupportedFormat,
         std::string("JPEG decode failed: ") + message);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(hdr.width) *
                                   hdr.height * hdr.channels);
  if (!detail::jpeg_decompress_raw(bytes.data(), bytes.size(), &hdr,
                                   pixels.data(), message))
    fail(ErrorKind::UnsupportedFormat,
         std::string("JPEG decode failed: ") + message);
  return Raster(hdr.width, hdr.height, hdr.channels,
                std::vector<float>(pixels.begin(), pixels.end()));
}

/// Encode at `quality`, then decode. Dimensions and channel count are kept.
inline Raster jpeg_roundtrip(const Raster& img, int quality) {
  return decode_jpeg(encode_jpeg(img, quality));
}

// ------------------------------------------------------------ dispatch

inline bool is_png(const Bytes& b) {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A,
                                          0x1A, 0x0A};
  return b.size() >= 8 && std::equal(sig, sig + 8, b.begin());
}

inline bool is_jpeg(const Bytes& b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

inline Raster decode_image(const Bytes& bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_jpeg(bytes)) return decode_jpeg(bytes);
  fail(ErrorKind::UnsupportedFormat, "unrecognised image signature");
}

inline Raster load_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

/// Loads an 8-bit mask; any nonzero sample counts as manipulated.
inline GTMask load_mask(const std::filesystem::path& path) {
  const Raster r = load_image(path);
  GTMask m(r.width(), r.height());
  for (std::size_t i = 0; i < m.size(); ++i) {
    float v = 0.0f;
    for (int c = 0; c < r.channels(); ++c)
      v = std::max(v, r.samples()[i * r.channels() + c]);
    m.vec()[i] = v >= 128.0f ? GTMask::kOn : 0;
  }
  return m;
}

/// Loads an 8-bit grayscale map as scores in [0,1] (value / 255).
inline HeatMap load_heatmap(const std::filesystem::path& path) {
  const Raster r = load_image(path);
  require(r.channels() == 1, ErrorKind::UnsupportedFormat,
          path.string() + ": heatmaps must be single-channel");
  HeatMap h(r.width(), r.height());
  for (std::size_t i = 0; i < h.size(); ++i)
    h.vec()[i] = r.samples()[i] / 255.0f;
  return h;
}

inline Grid<std::uint8_t> quantize_scores(const Grid<float>& scores) {
  Grid<std::uint8_t> q(scores.width(), scores.height());
  for (std::size_t i = 0; i < q.size(); ++i)
    q.vec()[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(scores.vec()[i] * 255.0), 0L, 255L));
  return q;
}

inline void save_png(const std::filesystem::path& path, const Raster& img) {
  const Bytes b = encode_png(img);
  write_file_atomic(path, b.data(), b.size());
}

inline void save_png(const std::filesystem::path& path,
                     const Grid<std::uint8_t>& plane) {
  const Bytes b = encode_png(plane);
  write_file_atomic(path, b.data(), b.size());
}

inline void save_jpeg(const std::filesystem::path& path, const Raster& img,
                      int quality) {
  const Bytes b = encode_jpeg(img, quality);
  write_file_atomic(path, b.data(), b.size());
}

}  // namespace tamperscope::imaging
