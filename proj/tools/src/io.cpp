#include "rscorrect/tools/io.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "rscorrect/error.hpp"

namespace rscorrect::tools {
namespace {

constexpr float kFloUnknown = 1e10f;
constexpr float kFloUnknownThreshold = 1e9f;
constexpr char kFloMagic[4] = {'P', 'I', 'E', 'H'};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw FormatError("cannot open " + path.string());
  }
  return f;
}

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::uint8_t quantize(float v) {
  const double x = std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0;
  return static_cast<std::uint8_t>(std::lround(x));
}

Frame quantized(const Frame& f) {
  Frame out(f.height(), f.width(), f.channels());
  const auto src = f.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = quantize(src[i]) / 255.0f;
  return out;
}

Frame read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  std::array<unsigned char, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), file.get()) != sig.size() ||
      png_sig_cmp(sig.data(), 0, sig.size()) != 0) {
    throw FormatError(path.string() + " is not a PNG file");
  }
  std::string what;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &what, png_fail, png_warn);
  if (!png) throw FormatError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> pixels;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    throw FormatError("cannot decode " + path.string() + ": " + what);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, static_cast<int>(sig.size()));
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  const auto width = static_cast<int>(png_get_image_width(png, info));
  const auto height = static_cast<int>(png_get_image_height(png, info));
  const std::size_t stride = png_get_rowbytes(png, info);
  if (stride != static_cast<std::size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": unsupported PNG layout");
  }
  pixels.resize(stride * height);
  rows.resize(height);
  for (int r = 0; r < height; ++r) rows[r] = pixels.data() + stride * r;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (height < 2 || width < 2) {
    throw DimensionError(path.string() + ": frames must be at least 2x2");
  }
  Frame out(height, width, 3);
  auto data = out.data();
  for (std::size_t i = 0; i < pixels.size(); ++i) data[i] = pixels[i] / 255.0f;
  return out;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  const int h = frame.height();
  const int w = frame.width();
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(h) * w * 3);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int q = 0; q < 3; ++q) {
        const int src = frame.channels() == 3 ? q : 0;
        pixels[(static_cast<std::size_t>(r) * w + c) * 3 + q] = quantize(frame.at(r, c, src));
      }
    }
  }
  FilePtr file = open_file(path, "wb");
  std::string what;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &what, png_fail, png_warn);
  if (!png) throw FormatError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(h);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw FormatError("cannot encode " + path.string() + ": " + what);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < h; ++r) rows[r] = pixels.data() + static_cast<std::size_t>(r) * w * 3;
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw FormatError("write failed: " + path.string());
}

FlowField read_flo(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_bytes(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kFloMagic, 4) != 0) {
    throw FormatError(path.string() + " is not a .flo file");
  }
  const std::uint32_t w = get_u32(bytes.data() + 4);
  const std::uint32_t h = get_u32(bytes.data() + 8);
  if (w < 1 || h < 1 || w > (1u << 16) || h > (1u << 16)) {
    throw FormatError(path.string() + ": implausible flow dimensions");
  }
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() != 12 + n * 8) {
    throw FormatError(path.string() + ": size does not match its header");
  }
  FlowField f(static_cast<int>(h), static_cast<int>(w));
  for (std::size_t k = 0; k < n; ++k) {
    const float u = std::bit_cast<float>(get_u32(bytes.data() + 12 + 8 * k));
    const float v = std::bit_cast<float>(get_u32(bytes.data() + 16 + 8 * k));
    const bool ok = std::isfinite(u) && std::isfinite(v) &&
                    std::abs(u) <= kFloUnknownThreshold && std::abs(v) <= kFloUnknownThreshold;
    f.u[k] = ok ? u : 0.0f;
    f.v[k] = ok ? v : 0.0f;
    f.valid[k] = ok ? 1 : 0;
  }
  return f;
}

void write_flo(const std::filesystem::path& path, const FlowField& flow) {
  std::vector<std::uint8_t> out(kFloMagic, kFloMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(flow.width));
  put_u32(out, static_cast<std::uint32_t>(flow.height));
  for (std::size_t k = 0; k < flow.size(); ++k) {
    const bool ok = flow.valid[k] != 0;
    put_u32(out, std::bit_cast<std::uint32_t>(ok ? flow.u[k] : kFloUnknown));
    put_u32(out, std::bit_cast<std::uint32_t>(ok ? flow.v[k] : kFloUnknown));
  }
  std::ofstream os(path, std::ios::binary);
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) throw FormatError("write failed: " + path.string());
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw FormatError("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xf]);
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_bytes(path));
}

}  // namespace rscorrect::tools
