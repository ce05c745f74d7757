#include "cssa/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <ostream>
#include <sstream>

#include "cssa/errors.hpp"

namespace cssa {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::uint8_t quantize8(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// Raw interleaved samples plus their layout, shared by the PNG and PNM paths.
struct Raster {
  std::size_t height = 0, width = 0, channels = 0;
  double maxval = 255.0;
  std::vector<std::uint32_t> samples;
};

Image to_image(const Raster& r) {
  const double maxval = r.maxval;
  if (r.channels == 1) {
    Plane p(r.height, r.width);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r.samples[i] / maxval;
    return p;
  }
  RgbImage img{Plane(r.height, r.width), Plane(r.height, r.width), Plane(r.height, r.width)};
  for (std::size_t i = 0; i < r.height * r.width; ++i) {
    img.red[i] = r.samples[3 * i] / maxval;
    img.green[i] = r.samples[3 * i + 1] / maxval;
    img.blue[i] = r.samples[3 * i + 2] / maxval;
  }
  return img;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

// libpng reports errors by longjmp; every C++ object used after setjmp is
// constructed before it.
Raster read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  Raster r;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> buffer;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("'" + path.string() + "' is not a readable PNG file");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int depth = png_get_bit_depth(png, info);
  r.height = png_get_image_height(png, info);
  r.width = png_get_image_width(png, info);
  r.channels = png_get_channels(png, info);
  r.maxval = depth == 16 ? 65535.0 : 255.0;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * r.height);
  rows.resize(r.height);
  for (std::size_t i = 0; i < r.height; ++i) rows[i] = buffer.data() + i * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (r.channels != 1 && r.channels != 3) throw IoError("unsupported PNG channel layout in '" + path.string() + "'");
  const std::size_t count = r.height * r.width * r.channels;
  r.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    r.samples[i] = depth == 16 ? (std::uint32_t{buffer[2 * i]} << 8) | buffer[2 * i + 1] : buffer[i];
  return r;
}

void write_png(const std::filesystem::path& path, std::size_t height, std::size_t width, int channels,
               const std::vector<std::uint8_t>& pixels) {
  FilePtr file = open_file(path, "wb");
  std::vector<png_bytep> rows(height);
  for (std::size_t i = 0; i < height; ++i)
    rows[i] = const_cast<png_bytep>(pixels.data() + i * width * static_cast<std::size_t>(channels));
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing PNG '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Netpbm header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

std::size_t pnm_number(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = pnm_token(in);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
    throw IoError("malformed netpbm header in '" + path.string() + "'");
  return v;
}

Raster read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string magic = pnm_token(in);
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6")
    throw IoError("'" + path.string() + "' is not a PGM/PPM file");
  Raster r;
  r.channels = (magic == "P3" || magic == "P6") ? 3 : 1;
  r.width = pnm_number(in, path);
  r.height = pnm_number(in, path);
  const std::size_t maxval = pnm_number(in, path);
  if (r.width == 0 || r.height == 0 || maxval == 0 || maxval > 65535)
    throw IoError("unsupported netpbm geometry or depth in '" + path.string() + "'");
  r.maxval = static_cast<double>(maxval);
  const std::size_t count = r.width * r.height * r.channels;
  r.samples.resize(count);
  if (magic == "P2" || magic == "P3") {
    for (auto& s : r.samples) {
      s = static_cast<std::uint32_t>(pnm_number(in, path));
      if (s > maxval) throw IoError("sample exceeds maxval in '" + path.string() + "'");
    }
    return r;
  }
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw IoError("truncated pixel data in '" + path.string() + "'");
  for (std::size_t i = 0; i < count; ++i)
    r.samples[i] = bytes_per == 2 ? (std::uint32_t{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
  return r;
}

void write_pnm(const std::filesystem::path& path, std::size_t height, std::size_t width, int channels,
               const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << (channels == 1 ? "P5" : "P6") << '\n' << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

enum class Format { Png, Pgm, Ppm };

Format format_for(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return Format::Png;
  if (ext == ".pgm") return Format::Pgm;
  if (ext == ".ppm" || ext == ".pnm") return Format::Ppm;
  throw IoError("unsupported image format '" + ext + "' (use .png, .pgm or .ppm)");
}

void write_raster(const std::filesystem::path& path, std::size_t h, std::size_t w, int channels,
                  const std::vector<std::uint8_t>& pixels) {
  const Format f = format_for(path);
  if (f == Format::Png) return write_png(path, h, w, channels, pixels);
  if ((f == Format::Pgm) != (channels == 1))
    throw IoError("'" + path.string() + "': PGM holds grayscale and PPM holds colour images");
  write_pnm(path, h, w, channels, pixels);
}

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::vector<std::uint8_t>& in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in[offset + i]} << (8 * i);
  return v;
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file '" + path.string() + "'");
  const Format f = format_for(path);
  return to_image(f == Format::Png ? read_png(path) : read_pnm(path));
}

void save_image(const Plane& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> px(img.size());
  std::transform(img.values().begin(), img.values().end(), px.begin(), quantize8);
  write_raster(path, img.height(), img.width(), 1, px);
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
  const std::size_t n = img.height() * img.width();
  std::vector<std::uint8_t> px(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    px[3 * i] = quantize8(img.red[i]);
    px[3 * i + 1] = quantize8(img.green[i]);
    px[3 * i + 2] = quantize8(img.blue[i]);
  }
  write_raster(path, img.height(), img.width(), 3, px);
}

Plane to_luma(const Image& img) {
  if (const auto* p = std::get_if<Plane>(&img)) return *p;
  return rgb_to_ycbcr(std::get<RgbImage>(img)).luma;
}

std::vector<std::uint8_t> encode_dict(const DictionarySet& set) {
  std::vector<std::uint8_t> out(std::begin(kDictMagic), std::end(kDictMagic));
  put_le(out, kDictVersion, 2);
  put_le(out, set.modalities(), 4);
  put_le(out, set.count(), 4);
  put_le(out, set.side(), 4);
  for (const Dictionary& d : set.all())
    for (const Plane& f : d.filters())
      for (double v : f.values()) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

DictionarySet decode_dict(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kDictHeaderBytes) throw IoError("dictionary file truncated: header needs 18 bytes");
  if (!std::equal(std::begin(kDictMagic), std::end(kDictMagic), bytes.begin()))
    throw IoError("bad dictionary magic: expected bytes 'CSSD' (43 53 53 44)");
  const auto version = get_le(bytes, 4, 2);
  if (version != kDictVersion)
    throw IoError("unsupported dictionary version " + std::to_string(version) + " (expected 1)");
  const std::size_t n = get_le(bytes, 6, 4), k = get_le(bytes, 10, 4), q = get_le(bytes, 14, 4);
  if (n == 0 || k == 0 || q == 0) throw IoError("dictionary header has a zero dimension");
  const std::size_t expected = kDictHeaderBytes + n * k * q * q * 8;
  if (bytes.size() < expected)
    throw IoError("dictionary payload truncated: expected " + std::to_string(expected) + " bytes, got " +
                  std::to_string(bytes.size()));
  if (bytes.size() > expected) throw IoError("dictionary file has trailing bytes after the payload");

  std::size_t offset = kDictHeaderBytes;
  std::vector<Dictionary> dicts;
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<Plane> filters;
    for (std::size_t f = 0; f < k; ++f) {
      Plane p(q, q);
      for (double& v : p.values()) {
        v = std::bit_cast<double>(get_le(bytes, offset, 8));
        offset += 8;
      }
      if (!std::isfinite(squared_norm(p))) throw IoError("dictionary holds non-finite values");
      if (std::sqrt(squared_norm(p)) > 1.0 + Dictionary::kNormSlack)
        throw IoError("dictionary filter " + std::to_string(f) + " of modality " + std::to_string(m) +
                      " violates the unit-norm bound");
      filters.push_back(std::move(p));
    }
    dicts.emplace_back(std::move(filters));
  }
  return DictionarySet(std::move(dicts));
}

void save_dict(const DictionarySet& set, const std::filesystem::path& path) {
  const auto bytes = encode_dict(set);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

DictionarySet load_dict(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dictionary '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_dict(bytes);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

}  // namespace cssa
