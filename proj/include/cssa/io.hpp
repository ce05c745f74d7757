#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "cssa/dictionary.hpp"
#include "cssa/fusion.hpp"
#include "cssa/spectral.hpp"

namespace cssa {

/// Grayscale files load as a Plane, colour files as an RgbImage.
using Image = std::variant<Plane, RgbImage>;

/// Reads PNG or binary/ASCII PGM/PPM (8 or 16 bit), normalized to [0, 1].
/// Alpha channels are dropped. Throws IoError.
Image load_image(const std::filesystem::path& path);

/// Writes 8-bit PNG or binary PGM/PPM, chosen by extension. Values are
/// clamped to [0, 1] and rounded half away from zero.
void save_image(const Plane& img, const std::filesystem::path& path);
void save_image(const RgbImage& img, const std::filesystem::path& path);

/// Luma of a colour image, or the plane itself.
Plane to_luma(const Image& img);

// Dictionary file: "CSSD", u16 version = 1, u32 N, u32 K, u32 q, then N*K*q*q
// little-endian f64 in (modality, filter, row, column) order.
inline constexpr char kDictMagic[4] = {'C', 'S', 'S', 'D'};
inline constexpr std::uint16_t kDictVersion = 1;
inline constexpr std::size_t kDictHeaderBytes = 4 + 2 + 3 * 4;

std::vector<std::uint8_t> encode_dict(const DictionarySet& set);
DictionarySet decode_dict(const std::vector<std::uint8_t>& bytes);
void save_dict(const DictionarySet& set, const std::filesystem::path& path);
DictionarySet load_dict(const std::filesystem::path& path);

/// Shortest round-trippable decimal; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

/// Minimal CSV writer: comma separated, LF line endings, header first.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::size_t columns() const { return columns_; }

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace cssa
