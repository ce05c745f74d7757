#include "cssa/io.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "cssa/cdl.hpp"
#include "cssa/errors.hpp"
#include "support/fixtures.hpp"

namespace cssa {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("cssa_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

Plane quantized(std::size_t h, std::size_t w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> level(0, 255);
  Plane p(h, w);
  for (double& v : p.values()) v = level(rng) / 255.0;
  return p;
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TEST(Image, EightBitRoundTripIsExact) {
  TempDir dir;
  std::mt19937_64 rng(1);
  const Plane gray = quantized(13, 17, rng);
  const RgbImage rgb{quantized(9, 5, rng), quantized(9, 5, rng), quantized(9, 5, rng)};
  for (const char* ext : {".png", ".pgm"}) {
    save_image(gray, dir / (std::string("g") + ext));
    EXPECT_EQ(std::get<Plane>(load_image(dir / (std::string("g") + ext))), gray) << ext;
  }
  for (const char* ext : {".png", ".ppm"}) {
    save_image(rgb, dir / (std::string("c") + ext));
    const RgbImage back = std::get<RgbImage>(load_image(dir / (std::string("c") + ext)));
    EXPECT_EQ(back.red, rgb.red) << ext;
    EXPECT_EQ(back.green, rgb.green) << ext;
    EXPECT_EQ(back.blue, rgb.blue) << ext;
  }
}

TEST(Image, SixteenBitNormalizesBy65535) {
  TempDir dir;
  // Binary 16-bit PGM, big-endian samples.
  const std::string header = "P5\n2 1\n65535\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  for (std::uint16_t v : {std::uint16_t{65535}, std::uint16_t{1000}}) {
    bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  write_bytes(dir / "deep.pgm", bytes);
  const Plane p = std::get<Plane>(load_image(dir / "deep.pgm"));
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 1000.0 / 65535.0);
}

TEST(Image, AsciiFormatsAndDispatch) {
  TempDir dir;
  std::ofstream(dir / "a.pgm") << "P2\n# comment\n2 2\n255\n0 255\n51 102\n";
  std::ofstream(dir / "a.ppm") << "P3\n1 1\n255\n255 0 51\n";
  const Image g = load_image(dir / "a.pgm");
  ASSERT_TRUE(std::holds_alternative<Plane>(g));
  EXPECT_EQ(std::get<Plane>(g), Plane(2, 2, {0.0, 1.0, 0.2, 0.4}));
  const Image c = load_image(dir / "a.ppm");
  ASSERT_TRUE(std::holds_alternative<RgbImage>(c));
  EXPECT_EQ(std::get<RgbImage>(c).blue[0], 0.2);
}

TEST(Image, SaveRoundsHalfAwayFromZeroAndClamps) {
  TempDir dir;
  save_image(Plane(1, 4, {-0.2, 1.5, 0.5 / 255.0, 1.5 / 255.0}), dir / "r.pgm");
  EXPECT_EQ(std::get<Plane>(load_image(dir / "r.pgm")), Plane(1, 4, {0.0, 1.0, 1.0 / 255.0, 2.0 / 255.0}));
}

TEST(Image, Errors) {
  TempDir dir;
  EXPECT_THROW(load_image(dir / "missing.png"), IoError);
  std::ofstream(dir / "junk.png") << "not an image";
  EXPECT_THROW(load_image(dir / "junk.png"), IoError);
  std::ofstream(dir / "x.bmp") << "BM";
  EXPECT_THROW(load_image(dir / "x.bmp"), IoError);
  EXPECT_THROW(save_image(Plane(2, 2), dir / "x.tiff"), IoError);
}

TEST(Image, FixturesLoad) {
  const testing::ImagePair p = testing::load_pair("pair0");
  EXPECT_EQ(p.vl.height(), 64u);
  EXPECT_EQ(p.nir.width(), 64u);
  EXPECT_TRUE(std::holds_alternative<RgbImage>(load_image(testing::data_dir() / "large_vl.png")));
}

TEST(DictFile, RoundTripIsBitExact) {
  TempDir dir;
  const DictionarySet set({init_dictionary(32, 8, 1), init_dictionary(32, 8, 2)});
  save_dict(set, dir / "d.cssd");
  const auto bytes = read_bytes(dir / "d.cssd");
  EXPECT_EQ(bytes.size(), 18u + 2u * 32u * 64u * 8u);
  EXPECT_EQ(bytes.size(), 32786u);
  EXPECT_EQ(std::memcmp(bytes.data(), "CSSD", 4), 0);
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  const DictionarySet back = load_dict(dir / "d.cssd");
  ASSERT_EQ(back.modalities(), 2u);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t k = 0; k < 32; ++k) EXPECT_EQ(back[n].filter(k), set[n].filter(k));
  EXPECT_EQ(encode_dict(back), bytes);
}

TEST(DictFile, PayloadIsLittleEndianInModalityFilterRowColumnOrder) {
  const DictionarySet set({Dictionary({Plane(2, 2, {0.5, -0.25, 0.125, 0.0})})});
  const auto bytes = encode_dict(set);
  ASSERT_EQ(bytes.size(), kDictHeaderBytes + 4 * 8);
  EXPECT_EQ(bytes[6], 1);   // N
  EXPECT_EQ(bytes[10], 1);  // K
  EXPECT_EQ(bytes[14], 2);  // q
  // 0.5 = 0x3FE0000000000000 stored little-endian.
  EXPECT_EQ(bytes[kDictHeaderBytes + 7], 0x3F);
  EXPECT_EQ(bytes[kDictHeaderBytes + 6], 0xE0);
  // -0.25 = 0xBFD0000000000000
  EXPECT_EQ(bytes[kDictHeaderBytes + 15], 0xBF);
  EXPECT_EQ(bytes[kDictHeaderBytes + 14], 0xD0);
}

TEST(DictFile, CorruptedMagicNamesExpectedBytes) {
  auto bytes = encode_dict(DictionarySet({init_dictionary(2, 3, 0)}));
  bytes[0] = 'X';
  try {
    decode_dict(bytes);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("CSSD"), std::string::npos) << e.what();
  }
}

TEST(DictFile, RejectsBadVersionTruncationAndNorms) {
  const auto good = encode_dict(DictionarySet({init_dictionary(2, 3, 0)}));
  auto bad_version = good;
  bad_version[4] = 2;
  EXPECT_THROW(decode_dict(bad_version), IoError);
  auto truncated = good;
  truncated.resize(good.size() - 3);
  EXPECT_THROW(decode_dict(truncated), IoError);
  EXPECT_THROW(decode_dict(std::vector<std::uint8_t>(good.begin(), good.begin() + 10)), IoError);
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(decode_dict(trailing), IoError);

  auto heavy = good;
  const double big = 2.0;
  std::memcpy(heavy.data() + kDictHeaderBytes, &big, sizeof big);
  EXPECT_THROW(decode_dict(heavy), IoError);
  TempDir dir;
  EXPECT_THROW(load_dict(dir / "none.cssd"), IoError);
}

TEST(Csv, FormatsNumbersAndChecksColumns) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(100.0), "100");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b"});
  csv.row({"1", "2"});
  EXPECT_EQ(out.str(), "a,b\n1,2\n");
  EXPECT_THROW(csv.row({"1"}), std::logic_error);
}

}  // namespace
}  // namespace cssa
