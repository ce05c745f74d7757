#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cssa/cdl.hpp"
#include "cssa/fusion.hpp"
#include "cssa/io.hpp"
#include "cssa/spectral.hpp"

namespace cssa::testing {

inline std::filesystem::path data_dir() { return CSSA_TEST_DATA_DIR; }

inline Plane random_plane(std::size_t h, std::size_t w, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Plane p(h, w);
  for (double& v : p.values()) v = u(rng);
  return p;
}

inline Plane impulse(std::size_t h, std::size_t w, std::size_t r = 0, std::size_t c = 0) {
  Plane p(h, w);
  p(r, c) = 1.0;
  return p;
}

inline Dictionary impulse_dictionary() { return Dictionary({impulse(1, 1)}); }

struct ImagePair {
  RgbImage vl;
  Plane nir;
};

/// VL/NIR stand-in pair from tests/data (see make_fixtures.py).
inline ImagePair load_pair(const std::string& name) {
  ImagePair p;
  p.vl = std::get<RgbImage>(load_image(data_dir() / (name + "_vl.png")));
  p.nir = std::get<Plane>(load_image(data_dir() / (name + "_nir.png")));
  return p;
}

/// Highpass components of the luma/NIR planes of a fixture pair.
inline std::vector<Plane> highpass_pair(const std::string& name, double reg = 5.0) {
  const ImagePair p = load_pair(name);
  return {lowpass_decompose(rgb_to_ycbcr(p.vl).luma, reg).high, lowpass_decompose(p.nir, reg).high};
}

/// Two correlated signals synthesised from a dictionary: a shared sparse
/// support with independent amplitudes, plus atoms private to each signal and
/// a little noise.
inline std::vector<Plane> correlated_pair(const Dictionary& dict, std::size_t h, std::size_t w, std::mt19937_64& rng,
                                          double density = 0.02, double noise = 0.01) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t k = dict.count();
  std::vector<std::vector<Plane>> codes(2, std::vector<Plane>(k, Plane(h, w)));
  for (std::size_t f = 0; f < k; ++f)
    for (std::size_t p = 0; p < h * w; ++p) {
      const double r = u(rng);
      if (r < density) {
        codes[0][f][p] = g(rng);
        codes[1][f][p] = g(rng);
      } else if (r < 1.5 * density) {
        codes[r < 1.25 * density ? 0 : 1][f][p] = g(rng);
      }
    }
  std::vector<Plane> out;
  for (int n = 0; n < 2; ++n) {
    Plane s(h, w);
    for (std::size_t f = 0; f < k; ++f) s += circ_conv(pad_filter(dict.filter(f), h, w), codes[n][f]);
    for (double& v : s.values()) v += noise * g(rng);
    out.push_back(std::move(s));
  }
  return out;
}

/// Separable binomial blur applied `passes` times with periodic boundary.
inline Plane blur(const Plane& p, int passes) {
  Plane cur = p;
  const std::size_t h = p.height(), w = p.width();
  for (int it = 0; it < passes; ++it) {
    Plane tmp(h, w);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j)
        tmp(i, j) = 0.25 * cur(i, (j + w - 1) % w) + 0.5 * cur(i, j) + 0.25 * cur(i, (j + 1) % w);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j)
        cur(i, j) = 0.25 * tmp((i + h - 1) % h, j) + 0.5 * tmp(i, j) + 0.25 * tmp((i + 1) % h, j);
  }
  return cur;
}

}  // namespace cssa::testing
