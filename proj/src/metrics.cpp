#include "cssa/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cssa/errors.hpp"

namespace cssa {

namespace {

void check_pair(const Plane& a, const Plane& b) {
  if (a.empty() || !a.same_shape(b)) throw ShapeError("metric operands differ in size");
}

constexpr std::size_t kWindow = 11;

std::array<double, kWindow * kWindow> gaussian_window() {
  std::array<double, kWindow * kWindow> w{};
  const double sigma = 1.5;
  const double center = (kWindow - 1) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    for (std::size_t j = 0; j < kWindow; ++j) {
      const double di = i - center, dj = j - center;
      w[i * kWindow + j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      sum += w[i * kWindow + j];
    }
  }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

double entropy(const Plane& p) {
  std::array<std::size_t, 256> hist{};
  for (double v : p.values()) {
    const long level = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    ++hist[static_cast<std::size_t>(level)];
  }
  const double total = static_cast<double>(p.size());
  double en = 0.0;
  for (std::size_t count : hist) {
    if (count == 0) continue;
    const double prob = static_cast<double>(count) / total;
    en -= prob * std::log2(prob);
  }
  return en;
}

double psnr(const Plane& ref, const Plane& test) {
  check_pair(ref, test);
  double sq = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] - test[i];
    sq += d * d;
  }
  if (sq == 0.0) return kInfinitePsnr;
  const double mse = sq / static_cast<double>(ref.size());
  return 10.0 * std::log10(1.0 / mse);
}

double avg_psnr(const Plane& fused, std::span<const Plane> inputs) {
  if (inputs.empty()) throw ShapeError("no reference inputs");
  double sum = 0.0;
  std::size_t finite = 0;
  for (const Plane& in : inputs) {
    const double v = psnr(fused, in);
    if (std::isfinite(v)) {
      sum += v;
      ++finite;
    }
  }
  return finite == 0 ? kInfinitePsnr : sum / static_cast<double>(finite);
}

double ssim(const Plane& a, const Plane& b) {
  check_pair(a, b);
  const std::size_t h = a.height(), w = a.width();
  if (h < kWindow || w < kWindow) throw ShapeError("image smaller than the 11x11 SSIM window");
  static const auto window = gaussian_window();
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;

  double total = 0.0;
  for (std::size_t i = 0; i + kWindow <= h; ++i) {
    for (std::size_t j = 0; j + kWindow <= w; ++j) {
      double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (std::size_t m = 0; m < kWindow; ++m) {
        for (std::size_t n = 0; n < kWindow; ++n) {
          const double g = window[m * kWindow + n];
          const double va = a(i + m, j + n), vb = b(i + m, j + n);
          ma += g * va;
          mb += g * vb;
          saa += g * va * va;
          sbb += g * vb * vb;
          sab += g * va * vb;
        }
      }
      const double var_a = saa - ma * ma, var_b = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
  }
  return total / static_cast<double>((h - kWindow + 1) * (w - kWindow + 1));
}

double avg_ssim(const Plane& fused, std::span<const Plane> inputs) {
  if (inputs.empty()) throw ShapeError("no reference inputs");
  double sum = 0.0;
  for (const Plane& in : inputs) sum += ssim(fused, in);
  return sum / static_cast<double>(inputs.size());
}

double spatial_frequency(const Plane& p) {
  const std::size_t h = p.height(), w = p.width();
  if (h < 2 || w < 2) throw ShapeError("spatial frequency needs at least a 2x2 image");
  double rf = 0.0, cf = 0.0;
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 1; j < w; ++j) {
      const double d = p(i, j) - p(i, j - 1);
      rf += d * d;
    }
  for (std::size_t i = 1; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      const double d = p(i, j) - p(i - 1, j);
      cf += d * d;
    }
  rf /= static_cast<double>(h * (w - 1));
  cf /= static_cast<double>((h - 1) * w);
  return std::sqrt(rf + cf);
}

double edge_intensity(const Plane& p) {
  const std::size_t h = p.height(), w = p.width();
  if (h < 3 || w < 3) throw ShapeError("edge intensity needs at least a 3x3 image");
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < h; ++i) {
    for (std::size_t j = 1; j + 1 < w; ++j) {
      const double gx = (p(i - 1, j + 1) + 2.0 * p(i, j + 1) + p(i + 1, j + 1)) -
                        (p(i - 1, j - 1) + 2.0 * p(i, j - 1) + p(i + 1, j - 1));
      const double gy = (p(i + 1, j - 1) + 2.0 * p(i + 1, j) + p(i + 1, j + 1)) -
                        (p(i - 1, j - 1) + 2.0 * p(i - 1, j) + p(i - 1, j + 1));
      total += std::sqrt(gx * gx + gy * gy);
    }
  }
  return total / static_cast<double>((h - 2) * (w - 2));
}

MetricReport evaluate(const Plane& fused, std::span<const Plane> inputs) {
  return {entropy(fused), avg_psnr(fused, inputs), avg_ssim(fused, inputs), spatial_frequency(fused),
          edge_intensity(fused)};
}

}  // namespace cssa
