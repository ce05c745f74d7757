#pragma once

#include <limits>
#include <span>

#include "cssa/spectral.hpp"

namespace cssa {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct MetricReport {
  double en = 0.0;    // bits
  double psnr = 0.0;  // dB
  double ssim = 0.0;
  double sf = 0.0;
  double ei = 0.0;
};

/// Shannon entropy (bits) of the 256-bin histogram of round(255 v).
double entropy(const Plane& p);

/// 10 log10(1 / MSE) with unit peak; +inf for identical planes.
double psnr(const Plane& ref, const Plane& test);
/// Mean PSNR of `fused` against each input. Infinite pairs are skipped unless
/// every pair is infinite.
double avg_psnr(const Plane& fused, std::span<const Plane> inputs);

/// Single-scale SSIM: 11×11 Gaussian window (σ = 1.5), K1 = 0.01, K2 = 0.03,
/// L = 1, averaged over every window position fully inside the image.
double ssim(const Plane& a, const Plane& b);
double avg_ssim(const Plane& fused, std::span<const Plane> inputs);

/// sqrt(RF² + CF²) from RMS horizontal and vertical first differences.
double spatial_frequency(const Plane& p);

/// Mean Sobel gradient magnitude over interior pixels.
double edge_intensity(const Plane& p);

/// EN, SF and EI of the fused plane; PSNR and SSIM averaged over the inputs.
MetricReport evaluate(const Plane& fused, std::span<const Plane> inputs);

}  // namespace cssa
