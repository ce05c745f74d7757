#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cssa/dictionary.hpp"
#include "cssa/solver.hpp"
#include "cssa/spectral.hpp"

namespace cssa {

struct RgbImage {
  Plane red, green, blue;

  std::size_t height() const { return red.height(); }
  std::size_t width() const { return red.width(); }
};

struct YcbcrImage {
  Plane luma, cb, cr;
};

struct BandDecomposition {
  Plane low, high;
};

/// Max-absolute-value selection between the VL and NIR coefficient maps.
struct FusedCoefficients {
  std::vector<Plane> vl, nir;
};

/// Full-range BT.601 on [0, 1]: Y = 0.299R + 0.587G + 0.114B,
/// Cb = 0.5 + 0.564(B - Y), Cr = 0.5 + 0.713(R - Y).
YcbcrImage rgb_to_ycbcr(const RgbImage& img);
/// Exact algebraic inverse of rgb_to_ycbcr, without clamping.
RgbImage ycbcr_to_rgb_unclamped(const YcbcrImage& img);
/// Inverse followed by clamping every channel to [0, 1].
RgbImage ycbcr_to_rgb(const YcbcrImage& img);
RgbImage clamp(RgbImage img);
Plane clamp(Plane p);

/// Tikhonov lowpass with circular first differences:
/// low = argmin ½||x - p||² + (reg/2)(||Gx x||² + ||Gy x||²), high = p - low.
BandDecomposition lowpass_decompose(const Plane& p, double reg);

/// |Xv| >= |Xn| keeps the VL coefficient, otherwise the NIR one.
FusedCoefficients fuse_coeffs_maxabs(std::span<const Plane> xv, std::span<const Plane> xn);

/// Σ_k Fn_k * Dn_k + Σ_k Fv_k * Dv_k. `dicts` is ordered (VL, NIR).
Plane reconstruct_fused(const FusedCoefficients& f, const DictionarySet& dicts);

struct NirVlConfig {
  double lowpass_reg = 5.0;
  Regularizer reg = Regularizer::l1_l21(0.001, 0.01);
  SolverOptions solver;
};

struct NirVlResult {
  RgbImage image;        // clamped output
  YcbcrImage ycbcr;      // fused luma with the VL chroma, before conversion
  EncodeDiagnostics diagnostics;
};

/// Fuses an RGB visible image with a co-registered NIR plane. `dicts` holds
/// two modalities in the order (VL, NIR).
NirVlResult fuse_nir_vl(const RgbImage& vl, const Plane& nir, const DictionarySet& dicts, const NirVlConfig& cfg);

struct MultifocusConfig {
  double lowpass_reg = 5.0;
  Regularizer reg = Regularizer::l21(0.01);
  SolverOptions solver;
};

/// Source index of each (k, p) coefficient kept by the multi-input
/// max-absolute-value rule; -1 where every input is zero. Index k*P + p.
struct Selection {
  std::size_t filters = 0, height = 0, width = 0;
  std::vector<int> source;
};

/// Per (k, p), keeps the coefficient of largest magnitude across signals.
/// Ties go to the lowest signal index. Returns the fused K maps.
std::vector<Plane> fuse_coeffs_maxabs(const CoefficientSet& x, Selection* selection = nullptr);

struct MultifocusResult {
  Plane luma;
  Selection selection;
  EncodeDiagnostics diagnostics;
};

struct MultifocusColorResult {
  RgbImage image;
  YcbcrImage ycbcr;
  MultifocusResult gray;
};

MultifocusResult fuse_multifocus(std::span<const Plane> inputs, const Dictionary& dict, const MultifocusConfig& cfg);

/// Luma fused as above; chroma at each pixel comes from the input owning most
/// kept coefficients among those that reach the pixel through a q×q filter,
/// or the mean chroma when that count is tied.
MultifocusColorResult fuse_multifocus(std::span<const RgbImage> inputs, const Dictionary& dict,
                                      const MultifocusConfig& cfg);

}  // namespace cssa
