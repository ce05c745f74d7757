#include "cssa/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cssa/errors.hpp"

namespace cssa {

namespace {

constexpr double kCbScale = 0.564;
constexpr double kCrScale = 0.713;

void check_rgb(const RgbImage& img) {
  if (img.red.empty() || !img.red.same_shape(img.green) || !img.red.same_shape(img.blue))
    throw ShapeError("RGB channels differ in size");
}

}  // namespace

YcbcrImage rgb_to_ycbcr(const RgbImage& img) {
  check_rgb(img);
  const std::size_t h = img.height(), w = img.width();
  YcbcrImage out{Plane(h, w), Plane(h, w), Plane(h, w)};
  for (std::size_t i = 0; i < h * w; ++i) {
    const double r = img.red[i], g = img.green[i], b = img.blue[i];
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    out.luma[i] = y;
    out.cb[i] = 0.5 + (b - y) * kCbScale;
    out.cr[i] = 0.5 + (r - y) * kCrScale;
  }
  return out;
}

RgbImage ycbcr_to_rgb_unclamped(const YcbcrImage& img) {
  if (img.luma.empty() || !img.luma.same_shape(img.cb) || !img.luma.same_shape(img.cr))
    throw ShapeError("YCbCr components differ in size");
  const std::size_t h = img.luma.height(), w = img.luma.width();
  RgbImage out{Plane(h, w), Plane(h, w), Plane(h, w)};
  for (std::size_t i = 0; i < h * w; ++i) {
    const double y = img.luma[i];
    const double r = y + (img.cr[i] - 0.5) / kCrScale;
    const double b = y + (img.cb[i] - 0.5) / kCbScale;
    out.red[i] = r;
    out.blue[i] = b;
    out.green[i] = (y - 0.299 * r - 0.114 * b) / 0.587;
  }
  return out;
}

Plane clamp(Plane p) {
  for (double& v : p.values()) v = std::clamp(v, 0.0, 1.0);
  return p;
}

RgbImage clamp(RgbImage img) {
  return {clamp(std::move(img.red)), clamp(std::move(img.green)), clamp(std::move(img.blue))};
}

RgbImage ycbcr_to_rgb(const YcbcrImage& img) { return clamp(ycbcr_to_rgb_unclamped(img)); }

BandDecomposition lowpass_decompose(const Plane& p, double reg) {
  if (!(reg > 0.0)) throw ConfigError("lowpass regularization must be positive");
  const std::size_t h = p.height(), w = p.width();
  HalfSpectrum s = rdft2(p);
  const std::size_t cols = s.cols();
  std::vector<double> gy(h), gx(cols);
  for (std::size_t r = 0; r < h; ++r) gy[r] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * r / h);
  for (std::size_t c = 0; c < cols; ++c) gx[c] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * c / w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < cols; ++c) s.data[r * cols + c] /= 1.0 + reg * (gy[r] + gx[c]);
  BandDecomposition out{irdft2(s), Plane()};
  out.high = p - out.low;
  return out;
}

FusedCoefficients fuse_coeffs_maxabs(std::span<const Plane> xv, std::span<const Plane> xn) {
  if (xv.size() != xn.size()) throw ShapeError("VL and NIR coefficient sets differ in filter count");
  FusedCoefficients out;
  out.vl.reserve(xv.size());
  out.nir.reserve(xn.size());
  for (std::size_t k = 0; k < xv.size(); ++k) {
    if (!xv[k].same_shape(xn[k])) throw ShapeError("VL and NIR coefficient maps differ in size");
    Plane fv(xv[k].height(), xv[k].width()), fn(xv[k].height(), xv[k].width());
    for (std::size_t i = 0; i < fv.size(); ++i) {
      if (std::abs(xv[k][i]) >= std::abs(xn[k][i]))
        fv[i] = xv[k][i];
      else
        fn[i] = xn[k][i];
    }
    out.vl.push_back(std::move(fv));
    out.nir.push_back(std::move(fn));
  }
  return out;
}

Plane reconstruct_fused(const FusedCoefficients& f, const DictionarySet& dicts) {
  if (dicts.modalities() != 2) throw ShapeError("fusion needs a (VL, NIR) dictionary pair");
  if (f.vl.size() != dicts.count() || f.nir.size() != dicts.count())
    throw ShapeError("fused coefficient count does not match the dictionaries");
  if (f.vl.empty()) throw ShapeError("no fused coefficients");
  const std::size_t h = f.vl.front().height(), w = f.vl.front().width();
  CoefficientSet x(2, dicts.count(), h, w);
  for (std::size_t k = 0; k < dicts.count(); ++k) {
    if (!f.vl[k].same_shape(x.map(0, k)) || !f.nir[k].same_shape(x.map(1, k)))
      throw ShapeError("fused coefficient maps differ in size");
    x.map(0, k) = f.vl[k];
    x.map(1, k) = f.nir[k];
  }
  const auto parts = reconstruct(x, dicts.all());
  return parts[0] + parts[1];
}

NirVlResult fuse_nir_vl(const RgbImage& vl, const Plane& nir, const DictionarySet& dicts, const NirVlConfig& cfg) {
  check_rgb(vl);
  if (!vl.red.same_shape(nir)) throw ShapeError("VL and NIR images differ in size");
  if (dicts.modalities() != 2) throw ShapeError("NIR-VL fusion needs two dictionaries ordered (VL, NIR)");

  const YcbcrImage vl_ycc = rgb_to_ycbcr(vl);
  const BandDecomposition vl_bands = lowpass_decompose(vl_ycc.luma, cfg.lowpass_reg);
  const BandDecomposition nir_bands = lowpass_decompose(nir, cfg.lowpass_reg);

  const std::vector<Plane> highs{vl_bands.high, nir_bands.high};
  const EncodeResult enc = encode(highs, dicts.all(), cfg.reg, cfg.solver);
  const FusedCoefficients fused = fuse_coeffs_maxabs(enc.X.signal_maps(0), enc.X.signal_maps(1));

  NirVlResult out;
  out.ycbcr = {vl_bands.low + reconstruct_fused(fused, dicts), vl_ycc.cb, vl_ycc.cr};
  out.image = ycbcr_to_rgb(out.ycbcr);
  out.diagnostics = enc.diagnostics;
  return out;
}

std::vector<Plane> fuse_coeffs_maxabs(const CoefficientSet& x, Selection* selection) {
  const std::size_t filters = x.filters(), pixels = x.pixels();
  std::vector<Plane> fused(filters, Plane(x.height(), x.width()));
  if (selection) {
    *selection = Selection{filters, x.height(), x.width(), std::vector<int>(filters * pixels, -1)};
  }
  for (std::size_t k = 0; k < filters; ++k) {
    for (std::size_t p = 0; p < pixels; ++p) {
      std::size_t best = 0;
      double best_mag = std::abs(x.map(0, k)[p]);
      for (std::size_t n = 1; n < x.signals(); ++n) {
        const double mag = std::abs(x.map(n, k)[p]);
        if (mag > best_mag) {
          best = n;
          best_mag = mag;
        }
      }
      fused[k][p] = x.map(best, k)[p];
      if (selection && best_mag > 0.0) selection->source[k * pixels + p] = static_cast<int>(best);
    }
  }
  return fused;
}

MultifocusResult fuse_multifocus(std::span<const Plane> inputs, const Dictionary& dict, const MultifocusConfig& cfg) {
  if (inputs.size() < 2) throw ShapeError("multifocus fusion needs at least two inputs");
  for (const Plane& p : inputs)
    if (p.empty() || !p.same_shape(inputs.front())) throw ShapeError("multifocus inputs differ in size");

  const std::size_t h = inputs.front().height(), w = inputs.front().width();
  std::vector<Plane> highs;
  Plane low(h, w);
  for (const Plane& p : inputs) {
    BandDecomposition b = lowpass_decompose(p, cfg.lowpass_reg);
    low += b.low;
    highs.push_back(std::move(b.high));
  }
  low *= 1.0 / static_cast<double>(inputs.size());

  const std::span<const Dictionary> dicts(&dict, 1);
  const EncodeResult enc = encode(highs, dicts, cfg.reg, cfg.solver);

  MultifocusResult out;
  CoefficientSet fused(1, dict.count(), h, w);
  auto maps = fuse_coeffs_maxabs(enc.X, &out.selection);
  for (std::size_t k = 0; k < dict.count(); ++k) fused.map(0, k) = std::move(maps[k]);
  out.luma = low + reconstruct(fused, dicts).front();
  out.diagnostics = enc.diagnostics;
  return out;
}

MultifocusColorResult fuse_multifocus(std::span<const RgbImage> inputs, const Dictionary& dict,
                                      const MultifocusConfig& cfg) {
  if (inputs.size() < 2) throw ShapeError("multifocus fusion needs at least two inputs");
  std::vector<YcbcrImage> ycc;
  std::vector<Plane> lumas;
  for (const RgbImage& img : inputs) {
    ycc.push_back(rgb_to_ycbcr(img));
    lumas.push_back(ycc.back().luma);
  }

  MultifocusColorResult out;
  out.gray = fuse_multifocus(lumas, dict, cfg);
  const Selection& sel = out.gray.selection;
  const std::size_t h = sel.height, w = sel.width, pixels = h * w;
  const std::size_t q = dict.side();
  const std::size_t n_in = inputs.size();

  // Kept coefficients per input and pixel, summed over filters.
  std::vector<int> kept(n_in * pixels, 0);
  for (std::size_t k = 0; k < sel.filters; ++k)
    for (std::size_t p = 0; p < pixels; ++p)
      if (int s = sel.source[k * pixels + p]; s >= 0) ++kept[static_cast<std::size_t>(s) * pixels + p];

  Plane cb(h, w), cr(h, w);
  std::vector<int> votes(n_in);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      // Coefficient (i-m, j-n) reaches pixel (i, j) through a top-left anchored q×q filter.
      std::fill(votes.begin(), votes.end(), 0);
      for (std::size_t m = 0; m < q; ++m) {
        const std::size_t r = (i + h - m % h) % h;
        for (std::size_t n = 0; n < q; ++n) {
          const std::size_t c = (j + w - n % w) % w;
          for (std::size_t s = 0; s < n_in; ++s) votes[s] += kept[s * pixels + r * w + c];
        }
      }
      const auto best = std::max_element(votes.begin(), votes.end());
      const bool tied = std::count(votes.begin(), votes.end(), *best) > 1;
      const std::size_t p = i * w + j;
      if (tied) {
        double sb = 0.0, sr = 0.0;
        for (const YcbcrImage& y : ycc) {
          sb += y.cb[p];
          sr += y.cr[p];
        }
        cb[p] = sb / static_cast<double>(n_in);
        cr[p] = sr / static_cast<double>(n_in);
      } else {
        const auto s = static_cast<std::size_t>(best - votes.begin());
        cb[p] = ycc[s].cb[p];
        cr[p] = ycc[s].cr[p];
      }
    }
  }
  out.ycbcr = {out.gray.luma, std::move(cb), std::move(cr)};
  out.image = ycbcr_to_rgb(out.ycbcr);
  return out;
}

}  // namespace cssa
