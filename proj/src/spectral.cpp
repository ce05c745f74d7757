#include "cssa/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <new>
#include <stdexcept>
#include <tuple>

#include "cssa/errors.hpp"

namespace cssa {

Plane::Plane(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), values_(height * width, fill) {
  if (height == 0 || width == 0) throw ShapeError("plane dimensions must be positive");
}

Plane::Plane(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height == 0 || width == 0) throw ShapeError("plane dimensions must be positive");
  if (values_.size() != height * width) throw ShapeError("plane data length does not match H*W");
}

Plane& Plane::operator+=(const Plane& rhs) {
  if (!same_shape(rhs)) throw ShapeError("plane size mismatch in +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

Plane& Plane::operator-=(const Plane& rhs) {
  if (!same_shape(rhs)) throw ShapeError("plane size mismatch in -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

Plane& Plane::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Plane operator+(Plane lhs, const Plane& rhs) { return lhs += rhs; }
Plane operator-(Plane lhs, const Plane& rhs) { return lhs -= rhs; }
Plane operator*(double s, Plane p) { return p *= s; }

double squared_norm(const Plane& p) {
  double acc = 0.0;
  for (double v : p.values()) acc += v * v;
  return acc;
}

double max_abs(const Plane& p) {
  double m = 0.0;
  for (double v : p.values()) m = std::max(m, std::abs(v));
  return m;
}

double mean(const Plane& p) {
  double acc = 0.0;
  for (double v : p.values()) acc += v;
  return p.empty() ? 0.0 : acc / static_cast<double>(p.size());
}

namespace {

enum class PlanKind { Forward, Backward, RealForward, RealBackward };

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per (kind, H, W) and live for the process lifetime.
fftw_plan cached_plan(PlanKind kind, std::size_t h, std::size_t w) {
  static std::mutex mutex;
  static std::map<std::tuple<PlanKind, std::size_t, std::size_t>, fftw_plan> plans;

  std::lock_guard lock(mutex);
  auto key = std::make_tuple(kind, h, w);
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  const int hi = static_cast<int>(h);
  const int wi = static_cast<int>(w);
  const unsigned flags = FFTW_ESTIMATE;
  const std::size_t half = h * (w / 2 + 1);
  fftw_plan plan = nullptr;
  switch (kind) {
    case PlanKind::Forward:
    case PlanKind::Backward: {
      auto* in = fftw_alloc_complex(h * w);
      auto* out = fftw_alloc_complex(h * w);
      plan = fftw_plan_dft_2d(hi, wi, in, out,
                              kind == PlanKind::Forward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
      fftw_free(in);
      fftw_free(out);
      break;
    }
    case PlanKind::RealForward: {
      auto* in = fftw_alloc_real(h * w);
      auto* out = fftw_alloc_complex(half);
      plan = fftw_plan_dft_r2c_2d(hi, wi, in, out, flags);
      fftw_free(in);
      fftw_free(out);
      break;
    }
    case PlanKind::RealBackward: {
      auto* in = fftw_alloc_complex(half);
      auto* out = fftw_alloc_real(h * w);
      plan = fftw_plan_dft_c2r_2d(hi, wi, in, out, flags);
      fftw_free(in);
      fftw_free(out);
      break;
    }
  }
  if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
  plans.emplace(key, plan);
  return plan;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

// Plans are made on fftw_malloc'd arrays, so every execution goes through
// per-thread buffers with the same (SIMD) alignment.
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;
  ~AlignedBuffer() { fftw_free(ptr_); }

  template <typename T>
  T* get(std::size_t count) {
    const std::size_t bytes = count * sizeof(T);
    if (bytes > bytes_) {
      fftw_free(ptr_);
      ptr_ = fftw_malloc(bytes);
      if (ptr_ == nullptr) throw std::bad_alloc();
      bytes_ = bytes;
    }
    return static_cast<T*>(ptr_);
  }

 private:
  void* ptr_ = nullptr;
  std::size_t bytes_ = 0;
};

thread_local AlignedBuffer in_buffer, out_buffer;

}  // namespace

Spectrum dft2(const Plane& p) {
  if (p.empty()) throw ShapeError("dft2 of an empty plane");
  const std::size_t h = p.height(), w = p.width();
  Complex* in = in_buffer.get<Complex>(h * w);
  Complex* out = out_buffer.get<Complex>(h * w);
  std::copy(p.values().begin(), p.values().end(), in);
  fftw_execute_dft(cached_plan(PlanKind::Forward, h, w), as_fftw(in), as_fftw(out));
  return Spectrum{h, w, std::vector<Complex>(out, out + h * w)};
}

Plane idft2(const Spectrum& s) {
  const std::size_t h = s.height, w = s.width;
  if (h == 0 || w == 0 || s.data.size() != h * w) throw ShapeError("malformed spectrum");
  Complex* in = in_buffer.get<Complex>(h * w);
  Complex* out = out_buffer.get<Complex>(h * w);
  std::copy(s.data.begin(), s.data.end(), in);
  fftw_execute_dft(cached_plan(PlanKind::Backward, h, w), as_fftw(in), as_fftw(out));

  const double scale = 1.0 / static_cast<double>(h * w);
  Plane p(h, w);
  double real_sq = 0.0, imag_sq = 0.0;
  for (std::size_t i = 0; i < h * w; ++i) {
    const Complex v = out[i] * scale;
    p[i] = v.real();
    real_sq += v.real() * v.real();
    imag_sq += v.imag() * v.imag();
  }
  if (std::sqrt(imag_sq) > 1e-8 * std::sqrt(real_sq + imag_sq))
    throw std::domain_error("idft2: spectrum is not conjugate-symmetric (imaginary residual too large)");
  return p;
}

void rdft2(const Plane& p, HalfSpectrum& out) {
  const std::size_t h = p.height(), w = p.width();
  out.height = h;
  out.width = w;
  const std::size_t bins = h * (w / 2 + 1);
  double* in = in_buffer.get<double>(h * w);
  Complex* spec = out_buffer.get<Complex>(bins);
  std::copy(p.values().begin(), p.values().end(), in);
  fftw_execute_dft_r2c(cached_plan(PlanKind::RealForward, h, w), in, as_fftw(spec));
  out.data.assign(spec, spec + bins);
}

HalfSpectrum rdft2(const Plane& p) {
  if (p.empty()) throw ShapeError("rdft2 of an empty plane");
  HalfSpectrum s;
  rdft2(p, s);
  return s;
}

void irdft2(const HalfSpectrum& s, Plane& out) {
  const std::size_t h = s.height, w = s.width;
  if (!(out.height() == h && out.width() == w)) out = Plane(h, w);
  // c2r transforms overwrite their input
  Complex* spec = in_buffer.get<Complex>(s.data.size());
  double* real = out_buffer.get<double>(h * w);
  std::copy(s.data.begin(), s.data.end(), spec);
  fftw_execute_dft_c2r(cached_plan(PlanKind::RealBackward, h, w), as_fftw(spec), real);
  const double scale = 1.0 / static_cast<double>(h * w);
  for (std::size_t i = 0; i < h * w; ++i) out[i] = real[i] * scale;
}

Plane irdft2(const HalfSpectrum& s) {
  if (s.height == 0 || s.width == 0 || s.data.size() != s.bins()) throw ShapeError("malformed half spectrum");
  Plane p(s.height, s.width);
  irdft2(s, p);
  return p;
}

Plane pad_filter(const Plane& filter, std::size_t height, std::size_t width) {
  if (filter.height() > height || filter.width() > width)
    throw ShapeError("filter larger than the target grid");
  Plane out(height, width);
  for (std::size_t r = 0; r < filter.height(); ++r)
    for (std::size_t c = 0; c < filter.width(); ++c) out(r, c) = filter(r, c);
  return out;
}

Plane crop_filter(const Plane& p, std::size_t q) {
  if (q == 0 || q > p.height() || q > p.width()) throw ShapeError("crop size exceeds plane size");
  Plane out(q, q);
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = 0; c < q; ++c) out(r, c) = p(r, c);
  return out;
}

Plane circ_conv(const Plane& a, const Plane& b) {
  if (!a.same_shape(b)) throw ShapeError("circ_conv operands differ in size");
  HalfSpectrum fa = rdft2(a);
  const HalfSpectrum fb = rdft2(b);
  for (std::size_t i = 0; i < fa.data.size(); ++i) fa.data[i] *= fb.data[i];
  return irdft2(fa);
}

}  // namespace cssa
