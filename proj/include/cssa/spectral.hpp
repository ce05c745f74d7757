#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cssa {

/// Dense row-major H×W array of doubles. Holds images, coefficient maps and
/// (zero-padded) filters.
class Plane {
 public:
  Plane() = default;
  Plane(std::size_t height, std::size_t width, double fill = 0.0);
  Plane(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
  double& operator[](std::size_t idx) { return values_[idx]; }
  double operator[](std::size_t idx) const { return values_[idx]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  bool same_shape(const Plane& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  Plane& operator+=(const Plane& rhs);
  Plane& operator-=(const Plane& rhs);
  Plane& operator*=(double s);

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

Plane operator+(Plane lhs, const Plane& rhs);
Plane operator-(Plane lhs, const Plane& rhs);
Plane operator*(double s, Plane p);

double squared_norm(const Plane& p);
double max_abs(const Plane& p);
double mean(const Plane& p);

using Complex = std::complex<double>;

/// Full H×W complex spectrum of a plane.
struct Spectrum {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Complex> data;

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * width + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * width + c]; }
};

/// Non-redundant half spectrum of a real plane: H × (W/2 + 1) bins. `height`
/// and `width` are the dimensions of the real-domain plane.
struct HalfSpectrum {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Complex> data;

  std::size_t cols() const { return width / 2 + 1; }
  std::size_t bins() const { return height * cols(); }
};

/// Unnormalized forward 2-D DFT.
Spectrum dft2(const Plane& p);

/// Inverse 2-D DFT with the 1/(HW) factor. Throws std::domain_error when the
/// result has an imaginary part above 1e-8 of the array norm, i.e. the input
/// was not the spectrum of a real plane.
Plane idft2(const Spectrum& s);

// Real-input transforms used on the solver hot paths. Same conventions as
// dft2/idft2; the inverse assumes Hermitian symmetry.
HalfSpectrum rdft2(const Plane& p);
Plane irdft2(const HalfSpectrum& s);
void rdft2(const Plane& p, HalfSpectrum& out);
void irdft2(const HalfSpectrum& s, Plane& out);

/// Embeds a q×q filter in the top-left corner of an H×W zero plane.
Plane pad_filter(const Plane& filter, std::size_t height, std::size_t width);

/// Top-left q×q block of a plane.
Plane crop_filter(const Plane& p, std::size_t q);

/// Periodic 2-D convolution, (a*b)(i,j) = sum_{m,n} a(m,n) b(i-m, j-n).
Plane circ_conv(const Plane& a, const Plane& b);

}  // namespace cssa
