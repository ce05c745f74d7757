#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cssa/dictionary.hpp"
#include "cssa/spectral.hpp"

namespace cssa {

/// Sparsity structure imposed across the N coefficient maps of each filter.
enum class Structure {
  L1,     // independent elementwise l1 (no coupling)
  L21,    // row-sparse: l2 over modalities, summed over rows
  LInf1,  // row-sparse with l_inf rows
  L1L21,  // element- plus row-sparsity
};

std::string_view to_string(Structure s);
/// Accepts "l1", "l21", "linf1", "l1l21". Throws ConfigError otherwise.
Structure parse_structure(std::string_view name);

struct Regularizer {
  Structure kind = Structure::L21;
  double lambda = 0.0;  // L1, L21, LInf1
  double gamma1 = 0.0;  // L1L21 elementwise weight
  double gamma2 = 0.0;  // L1L21 row weight

  static Regularizer l1(double lambda) { return {Structure::L1, lambda, 0.0, 0.0}; }
  static Regularizer l21(double lambda) { return {Structure::L21, lambda, 0.0, 0.0}; }
  static Regularizer linf1(double lambda) { return {Structure::LInf1, lambda, 0.0, 0.0}; }
  static Regularizer l1_l21(double gamma1, double gamma2) { return {Structure::L1L21, 0.0, gamma1, gamma2}; }
};

struct SolverOptions {
  double rho = 10.0;
  int max_iter = 200;
  double tol_primal = 1e-4;  // scaled by sqrt(N*K*P)
  double tol_dual = 1e-4;
  bool record_history = false;
  double zero_tol_rel = 1e-8;  // diagnostics count |x| > zero_tol_rel * max|X|
};

/// N×K coefficient maps X^(n)_k, all H×W. Map (n, k) lives at index n*K + k.
class CoefficientSet {
 public:
  CoefficientSet() = default;
  CoefficientSet(std::size_t signals, std::size_t filters, std::size_t height, std::size_t width);

  std::size_t signals() const { return signals_; }
  std::size_t filters() const { return filters_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }
  std::size_t entries() const { return signals_ * filters_ * pixels(); }

  Plane& map(std::size_t n, std::size_t k) { return maps_[n * filters_ + k]; }
  const Plane& map(std::size_t n, std::size_t k) const { return maps_[n * filters_ + k]; }
  std::span<Plane> maps() { return maps_; }
  std::span<const Plane> maps() const { return maps_; }
  /// The K maps of signal n.
  std::span<const Plane> signal_maps(std::size_t n) const {
    return std::span<const Plane>(maps_).subspan(n * filters_, filters_);
  }

  bool same_shape(const CoefficientSet& o) const {
    return signals_ == o.signals_ && filters_ == o.filters_ && height_ == o.height_ && width_ == o.width_;
  }
  double max_abs() const;

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;

 private:
  std::size_t signals_ = 0, filters_ = 0, height_ = 0, width_ = 0;
  std::vector<Plane> maps_;
};

/// Iterates of one encode run: auxiliary Y, primary X, scaled multipliers U.
struct AdmmState {
  CoefficientSet Y, X, U;
  int iter = 0;
  std::vector<double> primal_res;
  std::vector<double> dual_res;
};

struct EncodeDiagnostics {
  double sparsity_ratio = 0.0;
  double common_support_pct = 0.0;
  double approx_error = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct EncodeResult {
  CoefficientSet X;
  EncodeDiagnostics diagnostics;
  AdmmState state;
};

/// Exact minimiser over Y of ½||Σ_k D_k*Y_k - s||² + (ρ/2)||Y - Z||², solved
/// per frequency bin with the Sherman–Morrison formula.
std::vector<Plane> y_update(const Plane& signal, std::span<const Plane> z,
                            std::span<const HalfSpectrum> dict_spectra, double rho);

/// Row-wise proximal step on W = Y + U: each (k, p) row across the N signals is
/// mapped through the prox of the regularizer scaled by 1/ρ.
CoefficientSet x_update(const CoefficientSet& w, const Regularizer& reg, double rho);

/// ADMM solve of the convolutional (simultaneous) sparse coding problem.
/// `dicts` holds either a single dictionary shared by all signals or one per
/// signal. X and U start at zero.
EncodeResult encode(std::span<const Plane> signals, std::span<const Dictionary> dicts,
                    const Regularizer& reg, const SolverOptions& opts);

/// Per-signal Σ_k D_k * X_k.
std::vector<Plane> reconstruct(const CoefficientSet& x, std::span<const Dictionary> dicts);

/// 100 |∩ supp| / |∪ supp| over all (k, p) sites. 0 for an empty union.
double support_overlap(const CoefficientSet& x, double zero_tol);
double sparsity_ratio(const CoefficientSet& x, double zero_tol);
double approx_error(std::span<const Plane> signals, const CoefficientSet& x, std::span<const Dictionary> dicts);

double default_zero_tol(const CoefficientSet& x, double rel = 1e-8);

/// Value of the regularizer at x.
double penalty(const CoefficientSet& x, const Regularizer& reg);
/// ½ Σ_n ||Σ_k D_k * X^(n)_k - s^(n)||² + penalty.
double objective(std::span<const Plane> signals, const CoefficientSet& x, std::span<const Dictionary> dicts,
                 const Regularizer& reg);

EncodeDiagnostics diagnose(std::span<const Plane> signals, const CoefficientSet& x,
                           std::span<const Dictionary> dicts, double zero_tol_rel = 1e-8);

}  // namespace cssa
