#include "cssa/solver.hpp"

#include <algorithm>
#include <cmath>

#include "cssa/errors.hpp"
#include "cssa/prox.hpp"

namespace cssa {

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::L1: return "l1";
    case Structure::L21: return "l21";
    case Structure::LInf1: return "linf1";
    case Structure::L1L21: return "l1l21";
  }
  return "?";
}

Structure parse_structure(std::string_view name) {
  if (name == "l1") return Structure::L1;
  if (name == "l21") return Structure::L21;
  if (name == "linf1") return Structure::LInf1;
  if (name == "l1l21") return Structure::L1L21;
  throw ConfigError("unknown structure '" + std::string(name) + "' (expected l1, l21, linf1 or l1l21)");
}

CoefficientSet::CoefficientSet(std::size_t signals, std::size_t filters, std::size_t height, std::size_t width)
    : signals_(signals), filters_(filters), height_(height), width_(width),
      maps_(signals * filters, Plane(height, width)) {
  if (signals == 0 || filters == 0) throw ShapeError("coefficient set needs N >= 1 and K >= 1");
}

double CoefficientSet::max_abs() const {
  double m = 0.0;
  for (const Plane& p : maps_) m = std::max(m, cssa::max_abs(p));
  return m;
}

namespace {

void validate(const Regularizer& reg) {
  if (reg.lambda < 0.0 || reg.gamma1 < 0.0 || reg.gamma2 < 0.0)
    throw ConfigError("regularization weights must be nonnegative");
}

void validate(const SolverOptions& opts) {
  if (!(opts.rho > 0.0)) throw ConfigError("rho must be positive");
  if (opts.max_iter < 1) throw ConfigError("max_iter must be positive");
  if (!(opts.tol_primal > 0.0) || !(opts.tol_dual > 0.0)) throw ConfigError("tolerances must be positive");
}

void check_filters_fit(std::span<const Dictionary> dicts, std::size_t h, std::size_t w) {
  for (const Dictionary& d : dicts) {
    if (d.count() == 0) throw ShapeError("empty dictionary");
    if (d.count() != dicts.front().count()) throw ShapeError("dictionaries differ in filter count");
    if (d.side() > h || d.side() > w) throw ShapeError("filter larger than image");
  }
}

const Dictionary& dict_for(std::span<const Dictionary> dicts, std::size_t n) {
  return dicts.size() == 1 ? dicts.front() : dicts[n];
}

void check_dict_count(std::span<const Dictionary> dicts, std::size_t signals) {
  if (dicts.empty()) throw ShapeError("no dictionary supplied");
  if (dicts.size() != 1 && dicts.size() != signals)
    throw ShapeError("need one shared dictionary or one dictionary per signal");
}

void check_signals(std::span<const Plane> signals) {
  if (signals.empty()) throw ShapeError("no input signals");
  for (const Plane& s : signals) {
    if (s.empty()) throw ShapeError("empty input signal");
    if (!s.same_shape(signals.front())) throw ShapeError("input signals differ in size");
  }
}

std::vector<double> spectral_power(std::span<const HalfSpectrum> spectra) {
  std::vector<double> power(spectra.front().bins(), 0.0);
  for (const HalfSpectrum& d : spectra)
    for (std::size_t f = 0; f < power.size(); ++f) power[f] += std::norm(d.data[f]);
  return power;
}

// conj(D_k) * s for every filter; the signal part of the Y-update right-hand side.
std::vector<HalfSpectrum> correlate(const HalfSpectrum& signal, std::span<const HalfSpectrum> spectra) {
  std::vector<HalfSpectrum> out(spectra.begin(), spectra.end());
  for (HalfSpectrum& d : out)
    for (std::size_t f = 0; f < d.data.size(); ++f) d.data[f] = std::conj(d.data[f]) * signal.data[f];
  return out;
}

// On entry z holds the spectra of Z_k; on exit those of the minimiser Y_k.
// Per bin: (conj(d) d^T + ρI) y = conj(d) s + ρ z, inverted by Sherman–Morrison.
void solve_bins(std::span<const HalfSpectrum> dict, std::span<const HalfSpectrum> dh_s,
                std::span<const double> power, double rho, std::span<HalfSpectrum> z) {
  const std::size_t filters = dict.size();
  const std::size_t bins = power.size();
  const double inv_rho = 1.0 / rho;
  for (std::size_t f = 0; f < bins; ++f) {
    Complex dot = 0.0;
    for (std::size_t k = 0; k < filters; ++k) {
      Complex& b = z[k].data[f];
      b = dh_s[k].data[f] + rho * b;
      dot += dict[k].data[f] * b;
    }
    const Complex scale = dot / (rho + power[f]);
    for (std::size_t k = 0; k < filters; ++k) {
      Complex& b = z[k].data[f];
      b = (b - std::conj(dict[k].data[f]) * scale) * inv_rho;
    }
  }
}

// Prox of (1/ρ)·regularizer on one row of N coefficients.
void prox_row(std::span<double> row, const Regularizer& reg, double rho) {
  switch (reg.kind) {
    case Structure::L1: shrink_inplace(row, reg.lambda / rho); break;
    case Structure::L21: prox_l2_inplace(row, reg.lambda / rho); break;
    case Structure::LInf1: prox_linf_inplace(row, reg.lambda / rho); break;
    case Structure::L1L21: prox_l1_l2_inplace(row, {reg.gamma1 / rho, reg.gamma2 / rho}); break;
  }
}

double row_penalty(std::span<const double> row, const Regularizer& reg) {
  double l1 = 0.0, sq = 0.0, linf = 0.0;
  for (double v : row) {
    l1 += std::abs(v);
    sq += v * v;
    linf = std::max(linf, std::abs(v));
  }
  switch (reg.kind) {
    case Structure::L1: return reg.lambda * l1;
    case Structure::L21: return reg.lambda * std::sqrt(sq);
    case Structure::LInf1: return reg.lambda * linf;
    case Structure::L1L21: return reg.gamma1 * l1 + reg.gamma2 * std::sqrt(sq);
  }
  return 0.0;
}

// One pass over every (k, p) row: W = Y + U, X = prox(W), U = W - X, and the
// squared primal (Y - X) and dual (X change) residuals.
template <typename Prox>
void admm_x_step(AdmmState& st, Prox prox, double& primal_sq, double& dual_sq) {
  const std::size_t n_sig = st.X.signals(), pixels = st.X.pixels();
  std::vector<double> row(n_sig);
  std::vector<double*> xs(n_sig), us(n_sig);
  std::vector<const double*> ys(n_sig);
  for (std::size_t k = 0; k < st.X.filters(); ++k) {
    for (std::size_t n = 0; n < n_sig; ++n) {
      xs[n] = st.X.map(n, k).data();
      us[n] = st.U.map(n, k).data();
      ys[n] = st.Y.map(n, k).data();
    }
    for (std::size_t p = 0; p < pixels; ++p) {
      for (std::size_t n = 0; n < n_sig; ++n) row[n] = ys[n][p] + us[n][p];
      for (std::size_t n = 0; n < n_sig; ++n) us[n][p] = row[n];
      prox(std::span<double>(row));
      for (std::size_t n = 0; n < n_sig; ++n) {
        const double dx = row[n] - xs[n][p];
        const double r = ys[n][p] - row[n];
        dual_sq += dx * dx;
        primal_sq += r * r;
        xs[n][p] = row[n];
        us[n][p] -= row[n];
      }
    }
  }
}

}  // namespace

std::vector<Plane> y_update(const Plane& signal, std::span<const Plane> z,
                            std::span<const HalfSpectrum> dict_spectra, double rho) {
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  if (z.size() != dict_spectra.size() || z.empty()) throw ShapeError("need one Z map per filter");
  for (const Plane& zk : z)
    if (!zk.same_shape(signal)) throw ShapeError("Z maps must match the signal size");
  for (const HalfSpectrum& d : dict_spectra)
    if (d.height != signal.height() || d.width != signal.width()) throw ShapeError("filter spectra grid mismatch");

  const HalfSpectrum s_hat = rdft2(signal);
  const auto dh_s = correlate(s_hat, dict_spectra);
  const auto power = spectral_power(dict_spectra);
  std::vector<HalfSpectrum> buf;
  buf.reserve(z.size());
  for (const Plane& zk : z) buf.push_back(rdft2(zk));
  solve_bins(dict_spectra, dh_s, power, rho, buf);
  std::vector<Plane> y;
  y.reserve(z.size());
  for (const HalfSpectrum& b : buf) y.push_back(irdft2(b));
  return y;
}

CoefficientSet x_update(const CoefficientSet& w, const Regularizer& reg, double rho) {
  validate(reg);
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  CoefficientSet x = w;
  const std::size_t n_sig = w.signals();
  std::vector<double> row(n_sig);
  for (std::size_t k = 0; k < w.filters(); ++k) {
    for (std::size_t p = 0; p < w.pixels(); ++p) {
      for (std::size_t n = 0; n < n_sig; ++n) row[n] = w.map(n, k)[p];
      prox_row(row, reg, rho);
      for (std::size_t n = 0; n < n_sig; ++n) x.map(n, k)[p] = row[n];
    }
  }
  return x;
}

EncodeResult encode(std::span<const Plane> signals, std::span<const Dictionary> dicts, const Regularizer& reg,
                    const SolverOptions& opts) {
  validate(reg);
  validate(opts);
  check_signals(signals);
  check_dict_count(dicts, signals.size());
  const std::size_t h = signals.front().height(), w = signals.front().width();
  check_filters_fit(dicts, h, w);

  const std::size_t n_sig = signals.size();
  const std::size_t filters = dicts.front().count();
  const std::size_t pixels = h * w;
  const double rho = opts.rho;

  // Filter spectra are shared across signals when a single dictionary is given.
  std::vector<std::vector<HalfSpectrum>> spectra;
  std::vector<std::vector<double>> power;
  for (const Dictionary& d : dicts) {
    spectra.push_back(d.spectra(h, w));
    power.push_back(spectral_power(spectra.back()));
  }
  auto dict_index = [&](std::size_t n) { return dicts.size() == 1 ? 0 : n; };

  std::vector<std::vector<HalfSpectrum>> dh_s;
  for (std::size_t n = 0; n < n_sig; ++n) dh_s.push_back(correlate(rdft2(signals[n]), spectra[dict_index(n)]));

  EncodeResult result;
  AdmmState& st = result.state;
  st.X = CoefficientSet(n_sig, filters, h, w);
  st.Y = st.X;
  st.U = st.X;

  const double scale = std::sqrt(static_cast<double>(n_sig * filters * pixels));
  const double eps_primal = opts.tol_primal * scale;
  const double eps_dual = opts.tol_dual * scale;

  std::vector<HalfSpectrum> buf(filters);
  Plane z(h, w);
  bool converged = false;

  for (int it = 1; it <= opts.max_iter; ++it) {
    // Y-update: one convolutional regression per signal.
    for (std::size_t n = 0; n < n_sig; ++n) {
      const std::size_t di = dict_index(n);
      for (std::size_t k = 0; k < filters; ++k) {
        const Plane& xk = st.X.map(n, k);
        const Plane& uk = st.U.map(n, k);
        for (std::size_t p = 0; p < pixels; ++p) z[p] = xk[p] - uk[p];
        rdft2(z, buf[k]);
      }
      solve_bins(spectra[di], dh_s[n], power[di], rho, buf);
      for (std::size_t k = 0; k < filters; ++k) irdft2(buf[k], st.Y.map(n, k));
    }

    // X-update on W = Y + U, fused with the multiplier update and residuals.
    double primal_sq = 0.0, dual_sq = 0.0;
    switch (reg.kind) {
      case Structure::L1:
        admm_x_step(st, [tau = reg.lambda / rho](std::span<double> r) { shrink_inplace(r, tau); }, primal_sq, dual_sq);
        break;
      case Structure::L21:
        admm_x_step(st, [tau = reg.lambda / rho](std::span<double> r) { prox_l2_inplace(r, tau); }, primal_sq, dual_sq);
        break;
      case Structure::LInf1:
        admm_x_step(st, [tau = reg.lambda / rho](std::span<double> r) { prox_linf_inplace(r, tau); }, primal_sq,
                    dual_sq);
        break;
      case Structure::L1L21:
        admm_x_step(st, [w = ProxWeights{reg.gamma1 / rho, reg.gamma2 / rho}](std::span<double> r) {
          prox_l1_l2_inplace(r, w);
        }, primal_sq, dual_sq);
        break;
    }

    const double primal = std::sqrt(primal_sq);
    const double dual = rho * std::sqrt(dual_sq);
    st.iter = it;
    if (opts.record_history) {
      st.primal_res.push_back(primal);
      st.dual_res.push_back(dual);
    }
    if (primal < eps_primal && dual < eps_dual) {
      converged = true;
      break;
    }
  }

  result.X = st.X;
  result.diagnostics = diagnose(signals, result.X, dicts, opts.zero_tol_rel);
  result.diagnostics.iterations = st.iter;
  result.diagnostics.converged = converged;
  return result;
}

std::vector<Plane> reconstruct(const CoefficientSet& x, std::span<const Dictionary> dicts) {
  check_dict_count(dicts, x.signals());
  check_filters_fit(dicts, x.height(), x.width());
  if (dicts.front().count() != x.filters()) throw ShapeError("coefficient maps do not match the filter count");

  std::vector<Plane> out;
  out.reserve(x.signals());
  HalfSpectrum coef;
  for (std::size_t n = 0; n < x.signals(); ++n) {
    const auto spectra = dict_for(dicts, n).spectra(x.height(), x.width());
    HalfSpectrum acc{x.height(), x.width(), std::vector<Complex>(spectra.front().bins())};
    for (std::size_t k = 0; k < x.filters(); ++k) {
      rdft2(x.map(n, k), coef);
      for (std::size_t f = 0; f < acc.data.size(); ++f) acc.data[f] += spectra[k].data[f] * coef.data[f];
    }
    out.push_back(irdft2(acc));
  }
  return out;
}

double support_overlap(const CoefficientSet& x, double zero_tol) {
  if (x.signals() < 2) throw ShapeError("support overlap needs at least two signals");
  std::size_t inter = 0, uni = 0;
  for (std::size_t k = 0; k < x.filters(); ++k) {
    for (std::size_t p = 0; p < x.pixels(); ++p) {
      std::size_t hits = 0;
      for (std::size_t n = 0; n < x.signals(); ++n)
        if (std::abs(x.map(n, k)[p]) > zero_tol) ++hits;
      if (hits > 0) ++uni;
      if (hits == x.signals()) ++inter;
    }
  }
  return uni == 0 ? 0.0 : 100.0 * static_cast<double>(inter) / static_cast<double>(uni);
}

double sparsity_ratio(const CoefficientSet& x, double zero_tol) {
  std::size_t nnz = 0;
  for (const Plane& m : x.maps())
    for (double v : m.values())
      if (std::abs(v) > zero_tol) ++nnz;
  return x.entries() == 0 ? 0.0 : static_cast<double>(nnz) / static_cast<double>(x.entries());
}

double approx_error(std::span<const Plane> signals, const CoefficientSet& x, std::span<const Dictionary> dicts) {
  if (signals.size() != x.signals()) throw ShapeError("signal count does not match coefficient set");
  const auto recon = reconstruct(x, dicts);
  double err = 0.0;
  for (std::size_t n = 0; n < signals.size(); ++n) {
    if (!signals[n].same_shape(recon[n])) throw ShapeError("signal size does not match coefficient maps");
    err += squared_norm(recon[n] - signals[n]);
  }
  return err;
}

double default_zero_tol(const CoefficientSet& x, double rel) { return rel * x.max_abs(); }

double penalty(const CoefficientSet& x, const Regularizer& reg) {
  double total = 0.0;
  std::vector<double> row(x.signals());
  for (std::size_t k = 0; k < x.filters(); ++k) {
    for (std::size_t p = 0; p < x.pixels(); ++p) {
      for (std::size_t n = 0; n < x.signals(); ++n) row[n] = x.map(n, k)[p];
      total += row_penalty(row, reg);
    }
  }
  return total;
}

double objective(std::span<const Plane> signals, const CoefficientSet& x, std::span<const Dictionary> dicts,
                 const Regularizer& reg) {
  return 0.5 * approx_error(signals, x, dicts) + penalty(x, reg);
}

EncodeDiagnostics diagnose(std::span<const Plane> signals, const CoefficientSet& x,
                           std::span<const Dictionary> dicts, double zero_tol_rel) {
  EncodeDiagnostics d;
  const double tol = default_zero_tol(x, zero_tol_rel);
  d.sparsity_ratio = sparsity_ratio(x, tol);
  // A single signal trivially shares its own support.
  d.common_support_pct = x.signals() >= 2 ? support_overlap(x, tol) : 100.0;
  d.approx_error = approx_error(signals, x, dicts);
  return d;
}

}  // namespace cssa
