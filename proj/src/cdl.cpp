#include "cssa/cdl.hpp"

#include <cmath>
#include <random>

#include "cssa/errors.hpp"

namespace cssa {

TrainingBatch::TrainingBatch(std::size_t sets, std::size_t modalities, std::vector<Plane> samples)
    : sets_(sets), modalities_(modalities), samples_(std::move(samples)) {
  if (sets == 0 || modalities == 0) throw ShapeError("training batch needs T >= 1 and N >= 1");
  if (samples_.size() != sets * modalities) throw ShapeError("training batch holds the wrong number of planes");
  for (const Plane& p : samples_)
    if (p.empty() || !p.same_shape(samples_.front())) throw ShapeError("training planes differ in size");
}

std::vector<Plane> TrainingBatch::modality(std::size_t n) const {
  std::vector<Plane> out;
  out.reserve(sets_);
  for (std::size_t t = 0; t < sets_; ++t) out.push_back(at(t, n));
  return out;
}

Plane project_dictionary(const Plane& g, std::size_t q) {
  Plane f = crop_filter(g, q);
  const double norm = std::sqrt(squared_norm(f));
  if (norm > 1.0) f *= 1.0 / norm;
  return f;
}

Dictionary init_dictionary(std::size_t filters, std::size_t side, std::uint64_t seed) {
  if (filters == 0 || side == 0) throw ConfigError("dictionary needs K >= 1 and q >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Plane> out;
  out.reserve(filters);
  for (std::size_t k = 0; k < filters; ++k) {
    Plane f(side, side);
    for (double& v : f.values()) v = gauss(rng);
    out.push_back(project_dictionary(f, side));
  }
  return Dictionary(std::move(out));
}

namespace {

void check_codes(std::span<const Plane> signals, std::span<const CoefficientSet> codes, std::size_t modality,
                 std::size_t filters) {
  if (signals.empty() || signals.size() != codes.size()) throw ShapeError("need one coefficient set per signal");
  for (std::size_t t = 0; t < signals.size(); ++t) {
    const CoefficientSet& c = codes[t];
    if (modality >= c.signals()) throw ShapeError("modality index outside coefficient set");
    if (c.filters() != filters) throw ShapeError("coefficient set filter count mismatch");
    if (c.height() != signals[t].height() || c.width() != signals[t].width() ||
        !signals[t].same_shape(signals.front()))
      throw ShapeError("coefficient maps do not match signal size");
  }
}

}  // namespace

double dict_data_term(std::span<const Plane> signals, std::span<const CoefficientSet> codes, std::size_t modality,
                      const Dictionary& dict) {
  check_codes(signals, codes, modality, dict.count());
  const std::size_t h = signals.front().height(), w = signals.front().width();
  const auto spectra = dict.spectra(h, w);
  HalfSpectrum coef;
  double total = 0.0;
  for (std::size_t t = 0; t < signals.size(); ++t) {
    HalfSpectrum acc{h, w, std::vector<Complex>(spectra.front().bins())};
    for (std::size_t k = 0; k < dict.count(); ++k) {
      rdft2(codes[t].map(modality, k), coef);
      for (std::size_t f = 0; f < acc.data.size(); ++f) acc.data[f] += spectra[k].data[f] * coef.data[f];
    }
    total += 0.5 * squared_norm(irdft2(acc) - signals[t]);
  }
  return total / static_cast<double>(signals.size());
}

Dictionary dict_update(std::span<const Plane> signals, std::span<const CoefficientSet> codes, std::size_t modality,
                       const Dictionary& previous, const DictUpdateOptions& opts) {
  if (!(opts.rho > 0.0)) throw ConfigError("dictionary rho must be positive");
  if (opts.inner_iters < 1) throw ConfigError("dictionary inner iterations must be positive");
  const std::size_t filters = previous.count();
  const std::size_t q = previous.side();
  check_codes(signals, codes, modality, filters);

  bool any_nonzero = false;
  for (const CoefficientSet& c : codes)
    for (std::size_t k = 0; k < filters && !any_nonzero; ++k) any_nonzero = max_abs(c.map(modality, k)) > 0.0;
  if (!any_nonzero) return previous;

  const std::size_t sets = signals.size();
  const std::size_t h = signals.front().height(), w = signals.front().width();
  if (q > h || q > w) throw ShapeError("filter larger than image");
  const double sigma = opts.rho;
  const double inv_sqrt_t = 1.0 / std::sqrt(static_cast<double>(sets));

  // Per bin, c_t = conj(x_t)/sqrt(T) with x_t the K coefficient spectra of set t.
  // The system matrix is σI + Σ_t c_t c_tᴴ; its inverse is I/σ - Σ_t α_t α_tᴴ / β_t
  // with α_t = A_{t-1}⁻¹ c_t and β_t = 1 + c_tᴴ α_t.
  std::vector<std::vector<HalfSpectrum>> xhat(sets, std::vector<HalfSpectrum>(filters));
  std::vector<HalfSpectrum> shat(sets);
  for (std::size_t t = 0; t < sets; ++t) {
    rdft2(signals[t], shat[t]);
    for (std::size_t k = 0; k < filters; ++k) rdft2(codes[t].map(modality, k), xhat[t][k]);
  }
  const std::size_t bins = shat.front().bins();

  std::vector<Complex> alpha(bins * sets * filters);
  std::vector<double> beta(bins * sets);
  std::vector<Complex> rhs_data(bins * filters);  // (1/T) Σ_t conj(x_t) s_t
  std::vector<Complex> c(filters);
  for (std::size_t f = 0; f < bins; ++f) {
    Complex* a_f = &alpha[f * sets * filters];
    for (std::size_t t = 0; t < sets; ++t) {
      for (std::size_t k = 0; k < filters; ++k) c[k] = std::conj(xhat[t][k].data[f]) * inv_sqrt_t;
      Complex* a_t = a_f + t * filters;
      for (std::size_t k = 0; k < filters; ++k) a_t[k] = c[k] / sigma;
      for (std::size_t j = 0; j < t; ++j) {
        const Complex* a_j = a_f + j * filters;
        Complex ip = 0.0;
        for (std::size_t k = 0; k < filters; ++k) ip += std::conj(a_j[k]) * c[k];
        ip /= beta[f * sets + j];
        for (std::size_t k = 0; k < filters; ++k) a_t[k] -= a_j[k] * ip;
      }
      Complex ca = 0.0;
      for (std::size_t k = 0; k < filters; ++k) ca += std::conj(c[k]) * a_t[k];
      beta[f * sets + t] = 1.0 + ca.real();
      for (std::size_t k = 0; k < filters; ++k)
        rhs_data[f * filters + k] += c[k] * shat[t].data[f] * inv_sqrt_t;
    }
  }

  std::vector<Plane> g, u(filters, Plane(h, w)), d(filters, Plane(h, w));
  for (const Plane& f : previous.filters()) g.push_back(pad_filter(f, h, w));
  std::vector<HalfSpectrum> bhat(filters);
  Plane tmp(h, w);
  std::vector<Complex> b(filters);

  for (int it = 0; it < opts.inner_iters; ++it) {
    for (std::size_t k = 0; k < filters; ++k) {
      tmp = g[k];
      tmp -= u[k];
      rdft2(tmp, bhat[k]);
    }
    for (std::size_t f = 0; f < bins; ++f) {
      for (std::size_t k = 0; k < filters; ++k) b[k] = rhs_data[f * filters + k] + sigma * bhat[k].data[f];
      const Complex* a_f = &alpha[f * sets * filters];
      for (std::size_t k = 0; k < filters; ++k) bhat[k].data[f] = b[k] / sigma;
      for (std::size_t t = 0; t < sets; ++t) {
        const Complex* a_t = a_f + t * filters;
        Complex ip = 0.0;
        for (std::size_t k = 0; k < filters; ++k) ip += std::conj(a_t[k]) * b[k];
        ip /= beta[f * sets + t];
        for (std::size_t k = 0; k < filters; ++k) bhat[k].data[f] -= a_t[k] * ip;
      }
    }
    for (std::size_t k = 0; k < filters; ++k) {
      irdft2(bhat[k], d[k]);
      tmp = d[k];
      tmp += u[k];
      g[k] = pad_filter(project_dictionary(tmp, q), h, w);
      u[k] += d[k];
      u[k] -= g[k];
    }
  }

  std::vector<Plane> out;
  out.reserve(filters);
  for (const Plane& gk : g) out.push_back(crop_filter(gk, q));
  Dictionary updated(std::move(out));
  if (dict_data_term(signals, codes, modality, updated) > dict_data_term(signals, codes, modality, previous))
    return previous;
  return updated;
}

LearnResult learn(const TrainingBatch& batch, const CdlOptions& opts) {
  if (opts.outer_iters < 1) throw ConfigError("outer iteration count must be positive");
  const std::size_t sets = batch.sets(), modalities = batch.modalities();
  const Plane& first = batch.at(0, 0);
  if (opts.side > first.height() || opts.side > first.width()) throw ShapeError("filter larger than training image");

  // Every modality starts from the same filters so that filter k is coupled
  // across modalities from the outset.
  const Dictionary initial = init_dictionary(opts.filters, opts.side, opts.seed);
  std::vector<Dictionary> dicts(modalities, initial);
  std::vector<std::vector<Plane>> by_modality;
  for (std::size_t n = 0; n < modalities; ++n) by_modality.push_back(batch.modality(n));

  LearnResult result;
  std::vector<CoefficientSet> codes(sets);
  for (int outer = 0; outer < opts.outer_iters; ++outer) {
    for (std::size_t t = 0; t < sets; ++t) codes[t] = encode(batch.set(t), dicts, opts.reg, opts.sparse).X;
    for (std::size_t n = 0; n < modalities; ++n)
      dicts[n] = dict_update(by_modality[n], codes, n, dicts[n], opts.dict);

    double obj = 0.0;
    for (std::size_t t = 0; t < sets; ++t) obj += objective(batch.set(t), codes[t], dicts, opts.reg);
    result.objective.push_back(obj / static_cast<double>(sets));
  }
  result.dicts = DictionarySet(std::move(dicts));
  return result;
}

}  // namespace cssa
