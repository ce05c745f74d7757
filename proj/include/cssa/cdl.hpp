#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cssa/dictionary.hpp"
#include "cssa/solver.hpp"
#include "cssa/spectral.hpp"

namespace cssa {

/// T sets of N co-registered planes with a fixed modality order. Sample
/// (t, n) is stored at index t*N + n.
class TrainingBatch {
 public:
  TrainingBatch(std::size_t sets, std::size_t modalities, std::vector<Plane> samples);

  std::size_t sets() const { return sets_; }
  std::size_t modalities() const { return modalities_; }
  const Plane& at(std::size_t t, std::size_t n) const { return samples_[t * modalities_ + n]; }
  /// The N planes of set t.
  std::span<const Plane> set(std::size_t t) const {
    return std::span<const Plane>(samples_).subspan(t * modalities_, modalities_);
  }
  /// All T planes of modality n, in set order.
  std::vector<Plane> modality(std::size_t n) const;

 private:
  std::size_t sets_, modalities_;
  std::vector<Plane> samples_;
};

struct DictUpdateOptions {
  double rho = 1.0;
  int inner_iters = 10;
};

struct CdlOptions {
  std::size_t filters = 32;
  std::size_t side = 8;
  int outer_iters = 20;
  Regularizer reg = Regularizer::l1_l21(0.001, 0.01);
  SolverOptions sparse;
  DictUpdateOptions dict;
  std::uint64_t seed = 0;
};

struct LearnResult {
  DictionarySet dicts;
  /// Training objective after each alternation:
  /// (1/T) Σ_t [½ Σ_n ||Σ_k D^(n)_k * X^(t,n)_k - s^(t,n)||² + R(X^(t))].
  std::vector<double> objective;
};

/// Restricts a plane to its top-left q×q block and pulls it back into the
/// unit l2 ball.
Plane project_dictionary(const Plane& g, std::size_t q);

/// Seeded Gaussian filters projected into the unit ball.
Dictionary init_dictionary(std::size_t filters, std::size_t side, std::uint64_t seed);

/// Constrained least-squares filter update for one modality with the codes
/// held fixed. `codes[t]` is the joint coefficient set of set t; maps of
/// `modality` are used. Runs a fixed number of ADMM iterations warm-started
/// at `previous`; the per-frequency block system is inverted by iterated
/// Sherman–Morrison over the T rank-one terms. The previous filters are kept
/// when the codes are all zero or the update would raise the data term.
Dictionary dict_update(std::span<const Plane> signals, std::span<const CoefficientSet> codes,
                       std::size_t modality, const Dictionary& previous, const DictUpdateOptions& opts);

/// (1/T) Σ_t ½ ||Σ_k D_k * X^(t,modality)_k - s^(t)||².
double dict_data_term(std::span<const Plane> signals, std::span<const CoefficientSet> codes,
                      std::size_t modality, const Dictionary& dict);

/// Alternates joint sparse coding of each set with per-modality filter updates.
LearnResult learn(const TrainingBatch& batch, const CdlOptions& opts);

}  // namespace cssa
