#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cssa/spectral.hpp"

namespace cssa {

/// K square q×q filters, each inside the unit l2 ball.
class Dictionary {
 public:
  Dictionary() = default;
  /// Throws ShapeError on ragged or non-square filters and ConfigError when a
  /// filter norm exceeds 1 + kNormSlack.
  explicit Dictionary(std::vector<Plane> filters);

  static constexpr double kNormSlack = 1e-9;

  std::size_t count() const { return filters_.size(); }
  std::size_t side() const { return filters_.empty() ? 0 : filters_.front().height(); }
  const Plane& filter(std::size_t k) const { return filters_[k]; }
  std::span<const Plane> filters() const { return filters_; }

  /// Half spectra of every filter zero-padded to an H×W grid.
  std::vector<HalfSpectrum> spectra(std::size_t height, std::size_t width) const;

  friend bool operator==(const Dictionary&, const Dictionary&) = default;

 private:
  std::vector<Plane> filters_;
};

/// One dictionary per modality, sharing K and q. Modality order is fixed.
class DictionarySet {
 public:
  DictionarySet() = default;
  explicit DictionarySet(std::vector<Dictionary> dicts);

  std::size_t modalities() const { return dicts_.size(); }
  std::size_t count() const { return dicts_.empty() ? 0 : dicts_.front().count(); }
  std::size_t side() const { return dicts_.empty() ? 0 : dicts_.front().side(); }
  const Dictionary& operator[](std::size_t n) const { return dicts_[n]; }
  std::span<const Dictionary> all() const { return dicts_; }

  friend bool operator==(const DictionarySet&, const DictionarySet&) = default;

 private:
  std::vector<Dictionary> dicts_;
};

}  // namespace cssa
