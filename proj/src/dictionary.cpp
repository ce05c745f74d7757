#include "cssa/dictionary.hpp"

#include <cmath>
#include <string>

#include "cssa/errors.hpp"

namespace cssa {

Dictionary::Dictionary(std::vector<Plane> filters) : filters_(std::move(filters)) {
  if (filters_.empty()) throw ShapeError("dictionary needs at least one filter");
  const std::size_t q = filters_.front().height();
  for (std::size_t k = 0; k < filters_.size(); ++k) {
    const Plane& f = filters_[k];
    if (f.height() != q || f.width() != q)
      throw ShapeError("dictionary filters must all be " + std::to_string(q) + "x" + std::to_string(q));
    if (std::sqrt(squared_norm(f)) > 1.0 + kNormSlack)
      throw ConfigError("filter " + std::to_string(k) + " lies outside the unit l2 ball");
  }
}

std::vector<HalfSpectrum> Dictionary::spectra(std::size_t height, std::size_t width) const {
  std::vector<HalfSpectrum> out;
  out.reserve(filters_.size());
  for (const Plane& f : filters_) out.push_back(rdft2(pad_filter(f, height, width)));
  return out;
}

DictionarySet::DictionarySet(std::vector<Dictionary> dicts) : dicts_(std::move(dicts)) {
  if (dicts_.empty()) throw ShapeError("dictionary set needs at least one modality");
  for (const Dictionary& d : dicts_) {
    if (d.count() != dicts_.front().count() || d.side() != dicts_.front().side())
      throw ShapeError("all modality dictionaries must share filter count and size");
  }
}

}  // namespace cssa
