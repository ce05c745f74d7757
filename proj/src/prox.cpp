#include "cssa/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cssa {

double shrink(double a, double tau) {
  const double mag = std::abs(a) - tau;
  if (mag <= 0.0) return 0.0;
  return std::copysign(mag, a);
}

void shrink_inplace(std::span<double> a, double tau) {
  for (double& v : a) v = shrink(v, tau);
}

void prox_l2_inplace(std::span<double> a, double tau) {
  double sq = 0.0;
  for (double v : a) sq += v * v;
  const double norm = std::sqrt(sq);
  if (norm <= tau) {
    std::fill(a.begin(), a.end(), 0.0);
    return;
  }
  const double factor = 1.0 - tau / norm;
  for (double& v : a) v *= factor;
}

void project_l1_ball_inplace(std::span<double> a, double radius) {
  double l1 = 0.0;
  for (double v : a) l1 += std::abs(v);
  if (l1 <= radius) return;

  thread_local std::vector<double> mags;
  mags.resize(a.size());
  std::transform(a.begin(), a.end(), mags.begin(), [](double v) { return std::abs(v); });
  std::stable_sort(mags.begin(), mags.end(), std::greater<>());

  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumsum += mags[j];
    const double t = (cumsum - radius) / static_cast<double>(j + 1);
    if (mags[j] - t > 0.0) theta = t;
  }
  for (double& v : a) v = shrink(v, theta);
}

void prox_linf_inplace(std::span<double> a, double tau) {
  if (tau <= 0.0) return;
  double l1 = 0.0;
  for (double v : a) l1 += std::abs(v);
  // Inside the dual ball the prox is exactly zero; the subtraction below
  // would leave rounding residue instead.
  if (l1 <= tau) {
    std::fill(a.begin(), a.end(), 0.0);
    return;
  }
  thread_local std::vector<double> scaled;
  scaled.assign(a.begin(), a.end());
  for (double& v : scaled) v /= tau;
  project_l1_ball_inplace(scaled, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= tau * scaled[i];
}

void prox_l1_l2_inplace(std::span<double> a, ProxWeights w) {
  shrink_inplace(a, w.tau);
  prox_l2_inplace(a, w.kappa);
}

namespace {

template <typename Fn>
std::vector<double> copy_apply(std::span<const double> a, Fn&& fn) {
  std::vector<double> out(a.begin(), a.end());
  fn(std::span<double>(out));
  return out;
}

}  // namespace

std::vector<double> shrink(std::span<const double> a, double tau) {
  return copy_apply(a, [&](std::span<double> x) { shrink_inplace(x, tau); });
}

std::vector<double> prox_l2(std::span<const double> a, double tau) {
  return copy_apply(a, [&](std::span<double> x) { prox_l2_inplace(x, tau); });
}

std::vector<double> project_l1_ball(std::span<const double> a, double radius) {
  return copy_apply(a, [&](std::span<double> x) { project_l1_ball_inplace(x, radius); });
}

std::vector<double> prox_linf(std::span<const double> a, double tau) {
  return copy_apply(a, [&](std::span<double> x) { prox_linf_inplace(x, tau); });
}

std::vector<double> prox_l1_l2(std::span<const double> a, ProxWeights w) {
  return copy_apply(a, [&](std::span<double> x) { prox_l1_l2_inplace(x, w); });
}

}  // namespace cssa
