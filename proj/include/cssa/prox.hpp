#pragma once

#include <span>
#include <vector>

namespace cssa {

/// Weights of the combined l1 + l2 penalty tau*||x||_1 + kappa*||x||_2.
struct ProxWeights {
  double tau = 0.0;
  double kappa = 0.0;
};

/// Soft threshold sign(a) * max(0, |a| - tau).
double shrink(double a, double tau);

std::vector<double> shrink(std::span<const double> a, double tau);
std::vector<double> prox_l2(std::span<const double> a, double tau);
std::vector<double> project_l1_ball(std::span<const double> a, double radius);
std::vector<double> prox_linf(std::span<const double> a, double tau);
std::vector<double> prox_l1_l2(std::span<const double> a, ProxWeights w);

// In-place forms, applied by the solver to each coefficient row.

void shrink_inplace(std::span<double> a, double tau);

/// Group shrink (1 - tau / max(||a||_2, tau)) * a.
void prox_l2_inplace(std::span<double> a, double tau);

/// Euclidean projection onto {x : ||x||_1 <= radius} by sorting magnitudes
/// and locating the soft threshold.
void project_l1_ball_inplace(std::span<double> a, double radius);

/// prox of tau*||.||_inf through the Moreau decomposition
/// a - tau * P_{||.||_1 <= 1}(a / tau).
void prox_linf_inplace(std::span<double> a, double tau);

/// prox of tau*||.||_1 + kappa*||.||_2 as the group shrink of the soft threshold.
void prox_l1_l2_inplace(std::span<double> a, ProxWeights w);

}  // namespace cssa
