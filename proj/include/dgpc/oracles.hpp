#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgpc/moments.hpp"
#include "dgpc/sde.hpp"
#include "dgpc/statistics.hpp"

namespace dgpc {

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

/// Closed-form OU statistics for du = -b u ds + sigma dW with u(0) independent
/// Gaussian or point mass.
MeanVariance ou_exact(double b, double sigma, const InitialLaw& u0, double s);

struct McConfig {
  std::size_t n_samples = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  double t_end = 1.0;
  /// Spacing of the output grid; 0 records t_end only.
  double output_dt = 0.0;
  int batches = 40;
  /// 0 reads DGPC_NUM_THREADS (default 1).
  int threads = 0;

  void validate() const;
};

struct McPoint {
  double time = 0.0;
  /// Raw mixed moments to order 6 over the finite samples.
  MomentTable raw;
  std::vector<double> mean, variance;
  /// Batch-means standard errors.
  std::vector<double> mean_se, variance_se;
  CumulantReport cumulants;
};

struct McResult {
  std::vector<std::string> components;
  std::vector<McPoint> points;
  std::size_t non_finite = 0;
  std::size_t samples = 0;

  std::vector<double> times() const;
  std::vector<double> mean_trajectory(std::size_t component) const;
  std::vector<double> variance_trajectory(std::size_t component) const;
};

/// Euler-Maruyama ensemble with per-batch seeded streams. Results do not
/// depend on the thread count.
McResult mc_simulate(const SdeModel& model, const McConfig& cfg);

/// Cumulants kappa_1..kappa_order (index 0 unused) of the stationary density
/// p(v) ~ exp(2 int drift / sigma^2), drift(v) = sum_k coeffs[k] v^k.
std::vector<double> invariant_cumulants_1d(const std::vector<double>& drift_coeffs, double sigma,
                                           int order = 6);

/// Cumulants of the b-average of the stationary OU laws N(0, sigma^2 / (2b)).
std::vector<double> averaged_ou_invariant(const InitialLaw& b_law, double sigma, int order = 6);

/// Mean and variance of u for the coupled model with a_v = 0 and independent
/// Gaussian (or point) initial data, from the analytic path representation
/// evaluated by Gauss-Legendre quadrature.
MeanVariance coupled_exact(const SdeModel& model, double t);

/// Mean and variance of the OU component v of the coupled model.
MeanVariance coupled_exact_v(const SdeModel& model, double t);

}  // namespace dgpc
