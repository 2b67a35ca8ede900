#pragma once

#include <span>
#include <vector>

#include "dgpc/moments.hpp"

namespace dgpc {

/// Cumulants kappa_1..kappa_order from raw moments m_0..m_order via
///   kappa_n = m_n - sum_{k=1}^{n-1} binom(n-1, k-1) kappa_k m_{n-k}.
/// Result is indexed by order: out[n] = kappa_n, out[0] = 0.
std::vector<double> cumulants_from_moments(std::span<const double> raw, int order);
std::vector<double> cumulants_from_moments(const MomentTable& univariate, int order);

/// Joint cumulant of the multiset of variables described by `exponent`
/// (variable i repeated exponent[i] times), from a raw moment table, via the
/// set-partition (Moebius) formula. Total order must not exceed 6.
double joint_cumulant(const MomentTable& raw, const MultiIndex& exponent);

/// Bivariate cumulants kappa_{i,j} (first index u, second v) for i + j <= max_total.
class CrossCumulants {
 public:
  CrossCumulants() = default;
  CrossCumulants(const MomentTable& raw_bivariate, int max_total);

  int max_total() const noexcept { return max_total_; }
  bool empty() const noexcept { return values_.empty(); }
  double operator()(int i, int j) const;
  /// Scale kappa_{i,j} by su^i sv^j (cumulants of (su u, sv v)).
  CrossCumulants scaled(double su, double sv) const;
  void set(int i, int j, double value) { values_.at(slot(i, j)) = value; }

 private:
  int max_total_ = 0;
  std::vector<double> values_;  // row i holds j = 0..max_total - i
  std::size_t slot(int i, int j) const;
};

CrossCumulants cross_cumulants(const MomentTable& raw_bivariate, int max_total);

/// Statistics of a state at one time.
struct CumulantReport {
  double time = 0.0;
  /// univariate[c][n] = kappa_n of component c, n = 1..6 (index 0 unused).
  std::vector<std::vector<double>> univariate;
  /// kappa_4 / kappa_2^2 per component (NaN for deterministic components).
  std::vector<double> kurtosis_excess;
  /// Present when the state is two-dimensional.
  CrossCumulants cross;
};

/// Builds a report from the moments of the standardized active components
/// plus the affine data of every component. Inactive (deterministic)
/// components have zero cumulants beyond the mean.
CumulantReport make_cumulant_report(double time, std::span<const double> mean,
                                    std::span<const double> stddev, const std::vector<bool>& active,
                                    const MomentTable* standardized_active, int order = 6);

/// Pointwise relative error |approx - ref| / |ref|; NaN where |ref| <= floor.
std::vector<double> relative_errors(std::span<const double> approx, std::span<const double> reference,
                                    double floor = 1e-300);

struct ErrorSummary {
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
  std::size_t defined = 0;
  std::size_t undefined = 0;
};

/// Aggregates over the defined (non-NaN) samples only.
ErrorSummary summarize_errors(std::span<const double> errors);

}  // namespace dgpc
