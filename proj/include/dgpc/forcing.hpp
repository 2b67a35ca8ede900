#pragma once

#include <span>
#include <vector>

#include "dgpc/multiindex.hpp"

namespace dgpc {

/// Cosine basis of L^2[t0, t1] used to expand the Brownian forcing on one
/// interval:
///   m_1(s) = 1/sqrt(dt),  m_i(s) = sqrt(2/dt) cos((i-1) pi (s - t0) / dt).
/// Each Wiener process owns a contiguous, disjoint block of xi coordinates.
class ForcingBasis {
 public:
  /// `modes_per_process[p]` cosine modes for Wiener process p.
  ForcingBasis(double t0, double t1, std::vector<int> modes_per_process);
  /// Splits `total_modes` xi coordinates as evenly as possible over
  /// `processes`, earlier processes taking the remainder.
  static ForcingBasis split(double t0, double t1, int total_modes, int processes);

  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  double length() const noexcept { return t1_ - t0_; }
  std::size_t processes() const noexcept { return modes_.size(); }
  int modes(std::size_t process) const { return modes_.at(process); }
  int total_modes() const noexcept { return offset_.back(); }

  /// xi coordinate (0-based) carrying mode i (1-based) of `process`.
  std::size_t coordinate(std::size_t process, int mode) const;

  /// m_i(s) for 1-based mode i and s in [t0, t1]; throws outside the interval.
  double basis_function(int mode, double s) const;
  /// M_i(s) = integral of m_i from t0 to s.
  double integrated_basis(int mode, double s) const;

  /// E[dW_p/ds T_alpha]: m_i(s) when alpha is the unit index of one of the
  /// process' coordinates, else 0.
  double white_noise_projection(const MultiIndex& alpha, double s, std::size_t process) const;

  /// Truncated W_p(s) - W_p(t0) = sum_i xi_i M_i(s) for a sample of all xi.
  double reconstruct_brownian(std::span<const double> xi, double s, std::size_t process = 0) const;

 private:
  void check_time(double s) const;

  double t0_, t1_;
  std::vector<int> modes_;
  std::vector<int> offset_;
};

}  // namespace dgpc
