#include "dgpc/forcing.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dgpc/errors.hpp"

namespace dgpc {

ForcingBasis::ForcingBasis(double t0, double t1, std::vector<int> modes_per_process)
    : t0_(t0), t1_(t1), modes_(std::move(modes_per_process)) {
  if (!(t1 > t0)) throw InvalidArgument("forcing interval must have positive length");
  offset_.push_back(0);
  for (int m : modes_) {
    if (m < 0) throw InvalidArgument("negative number of forcing modes");
    offset_.push_back(offset_.back() + m);
  }
}

ForcingBasis ForcingBasis::split(double t0, double t1, int total_modes, int processes) {
  if (processes < 0) throw InvalidArgument("negative number of Wiener processes");
  std::vector<int> modes(static_cast<std::size_t>(processes), 0);
  for (int p = 0; p < processes; ++p) modes[p] = total_modes / processes + (p < total_modes % processes ? 1 : 0);
  return ForcingBasis(t0, t1, std::move(modes));
}

std::size_t ForcingBasis::coordinate(std::size_t process, int mode) const {
  if (mode < 1 || mode > modes_.at(process)) throw InvalidArgument("forcing mode out of range");
  return static_cast<std::size_t>(offset_[process] + mode - 1);
}

void ForcingBasis::check_time(double s) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t1_));
  if (s < t0_ - slack || s > t1_ + slack)
    throw InvalidArgument("time " + std::to_string(s) + " outside the forcing interval");
}

double ForcingBasis::basis_function(int mode, double s) const {
  if (mode < 1) throw InvalidArgument("cosine modes are 1-based");
  check_time(s);
  const double dt = length();
  if (mode == 1) return 1.0 / std::sqrt(dt);
  return std::sqrt(2.0 / dt) * std::cos((mode - 1) * std::numbers::pi * (s - t0_) / dt);
}

double ForcingBasis::integrated_basis(int mode, double s) const {
  if (mode < 1) throw InvalidArgument("cosine modes are 1-based");
  check_time(s);
  const double dt = length();
  if (mode == 1) return (s - t0_) / std::sqrt(dt);
  const double w = (mode - 1) * std::numbers::pi / dt;
  return std::sqrt(2.0 / dt) * std::sin(w * (s - t0_)) / w;
}

double ForcingBasis::white_noise_projection(const MultiIndex& alpha, double s,
                                            std::size_t process) const {
  if (alpha.degree() != 1) return 0.0;
  for (int i = 1; i <= modes_.at(process); ++i) {
    const std::size_t c = coordinate(process, i);
    if (c < alpha.dim() && alpha[c] == 1) return basis_function(i, s);
  }
  return 0.0;
}

double ForcingBasis::reconstruct_brownian(std::span<const double> xi, double s,
                                          std::size_t process) const {
  double w = 0.0;
  for (int i = 1; i <= modes_.at(process); ++i) {
    const std::size_t c = coordinate(process, i);
    if (c < xi.size()) w += xi[c] * integrated_basis(i, s);
  }
  return w;
}

}  // namespace dgpc
