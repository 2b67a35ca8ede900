#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dgpc/chaos.hpp"
#include "dgpc/forcing.hpp"
#include "dgpc/multiindex.hpp"

namespace dgpc {

/// Law of one state component at t = 0. Components are independent at t = 0.
struct InitialLaw {
  enum class Kind { Gaussian, Uniform, Point };

  Kind kind = Kind::Point;
  double first = 0.0;   // Gaussian mean | Uniform lower bound | Point value
  double second = 0.0;  // Gaussian variance | Uniform upper bound | unused

  static InitialLaw gaussian(double mean, double variance) { return {Kind::Gaussian, mean, variance}; }
  static InitialLaw uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static InitialLaw point(double value) { return {Kind::Point, value, 0.0}; }

  double mean() const;
  double variance() const;
  bool deterministic() const { return variance() == 0.0; }
  /// E[X^k].
  double raw_moment(int k) const;
  /// E[Z^k] with Z = (X - mean)/std; requires a non-deterministic law.
  double standardized_moment(int k) const;
};

/// f(t) = c0 + c1 cos(2t + 1) + c2 cos(4t), or a user callable when set.
struct DeterministicForcing {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  std::function<double(double)> custom;

  double operator()(double t) const;
  bool is_zero() const { return !custom && c0 == 0.0 && c1 == 0.0 && c2 == 0.0; }
};

enum class ModelKind { OU, CubicOU, RandomDampingOU, SquaredWienerForcing, CoupledSystem };

const char* model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Supported SDE families. Component 0 is always the observed variable "u".
///   OU:                   du = (-b_u u + f) ds + sigma_u dW
///   CubicOU:              du = (-b_u u - cubic u^3 + f) ds + sigma_u dW
///   RandomDampingOU:      du = (-b u + f) ds + sigma_u dW,  db = 0
///   SquaredWienerForcing: du = (-b_u u + f) ds + sigma_u d(W^2 - s),  w = W
///   CoupledSystem:        du = (-(b_u + a_u v) u + f) ds + sigma_u dW_u
///                         dv = -(b_v + a_v u) v ds + sigma_v dW_v
struct SdeModel {
  ModelKind kind = ModelKind::OU;
  double b_u = 1.0;
  double b_v = 1.0;
  double a_u = 0.0;
  double a_v = 0.0;
  double sigma_u = 0.0;
  double sigma_v = 0.0;
  double cubic = 1.0;
  DeterministicForcing forcing;
  std::vector<InitialLaw> initial;

  std::size_t state_dim() const;
  std::size_t wiener_processes() const;
  std::vector<std::string> component_names() const;
  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

using RhsFunction = std::function<void(double, std::span<const double>, std::span<double>)>;

/// Galerkin-projected coefficient ODEs of a model on one interval. The state
/// vector holds the d component expansions back to back.
class GalerkinSystem {
 public:
  GalerkinSystem(SdeModel model, const MultiIndexSet& xi_basis, BasisProducts products,
                 ForcingBasis forcing);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t coefficient_count() const noexcept { return products_.size(); }
  std::size_t total_size() const noexcept { return dim_ * products_.size(); }
  const BasisProducts& products() const noexcept { return products_; }
  const ForcingBasis& forcing() const noexcept { return forcing_; }

  void rhs(double t, std::span<const double> y, std::span<double> dy) const;

 private:
  void add_noise(std::size_t process, double scale, double t, std::span<double> out) const;

  SdeModel model_;
  BasisProducts products_;
  ForcingBasis forcing_;
  std::size_t dim_;
  // per process: (coefficient slot, 1-based cosine mode)
  std::vector<std::vector<std::pair<std::size_t, int>>> noise_slots_;
  mutable ProductWorkspace work_;
  mutable std::vector<double> scratch_a_, scratch_b_;
};

GalerkinSystem assemble(const SdeModel& model, const MultiIndexSet& xi_basis,
                        const BasisProducts& products, const ForcingBasis& forcing);

/// Explicit Runge-Kutta (order 2: Heun, order 4: classical) from t0 to t1
/// with step h; the last step is shortened to land on t1. Throws NonFinite
/// on blow-up.
std::vector<double> integrate_ode(const RhsFunction& rhs, std::vector<double> y0, double t0,
                                  double t1, double h, int order);

std::vector<double> integrate(const GalerkinSystem& system, std::vector<double> coeffs0, double t0,
                              double t1, double h, int order);

}  // namespace dgpc
