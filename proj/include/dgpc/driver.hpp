#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dgpc/chaos.hpp"
#include "dgpc/moments.hpp"
#include "dgpc/sde.hpp"
#include "dgpc/statistics.hpp"

namespace dgpc {

/// How restart moments are harvested from the chaos expansions.
///   Projected     every power is reprojected onto the truncated basis.
///   XiQuadrature  xi is integrated exactly by Gauss-Hermite quadrature; state
///                 products are still reprojected.
///   Quadrature    as XiQuadrature, but a single active state variable is
///                 integrated with the Gauss rule of its own moments.
///   Auto          Quadrature within the node budget, else Projected.
enum class MomentMethod { Auto, Projected, XiQuadrature, Quadrature };

const char* moment_method_name(MomentMethod m);
MomentMethod parse_moment_method(const std::string& name);

struct DgpcConfig {
  double t_end = 1.0;
  int n_restarts = 1;
  int K = 1;  // xi modes per interval, summed over Wiener processes
  int N = 1;  // xi polynomial degree
  int L = 1;  // state polynomial degree
  int order = 4;
  double h = 1e-3;
  /// Spacing of mean/variance samples; 0 samples at restart times only.
  double output_dt = 0.0;
  std::uint64_t seed = 0;
  MomentMethod moment_method = MomentMethod::Auto;
  std::size_t quadrature_budget = 2'000'000;

  double delta_t() const { return t_end / n_restarts; }
  double restart_time(int j) const { return t_end * j / n_restarts; }
  /// Order of the mixed moment table harvested at each restart.
  int moment_order() const { return std::max(3 * L, 6); }
  void validate() const;
};

/// State of the system at one restart time t_j.
struct RestartRecord {
  double time = 0.0;
  std::vector<double> mean;
  std::vector<double> variance;
  /// Components with positive variance; only these enter the state basis.
  std::vector<bool> active;
  /// Mixed moments of the standardized active components (empty if none).
  MomentTable moments;
  CumulantReport cumulants;
  /// Condition number of the Gram matrix of the basis built from this state.
  double gram_condition = 0.0;
  /// Final expansions of the interval ending at t_j (empty at t = 0).
  std::vector<ChaosExpansion> coefficients;
  /// |mean, variance| mismatch of the re-initialized expansion (relative).
  double reinit_mean_error = 0.0;
  double reinit_variance_error = 0.0;
  /// Max |difference| between these moments to order 2L and those of the
  /// re-initialized expansion.
  double reinit_moment_loss = 0.0;
  /// Size and total degree of the state basis built at t_j; the degree is
  /// below L when the moments admit no higher-degree orthonormal family.
  std::size_t state_basis_size = 0;
  int state_degree = 0;
  /// Method that produced `moments` (Auto never appears here).
  MomentMethod moment_method = MomentMethod::Projected;
};

struct TimeSample {
  double time = 0.0;
  std::vector<double> mean;
  std::vector<double> variance;
};

struct DgpcResult {
  std::vector<std::string> components;
  std::vector<TimeSample> samples;
  std::vector<RestartRecord> records;

  std::vector<double> times() const;
  std::vector<double> mean_trajectory(std::size_t component) const;
  std::vector<double> variance_trajectory(std::size_t component) const;
  const RestartRecord& final_record() const { return records.back(); }
};

/// Exact moments of independent initial laws, to `order`.
MomentTable initial_moment_table(const std::vector<InitialLaw>& laws, int order);

/// Triple products of the Wick basis J_{K,N}, computed once per (K, N) and
/// shared for the life of the process.
std::shared_ptr<const TripleTensor> cached_xi_tensor(std::size_t K, int N);

std::vector<RestartRecord> run_dgpc_records(const DgpcConfig& config, const SdeModel& model);
DgpcResult run_dgpc(const DgpcConfig& config, const SdeModel& model);

/// Single Galerkin solve over [0, t_end] with K xi modes (n_restarts ignored).
/// Gaussian initial components use a Hermite state basis.
DgpcResult run_hermite_pc(const DgpcConfig& config, const SdeModel& model);

}  // namespace dgpc
