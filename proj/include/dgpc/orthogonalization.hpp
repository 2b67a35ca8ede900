#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "dgpc/chaos.hpp"
#include "dgpc/hermite.hpp"
#include "dgpc/moments.hpp"
#include "dgpc/triple_tensor.hpp"

namespace dgpc {

/// Polynomials orthonormal under a (multivariate, possibly correlated)
/// measure known only through its moments.
///
/// Internally the polynomials are expressed in the standardized variables
/// z_i = (v_i - mean_i) / std_i; T_k(z) = sum_m C(k,m) z^{e_m} with the
/// monomials e_m in graded-lex order and C lower triangular.
class OrthonormalBasis {
 public:
  OrthonormalBasis(std::vector<double> mean, std::vector<double> stddev, MomentTable standardized,
                   Eigen::MatrixXd change_of_basis, double gram_condition);

  std::size_t dim() const noexcept { return mean_.size(); }
  int degree() const noexcept { return monomials_.max_degree(); }
  std::size_t size() const noexcept { return monomials_.size(); }
  const MultiIndexSet& monomials() const noexcept { return monomials_; }

  std::span<const double> mean() const noexcept { return mean_; }
  std::span<const double> stddev() const noexcept { return stddev_; }

  /// Coefficients over standardized monomials (row k = T_k).
  const Eigen::MatrixXd& change_of_basis() const noexcept { return change_; }
  /// Coefficients over raw monomials of v (row k = T_k), lower triangular.
  Eigen::MatrixXd monomial_coefficients() const;

  /// Moments of the standardized variables the basis was built from.
  const MomentTable& source_moments() const noexcept { return moments_; }
  double gram_condition() const noexcept { return gram_condition_; }

  /// T_k evaluated at a point of the original variables.
  double evaluate(std::size_t k, std::span<const double> point) const;

  /// E[T_k T_l] through the source moments (should be the identity).
  Eigen::MatrixXd gram_through_moments() const;

  /// E[z_i T_k] for every k: the expansion of the standardized coordinate i.
  std::vector<double> coordinate_expansion(std::size_t component) const;

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
  MomentTable moments_;
  MultiIndexSet monomials_;
  Eigen::MatrixXd change_;
  double gram_condition_;
};

/// Modified Gram-Schmidt with one re-orthogonalization pass over graded-lex
/// monomials. `moments` may be raw moments; they are standardized first.
/// Requires moments to order 2*degree. Throws DegenerateMeasure when a
/// squared residual norm falls below `pivot_tolerance` times the squared norm
/// of the monomial being orthogonalized.
OrthonormalBasis orthonormalize(const MomentTable& moments, int degree,
                                double pivot_tolerance = 1e-10);

/// Largest degree <= max_degree whose Gram-Schmidt succeeds. Projected
/// moment sequences can describe a measure with few atoms, for which the
/// full degree is unattainable. Throws DegenerateMeasure if even degree 1 fails.
OrthonormalBasis orthonormalize_up_to(const MomentTable& moments, int max_degree,
                                      double pivot_tolerance = 1e-10);

/// Gauss rule with up to n nodes for a univariate measure given by its
/// moments m_0..m_{2n-1} (Golub-Welsch on the Jacobi matrix of the
/// orthonormal polynomials). Fewer nodes are returned when the moments only
/// support a lower degree. Nodes are in the variable the moments describe.
GaussRule gauss_rule_from_moments(std::span<const double> moments, int n);

using StateTripleTensor = TripleTensor;

/// E[T_k T_l T_m] by expanding into monomials and contracting against the
/// moment table; needs moments to order 3*degree (MissingMoment otherwise).
StateTripleTensor state_triple_products(const OrthonormalBasis& basis);

/// Affine initial condition v_i = mean_i T_0 + std_i z_i, expanded over the
/// tensor basis {xi basis} x {basis}; one expansion per component.
std::vector<ChaosExpansion> initial_condition_coeffs(std::span<const double> mean,
                                                     std::span<const double> stddev,
                                                     const OrthonormalBasis& basis,
                                                     std::size_t xi_size);

}  // namespace dgpc
