#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dgpc/moments.hpp"
#include "dgpc/multiindex.hpp"
#include "dgpc/triple_tensor.hpp"

namespace dgpc {

/// Triple products of the tensor basis {T_alpha(xi)} x {T_k(state)}. The joint
/// triple product is the product of the two parts.
struct BasisProducts {
  std::shared_ptr<const TripleTensor> xi;
  std::shared_ptr<const TripleTensor> state;

  std::size_t xi_size() const { return xi->basis_size(); }
  std::size_t state_size() const { return state->basis_size(); }
  std::size_t size() const { return xi_size() * state_size(); }
};

/// Scalar random variable expanded over the tensor basis; coefficient
/// (alpha, k) lives at alpha * state_size + k.
class ChaosExpansion {
 public:
  ChaosExpansion() = default;
  ChaosExpansion(std::size_t xi_size, std::size_t state_size);
  ChaosExpansion(std::size_t xi_size, std::size_t state_size, std::vector<double> coeffs);

  static ChaosExpansion constant(double value, std::size_t xi_size, std::size_t state_size);

  std::size_t xi_size() const noexcept { return xi_size_; }
  std::size_t state_size() const noexcept { return state_size_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  double& operator()(std::size_t xi, std::size_t state) { return coeffs_[xi * state_size_ + state]; }
  double operator()(std::size_t xi, std::size_t state) const {
    return coeffs_[xi * state_size_ + state];
  }
  std::span<double> coeffs() noexcept { return coeffs_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }

  double mean() const { return coeffs_.at(0); }
  /// E[u^2] = sum of squared coefficients.
  double second_moment() const;
  double variance() const;

  bool same_basis(const ChaosExpansion& other) const {
    return xi_size_ == other.xi_size_ && state_size_ == other.state_size_;
  }

  ChaosExpansion& operator+=(const ChaosExpansion& other);
  ChaosExpansion& operator-=(const ChaosExpansion& other);
  ChaosExpansion& operator*=(double s);
  friend ChaosExpansion operator+(ChaosExpansion a, const ChaosExpansion& b) { return a += b; }
  friend ChaosExpansion operator-(ChaosExpansion a, const ChaosExpansion& b) { return a -= b; }
  friend ChaosExpansion operator*(double s, ChaosExpansion a) { return a *= s; }

  bool operator==(const ChaosExpansion&) const = default;

 private:
  std::size_t xi_size_ = 0;
  std::size_t state_size_ = 0;
  std::vector<double> coeffs_;
};

/// Scratch space for the Galerkin product kernel; reuse across calls to avoid
/// reallocating.
class ProductWorkspace {
 public:
  std::vector<double> pair_sums;
  std::vector<char> u_nonzero, v_nonzero;
};

/// out = Galerkin projection of u*v onto the basis:
///   (uv)_c = sum_{a,b} u_a v_b E[T_a T_b T_c].
/// Summation is organised over unordered factor pairs, so the result is
/// bitwise symmetric in (u, v).
void multiply_into(std::span<const double> u, std::span<const double> v,
                   const BasisProducts& products, std::span<double> out, ProductWorkspace& work);

ChaosExpansion multiply(const ChaosExpansion& u, const ChaosExpansion& v,
                        const BasisProducts& products);

/// u^m with reprojection after every product; power(u, 1) = u.
ChaosExpansion power(const ChaosExpansion& u, int m, const BasisProducts& products);

/// E[u^m] as the zero-index coefficient of power(u, m).
double raw_moment(const ChaosExpansion& u, int m, const BasisProducts& products);

/// E[u v] for expansions on the same basis: the zero-index coefficient of
/// multiply(u, v), i.e. sum_c u_c v_c.
double inner(const ChaosExpansion& u, const ChaosExpansion& v);

/// All mixed raw moments E[prod v_i^{l_i}], |l| <= max_total_order, in
/// graded-lex order. Each entry is the zero-index coefficient of the chained
/// product P_1^{l_1} ... P_d^{l_d} of projected powers.
MomentTable mixed_moments(const std::vector<ChaosExpansion>& components, int max_total_order,
                          const BasisProducts& products);

/// Number of tensor Gauss-Hermite nodes mixed_moments_xi_exact would use.
std::size_t xi_quadrature_size(const std::vector<ChaosExpansion>& components, int max_total_order,
                               const MultiIndexSet& xi_basis);

/// Mixed moments with the expectation over xi taken exactly by tensor
/// Gauss-Hermite quadrature on the xi coordinates the expansions use. Products
/// in the state variables are still projected onto the state basis. Returns
/// nullopt when the rule would need more than `max_nodes` points.
std::optional<MomentTable> mixed_moments_xi_exact(const std::vector<ChaosExpansion>& components,
                                                  int max_total_order, const MultiIndexSet& xi_basis,
                                                  const TripleTensor& state,
                                                  std::size_t max_nodes = 2'000'000);

/// Discrete measure for the state variables: values[a][k] is state basis
/// function k at atom a.
struct StateRule {
  std::vector<double> weights;
  std::vector<std::vector<double>> values;
};

/// Mixed moments with xi integrated exactly by Gauss-Hermite quadrature and
/// the state variables integrated with `rule`. Returns nullopt when the xi
/// rule would need more than `max_nodes` points.
std::optional<MomentTable> mixed_moments_quadrature(const std::vector<ChaosExpansion>& components,
                                                    int max_total_order, const MultiIndexSet& xi_basis,
                                                    const StateRule& rule,
                                                    std::size_t max_nodes = 2'000'000);

}  // namespace dgpc
