#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dgpc/multiindex.hpp"

namespace dgpc {

/// Joint raw moments E[prod_i v_i^{l_i}] for all |l| <= max_order, stored in
/// graded-lex order of J_{dim,max_order}.
class MomentTable {
 public:
  MomentTable() = default;
  MomentTable(std::size_t dim, int max_order);
  MomentTable(std::size_t dim, int max_order, std::vector<double> values);

  std::size_t dim() const noexcept { return index_ ? index_->dim() : 0; }
  int max_order() const noexcept { return index_ ? index_->max_degree() : -1; }
  const MultiIndexSet& index() const { return *index_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Throws MissingMoment beyond max_order.
  double at(const MultiIndex& exponent) const;
  double at(std::initializer_list<int> exponent) const;
  double& operator[](std::size_t rank) { return values_[rank]; }
  double operator[](std::size_t rank) const { return values_[rank]; }

  /// Pure moment E[v_i^k].
  double pure(std::size_t component, int order) const;

  /// Moments of the standardized variables z_i = (v_i - mean_i) / std_i.
  MomentTable standardized(std::span<const double> mean, std::span<const double> stddev) const;

  /// Inverse of standardized(): moments of v_i = mean_i + std_i z_i.
  MomentTable destandardized(std::span<const double> mean, std::span<const double> stddev) const;

  /// Sub-table truncated to a lower order.
  MomentTable truncated(int order) const;

  /// Univariate moment sequence m_0..m_order of one component.
  std::vector<double> marginal(std::size_t component, int order) const;

 private:
  MomentTable affine(std::span<const double> shift, std::span<const double> scale) const;

  std::shared_ptr<const MultiIndexSet> index_;
  std::vector<double> values_;
};

/// Moment table of independent components from their marginal moment sequences.
MomentTable independent_moment_table(const std::vector<std::vector<double>>& marginals, int order);

}  // namespace dgpc
