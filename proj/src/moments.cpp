#include "dgpc/moments.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "dgpc/errors.hpp"

namespace dgpc {

namespace {

// Index sets are shared between tables of equal shape.
std::shared_ptr<const MultiIndexSet> shared_index(std::size_t dim, int order) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const MultiIndexSet>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_shared<const MultiIndexSet>(dim, order);
  return slot;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

MomentTable::MomentTable(std::size_t dim, int max_order)
    : index_(shared_index(dim, max_order)), values_(index_->size(), 0.0) {}

MomentTable::MomentTable(std::size_t dim, int max_order, std::vector<double> values)
    : index_(shared_index(dim, max_order)), values_(std::move(values)) {
  if (values_.size() != index_->size())
    throw InvalidArgument("moment table size does not match J_{d,order}");
}

double MomentTable::at(const MultiIndex& exponent) const {
  if (!index_ || exponent.dim() != dim()) throw InvalidArgument("moment exponent dimension mismatch");
  if (exponent.degree() > max_order())
    throw MissingMoment("moment of order " + std::to_string(exponent.degree()) +
                        " requested from a table of order " + std::to_string(max_order()));
  return values_[index_->rank(exponent)];
}

double MomentTable::at(std::initializer_list<int> exponent) const {
  return at(MultiIndex(std::vector<int>(exponent)));
}

double MomentTable::pure(std::size_t component, int order) const {
  std::vector<int> e(dim(), 0);
  e.at(component) = order;
  return at(MultiIndex(std::move(e)));
}

std::vector<double> MomentTable::marginal(std::size_t component, int order) const {
  std::vector<double> m(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) m[k] = pure(component, k);
  return m;
}

MomentTable MomentTable::affine(std::span<const double> shift, std::span<const double> scale) const {
  const std::size_t d = dim();
  if (shift.size() != d || scale.size() != d) throw InvalidArgument("affine map dimension mismatch");
  MomentTable out(d, max_order());
  const auto& idx = *index_;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto& l = idx[r];
    double acc = 0.0;
    // sub-exponents k <= l all have rank <= r in graded-lex order
    for (std::size_t q = 0; q <= r; ++q) {
      const auto& k = idx[q];
      if (!k.dominated_by(l)) continue;
      double w = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        w *= binom(l[i], k[i]) * std::pow(scale[i], k[i]);
        if (l[i] > k[i]) w *= std::pow(shift[i], l[i] - k[i]);
      }
      acc += w * values_[q];
    }
    out.values_[r] = acc;
  }
  return out;
}

MomentTable MomentTable::standardized(std::span<const double> mean,
                                      std::span<const double> stddev) const {
  std::vector<double> shift(dim()), scale(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(stddev[i] > 0.0)) throw DegenerateMeasure("cannot standardize a zero-variance component");
    scale[i] = 1.0 / stddev[i];
    shift[i] = -mean[i] / stddev[i];
  }
  return affine(shift, scale);
}

MomentTable MomentTable::destandardized(std::span<const double> mean,
                                        std::span<const double> stddev) const {
  return affine(mean, stddev);
}

MomentTable MomentTable::truncated(int order) const {
  if (order > max_order())
    throw MissingMoment("cannot truncate a moment table to a higher order");
  MomentTable out(dim(), order);
  for (std::size_t r = 0; r < out.index_->size(); ++r) out.values_[r] = values_[r];
  return out;
}

MomentTable independent_moment_table(const std::vector<std::vector<double>>& marginals, int order) {
  MomentTable out(marginals.size(), order);
  const auto& idx = out.index();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    double v = 1.0;
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      const auto e = static_cast<std::size_t>(idx[r][i]);
      if (e >= marginals[i].size()) throw MissingMoment("marginal moment sequence too short");
      v *= marginals[i][e];
    }
    out[r] = v;
  }
  return out;
}

}  // namespace dgpc
