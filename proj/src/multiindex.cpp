#include "dgpc/multiindex.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dgpc/errors.hpp"

namespace dgpc {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw InvalidArgument("multi-index exponents must be non-negative");
    degree_ += e;
  }
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis) {
  std::vector<int> e(dim, 0);
  e.at(axis) = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dim() != other.dim()) throw InvalidArgument("multi-index dimension mismatch");
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return MultiIndex(std::move(e));
}

bool MultiIndex::dominated_by(const MultiIndex& other) const {
  if (dim() != other.dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (exponents_[i] > other.exponents_[i]) return false;
  return true;
}

std::strong_ordering graded_lex_compare(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  const std::size_t n = std::min(a.dim(), b.dim());
  for (std::size_t i = 0; i < n; ++i) {
    // larger leading exponent comes first
    if (auto c = b[i] <=> a[i]; c != 0) return c;
  }
  return a.dim() <=> b.dim();
}

namespace {

// Emit every exponent vector of exactly `remaining` total degree over axes
// [axis, dim) in graded-lex order (largest leading exponent first).
void enumerate_degree(std::vector<int>& cur, std::size_t axis, int remaining,
                      std::vector<MultiIndex>& out) {
  if (axis + 1 == cur.size()) {
    cur[axis] = remaining;
    out.emplace_back(cur);
    cur[axis] = 0;
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[axis] = e;
    enumerate_degree(cur, axis + 1, remaining - e, out);
  }
  cur[axis] = 0;
}

}  // namespace

MultiIndexSet::MultiIndexSet(std::size_t dim, int max_degree) : dim_(dim), max_degree_(max_degree) {
  if (dim == 0) throw InvalidArgument("multi-index set needs at least one variable");
  if (max_degree < 0) throw InvalidArgument("multi-index set needs a non-negative degree");
  members_.reserve(binomial(dim + static_cast<std::size_t>(max_degree), dim));
  std::vector<int> cur(dim, 0);
  for (int deg = 0; deg <= max_degree; ++deg) enumerate_degree(cur, 0, deg, members_);
  for (std::size_t i = 0; i < members_.size(); ++i) rank_of_.emplace(members_[i].exponents(), i);
}

std::size_t MultiIndexSet::find(const MultiIndex& index) const {
  auto it = rank_of_.find(index.exponents());
  return it == rank_of_.end() ? size() : it->second;
}

std::size_t MultiIndexSet::rank(const MultiIndex& index) const {
  const std::size_t r = find(index);
  if (r == size()) throw InvalidArgument("multi-index not in the truncated set");
  return r;
}

std::size_t MultiIndexSet::unit_rank(std::size_t axis) const {
  return rank(MultiIndex::unit(dim_, axis));
}

MultiIndexSet build_index_set(std::size_t dim, int max_degree) {
  return MultiIndexSet(dim, max_degree);
}

TensorIndexSet tensor_index_set(const MultiIndexSet& a, const MultiIndexSet& b) {
  return TensorIndexSet(a.size(), b.size());
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace dgpc
