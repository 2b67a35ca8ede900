#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace dgpc {

/// Exponent vector with cached total degree.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  static MultiIndex zero(std::size_t dim) { return MultiIndex(std::vector<int>(dim, 0)); }
  static MultiIndex unit(std::size_t dim, std::size_t axis);

  std::size_t dim() const noexcept { return exponents_.size(); }
  int degree() const noexcept { return degree_; }
  int operator[](std::size_t i) const { return exponents_[i]; }
  const std::vector<int>& exponents() const noexcept { return exponents_; }

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise a <= b.
  bool dominated_by(const MultiIndex& other) const;

  bool operator==(const MultiIndex& other) const = default;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Graded lexicographic order: total degree first, then larger leading
/// exponents first, i.e. (1,0) precedes (0,1).
std::strong_ordering graded_lex_compare(const MultiIndex& a, const MultiIndex& b);

struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return graded_lex_compare(a, b) < 0;
  }
};

/// The truncated family J_{K,N} = { alpha in N_0^K : |alpha| <= N } in graded-lex order.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;
  MultiIndexSet(std::size_t dim, int max_degree);

  std::size_t dim() const noexcept { return dim_; }
  int max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return members_.size(); }

  const MultiIndex& operator[](std::size_t rank) const { return members_[rank]; }
  const std::vector<MultiIndex>& members() const noexcept { return members_; }

  /// Position of `index`; throws InvalidArgument if it is not a member.
  std::size_t rank(const MultiIndex& index) const;
  /// Position of `index`, or size() if it is not a member.
  std::size_t find(const MultiIndex& index) const;
  bool contains(const MultiIndex& index) const { return find(index) < size(); }

  /// Ranks of the unit indices e_0 .. e_{dim-1} (only meaningful for max_degree >= 1).
  std::size_t unit_rank(std::size_t axis) const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

 private:
  std::size_t dim_ = 0;
  int max_degree_ = 0;
  std::vector<MultiIndex> members_;
  std::map<std::vector<int>, std::size_t> rank_of_;
};

MultiIndexSet build_index_set(std::size_t dim, int max_degree);

/// Product family {(a, b)} stored as parent-rank pairs, a-rank major.
class TensorIndexSet {
 public:
  TensorIndexSet(std::size_t outer_size, std::size_t inner_size)
      : outer_(outer_size), inner_(inner_size) {}

  std::size_t size() const noexcept { return outer_ * inner_; }
  std::size_t outer_size() const noexcept { return outer_; }
  std::size_t inner_size() const noexcept { return inner_; }

  std::size_t rank(std::size_t outer, std::size_t inner) const noexcept {
    return outer * inner_ + inner;
  }
  std::pair<std::size_t, std::size_t> unrank(std::size_t r) const noexcept {
    return {r / inner_, r % inner_};
  }

 private:
  std::size_t outer_;
  std::size_t inner_;
};

TensorIndexSet tensor_index_set(const MultiIndexSet& a, const MultiIndexSet& b);

std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace dgpc
