#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dgpc {

struct TripleEntry {
  std::uint32_t i, j, k;  // i <= j <= k
  double value;
};

/// Sparse fully symmetric 3-tensor E[T_i T_j T_k] over an orthonormal basis,
/// stored once per sorted index triple.
class TripleTensor {
 public:
  /// Entry grouped for Galerkin products: unordered factor pair (a <= b), target c.
  struct PairEntry {
    std::uint32_t a, b, c;
    double value;
  };

  TripleTensor() = default;
  /// Entries may arrive in any index order; they are canonicalised and sorted.
  TripleTensor(std::size_t basis_size, std::vector<TripleEntry> entries);

  std::size_t basis_size() const noexcept { return basis_size_; }
  std::size_t nonzero_count() const noexcept { return unique_.size(); }
  const std::vector<TripleEntry>& unique_entries() const noexcept { return unique_; }
  const std::vector<PairEntry>& pair_entries() const noexcept { return pairs_; }

  /// Lookup in any index order; zero for absent entries.
  double at(std::size_t i, std::size_t j, std::size_t k) const;

  /// The one-element tensor of the trivial basis {1}.
  static TripleTensor constant_only();

 private:
  std::size_t basis_size_ = 0;
  std::vector<TripleEntry> unique_;
  std::vector<PairEntry> pairs_;
};

}  // namespace dgpc
