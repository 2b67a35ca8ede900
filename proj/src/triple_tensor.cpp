#include "dgpc/triple_tensor.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "dgpc/errors.hpp"

namespace dgpc {

namespace {

auto key(const TripleEntry& e) { return std::tie(e.i, e.j, e.k); }

}  // namespace

TripleTensor::TripleTensor(std::size_t basis_size, std::vector<TripleEntry> entries)
    : basis_size_(basis_size), unique_(std::move(entries)) {
  for (auto& e : unique_) {
    std::array<std::uint32_t, 3> idx{e.i, e.j, e.k};
    std::sort(idx.begin(), idx.end());
    if (idx[2] >= basis_size_) throw InvalidArgument("triple tensor index out of range");
    e.i = idx[0];
    e.j = idx[1];
    e.k = idx[2];
  }
  std::sort(unique_.begin(), unique_.end(),
            [](const TripleEntry& x, const TripleEntry& y) { return key(x) < key(y); });
  auto dup = std::adjacent_find(unique_.begin(), unique_.end(), [](const auto& x, const auto& y) {
    return key(x) == key(y);
  });
  if (dup != unique_.end()) throw InvalidArgument("duplicate triple tensor entry");

  pairs_.reserve(3 * unique_.size());
  for (const auto& e : unique_) {
    const auto [i, j, k] = key(e);
    if (i == j && j == k) {
      pairs_.push_back({i, i, i, e.value});
    } else if (i == j) {
      pairs_.push_back({i, i, k, e.value});
      pairs_.push_back({i, k, i, e.value});
    } else if (j == k) {
      pairs_.push_back({i, j, j, e.value});
      pairs_.push_back({j, j, i, e.value});
    } else {
      pairs_.push_back({i, j, k, e.value});
      pairs_.push_back({i, k, j, e.value});
      pairs_.push_back({j, k, i, e.value});
    }
  }
  std::sort(pairs_.begin(), pairs_.end(), [](const PairEntry& x, const PairEntry& y) {
    return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c);
  });
}

double TripleTensor::at(std::size_t i, std::size_t j, std::size_t k) const {
  std::array<std::size_t, 3> idx{i, j, k};
  std::sort(idx.begin(), idx.end());
  TripleEntry probe{static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[1]),
                    static_cast<std::uint32_t>(idx[2]), 0.0};
  auto it = std::lower_bound(unique_.begin(), unique_.end(), probe,
                             [](const auto& x, const auto& y) { return key(x) < key(y); });
  if (it != unique_.end() && key(*it) == key(probe)) return it->value;
  return 0.0;
}

TripleTensor TripleTensor::constant_only() { return TripleTensor(1, {{0, 0, 0, 1.0}}); }

}  // namespace dgpc
