#pragma once

#include <filesystem>
#include <vector>

#include "dgpc/multiindex.hpp"
#include "dgpc/triple_tensor.hpp"

namespace dgpc {

/// Normalized probabilists' Hermite polynomial H_n(x), orthonormal under N(0,1).
double hermite_eval(int n, double x);

/// n-point Gauss rule for N(0,1) (Golub-Welsch); weights sum to 1 and the
/// rule is exact for polynomials of degree <= 2n - 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_hermite_rule(int n);

/// E[H_a H_b H_c] for xi ~ N(0,1):
/// sqrt(a! b! c!) / ((s-a)! (s-b)! (s-c)!) with s = (a+b+c)/2 when admissible, else 0.
double triple_product_1d(int a, int b, int c);

/// Hermite product-formula weight
/// C(alpha,beta,gamma) = [ binom(alpha,beta) binom(beta+gamma,gamma) binom(alpha-beta+gamma,gamma) ]^{1/2},
/// multiplied over coordinates. Requires beta <= alpha componentwise.
double product_coefficient(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma);

/// Triple products of the Wick basis T_alpha(xi) = prod_i H_{alpha_i}(xi_i).
using XiTripleTensor = TripleTensor;

XiTripleTensor build_xi_triple_tensor(const MultiIndexSet& basis);

// Binary cache: little-endian header (u32 K, u32 N, u64 count) followed by
// `count` records (u32 i, u32 j, u32 k, f64 value).
void save_xi_tensor(const std::filesystem::path& path, const MultiIndexSet& basis,
                    const XiTripleTensor& tensor);
XiTripleTensor load_xi_tensor(const std::filesystem::path& path, const MultiIndexSet& basis);

}  // namespace dgpc
