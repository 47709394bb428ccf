#pragma once

// Multi-indices alpha in N^d with |alpha| <= N, d <= 3.
//
// Ordering is graded, then ascending lexicographic within each degree:
// d = 2, N = 2 gives (0,0), (0,1), (1,0), (0,2), (1,1), (2,0).
// The level-N ranks are a prefix of the level-(N+1) ranks, so raising the
// level of an expansion only appends coefficients.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace thickobs {

inline constexpr int kMaxDim = 3;

struct MultiIndex
{
  std::array<int, kMaxDim> a{};
  int d = 1;

  MultiIndex() = default;
  explicit MultiIndex(int dim) : d(dim) {}
  MultiIndex(std::initializer_list<int> v);
  static MultiIndex from(std::span<const int> v);

  int& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
  int operator[](int i) const { return a[static_cast<std::size_t>(i)]; }
  int total() const;
  std::string to_string() const;

  bool operator==(const MultiIndex& o) const;
};

/// binom(n, k) as a size_t (small arguments only).
std::size_t binomial(int n, int k);

/// Number of multi-indices in N^d with |alpha| <= N: binom(N + d, d).
std::size_t basis_size(int d, int N);

/// Position of alpha in the graded ascending-lex order.
std::size_t rank(const MultiIndex& alpha);

/// Inverse of rank for dimension d.
MultiIndex unrank(int d, std::size_t r);

/// All multi-indices with |alpha| <= N, in rank order.
std::vector<MultiIndex> enumerate(int d, int N);

/// All multi-indices with |alpha| == n, in rank order.
std::vector<MultiIndex> enumerate_exact(int d, int n);

}  // namespace thickobs
