#include "thickobs/multi_index.hpp"

#include <sstream>

#include "thickobs/error.hpp"

namespace thickobs {

MultiIndex::MultiIndex(std::initializer_list<int> v)
{
  if (v.size() < 1 || v.size() > kMaxDim) throw DomainError("multi-index dimension must lie in [1, 3]");
  d = static_cast<int>(v.size());
  int i = 0;
  for (int x : v) {
    if (x < 0) throw DomainError("multi-index entries must be >= 0");
    a[static_cast<std::size_t>(i++)] = x;
  }
}

MultiIndex MultiIndex::from(std::span<const int> v)
{
  if (v.size() < 1 || v.size() > kMaxDim) throw DomainError("multi-index dimension must lie in [1, 3]");
  MultiIndex m(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0) throw DomainError("multi-index entries must be >= 0");
    m.a[i] = v[i];
  }
  return m;
}

int MultiIndex::total() const
{
  int t = 0;
  for (int i = 0; i < d; ++i) t += a[static_cast<std::size_t>(i)];
  return t;
}

std::string MultiIndex::to_string() const
{
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << (*this)[i];
  os << ')';
  return os.str();
}

bool MultiIndex::operator==(const MultiIndex& o) const
{
  if (d != o.d) return false;
  for (int i = 0; i < d; ++i)
    if ((*this)[i] != o[i]) return false;
  return true;
}

std::size_t binomial(int n, int k)
{
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

std::size_t basis_size(int d, int N)
{
  if (N < 0) return 0;
  return binomial(N + d, d);
}

std::size_t rank(const MultiIndex& alpha)
{
  const int n = alpha.total();
  const std::size_t offset = basis_size(alpha.d, n - 1);
  switch (alpha.d) {
    case 1:
      return offset;
    case 2:
      return offset + static_cast<std::size_t>(alpha[0]);
    case 3: {
      // a0 = i leaves n - i + 1 choices of a1 for each smaller i
      const int a0 = alpha[0];
      const std::size_t before = static_cast<std::size_t>(a0) * static_cast<std::size_t>(n + 1) -
                                 static_cast<std::size_t>(a0) * static_cast<std::size_t>(a0 - 1) / 2;
      return offset + before + static_cast<std::size_t>(alpha[1]);
    }
    default:
      throw DomainError("rank: dimension must lie in [1, 3]");
  }
}

MultiIndex unrank(int d, std::size_t r)
{
  if (d < 1 || d > kMaxDim) throw DomainError("unrank: dimension must lie in [1, 3]");
  int n = 0;
  while (basis_size(d, n) <= r) ++n;
  std::size_t k = r - basis_size(d, n - 1);
  MultiIndex m(d);
  switch (d) {
    case 1:
      m[0] = n;
      break;
    case 2:
      m[0] = static_cast<int>(k);
      m[1] = n - m[0];
      break;
    case 3: {
      int a0 = 0;
      while (k >= static_cast<std::size_t>(n - a0 + 1)) {
        k -= static_cast<std::size_t>(n - a0 + 1);
        ++a0;
      }
      m[0] = a0;
      m[1] = static_cast<int>(k);
      m[2] = n - a0 - m[1];
      break;
    }
  }
  return m;
}

std::vector<MultiIndex> enumerate_exact(int d, int n)
{
  if (d < 1 || d > kMaxDim) throw DomainError("enumerate: dimension must lie in [1, 3]");
  std::vector<MultiIndex> out;
  if (n < 0) return out;
  MultiIndex m(d);
  if (d == 1) {
    m[0] = n;
    out.push_back(m);
  } else if (d == 2) {
    for (int a0 = 0; a0 <= n; ++a0) {
      m[0] = a0;
      m[1] = n - a0;
      out.push_back(m);
    }
  } else {
    for (int a0 = 0; a0 <= n; ++a0)
      for (int a1 = 0; a1 <= n - a0; ++a1) {
        m[0] = a0;
        m[1] = a1;
        m[2] = n - a0 - a1;
        out.push_back(m);
      }
  }
  return out;
}

std::vector<MultiIndex> enumerate(int d, int N)
{
  std::vector<MultiIndex> out;
  out.reserve(basis_size(d, N));
  for (int n = 0; n <= N; ++n) {
    auto level = enumerate_exact(d, n);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace thickobs
