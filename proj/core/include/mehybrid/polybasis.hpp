#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mehybrid {

/// Legendre polynomial P_n(x) from the three-term recurrence.
double legendre(int n, double x);

/// sqrt(2n+1) P_n(x): orthonormal with respect to the uniform density 1/2 on
/// [-1,1].
double orthonormal_legendre(int n, double x);

/// Writes phi_0(x) ... phi_n(x) into out[0..n]; out must hold n+1 values.
void orthonormal_legendre_all(int n, double x, std::span<double> out);

/// Tuple of nonnegative integers addressing one tensor-product basis
/// function. The total degree is cached.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  std::size_t dimension() const noexcept { return entries_.size(); }
  int degree() const noexcept { return degree_; }
  int operator[](std::size_t k) const { return entries_[k]; }
  std::span<const int> entries() const noexcept { return entries_; }

  /// N * e^j, the pure power along dimension j.
  static MultiIndex axis(std::size_t d, std::size_t j, int n);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) {
    return a.entries_ <=> b.entries_;
  }

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

/// Product over dimensions of orthonormal_legendre(i_k, x_k).
double tensor_basis_eval(const MultiIndex& i, std::span<const double> x);

/// Nodes in (-1,1) with weights normalized to sum to one, so that
/// sum w_k f(x_k) approximates E[f(X)] for X ~ U(-1,1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// q-point Gauss-Legendre rule, exact for polynomials of degree <= 2q-1.
QuadratureRule gauss_legendre(int q);

/// C(N+d, d), the number of multi-indices of total degree <= N.
std::size_t multi_index_count(std::size_t d, int N);

/// All multi-indices with |i| <= N in graded order: ascending total degree,
/// and within one degree lexicographically descending, e.g. for d=2:
/// (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) ...
/// The first multi_index_count(d, N0) entries are therefore exactly the
/// order-N0 set for any N0 <= N.
std::vector<MultiIndex> multi_index_set(std::size_t d, int N);

/// Position of `index` in multi_index_set(d, N), or npos when absent.
std::size_t multi_index_position(const std::vector<MultiIndex>& set, const MultiIndex& index);

/// e_{ijk} = E[Phi_i Phi_j Phi_k] over the order-N basis, stored sparsely by
/// rows (fixed i).
class TripleProductTensor {
 public:
  struct Entry {
    std::uint32_t j;
    std::uint32_t k;
    double value;
  };

  TripleProductTensor() = default;
  TripleProductTensor(std::size_t d, int N);

  std::size_t dimension() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t basis_size() const noexcept { return row_begin_.empty() ? 0 : row_begin_.size() - 1; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }

  /// Nonzero entries of row i, sorted by (j, k).
  std::span<const Entry> row(std::size_t i) const;

  /// Entry lookup; zero when not stored.
  double operator()(std::size_t i, std::size_t j, std::size_t k) const;

  /// out_i = sum_{j,k} e_{ijk} a_j b_k for i < count, using only j, k < count.
  /// count = basis_size() gives the full contraction; a smaller count is the
  /// Galerkin product of the truncated expansions.
  void contract(std::span<const double> a, std::span<const double> b, std::span<double> out,
                std::size_t count) const {
    contract(a, b, out, count, count, count);
  }

  /// General form: rows i < count_out, reading a_j for j < limit_a and b_k
  /// for k < limit_b.
  void contract(std::span<const double> a, std::span<const double> b, std::span<double> out,
                std::size_t count_out, std::size_t limit_a, std::size_t limit_b) const;

 private:
  std::size_t dim_ = 0;
  int order_ = 0;
  std::vector<std::size_t> row_begin_;
  std::vector<Entry> entries_;
};

TripleProductTensor triple_products(std::size_t d, int N);

}  // namespace mehybrid
