#include "mehybrid/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace mehybrid {

double legendre(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre: negative degree");
  if (n == 0) return 1.0;
  double p_prev = 1.0;
  double p = x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
    p_prev = p;
    p = next;
  }
  return p;
}

double orthonormal_legendre(int n, double x) {
  return std::sqrt(2.0 * n + 1.0) * legendre(n, x);
}

void orthonormal_legendre_all(int n, double x, std::span<double> out) {
  if (n < 0) throw std::invalid_argument("orthonormal_legendre_all: negative degree");
  if (out.size() < static_cast<std::size_t>(n) + 1)
    throw std::invalid_argument("orthonormal_legendre_all: output too small");
  double p_prev = 1.0;
  double p = x;
  out[0] = 1.0;
  if (n >= 1) out[1] = std::sqrt(3.0) * x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
    p_prev = p;
    p = next;
    out[k + 1] = std::sqrt(2.0 * (k + 1) + 1.0) * p;
  }
}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("MultiIndex: dimension must be >= 1");
  for (int e : entries_) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative entry");
    degree_ += e;
  }
}

MultiIndex MultiIndex::axis(std::size_t d, std::size_t j, int n) {
  std::vector<int> e(d, 0);
  e.at(j) = n;
  return MultiIndex(std::move(e));
}

double tensor_basis_eval(const MultiIndex& i, std::span<const double> x) {
  if (x.size() != i.dimension())
    throw std::invalid_argument("tensor_basis_eval: dimension mismatch");
  double value = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) value *= orthonormal_legendre(i[k], x[k]);
  return value;
}

namespace {

// P_q(x) and P_q'(x) for q >= 1, |x| < 1.
std::pair<double, double> legendre_with_derivative(int q, double x) {
  double p_prev = 1.0;
  double p = x;
  for (int k = 1; k < q; ++k) {
    const double next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
    p_prev = p;
    p = next;
  }
  return {p, q * (x * p - p_prev) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre(int q) {
  if (q < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  if (q == 1) return {{0.0}, {1.0}};
  QuadratureRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    // Tricomi's initial guess, then Newton on P_q.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(q, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    const double dp = legendre_with_derivative(q, x).second;
    // Standard weight 2/((1-x^2) P'^2), halved for the probability measure.
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
  return rule;
}

std::size_t multi_index_count(std::size_t d, int N) {
  if (d < 1 || N < 0) throw std::invalid_argument("multi_index_count: need d >= 1, N >= 0");
  // C(N+d, d) computed incrementally; every partial product is an integer.
  std::size_t c = 1;
  for (std::size_t k = 1; k <= d; ++k) c = c * (static_cast<std::size_t>(N) + k) / k;
  return c;
}

namespace {

void compositions(int remaining, std::size_t pos, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = v;
    compositions(remaining - v, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_index_set(std::size_t d, int N) {
  if (d < 1 || N < 0) throw std::invalid_argument("multi_index_set: need d >= 1, N >= 0");
  std::vector<MultiIndex> out;
  out.reserve(multi_index_count(d, N));
  std::vector<int> cur(d, 0);
  for (int n = 0; n <= N; ++n) compositions(n, 0, cur, out);
  return out;
}

std::size_t multi_index_position(const std::vector<MultiIndex>& set, const MultiIndex& index) {
  const auto it = std::find(set.begin(), set.end(), index);
  return it == set.end() ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(it - set.begin());
}

TripleProductTensor::TripleProductTensor(std::size_t d, int N) : dim_(d), order_(N) {
  const auto indices = multi_index_set(d, N);
  const std::size_t n1 = static_cast<std::size_t>(N) + 1;

  // 1-D table E[phi_a phi_b phi_c]; the integrand has degree <= 3N.
  const int q = std::max(1, (3 * N + 2) / 2);
  const auto rule = gauss_legendre(q);
  std::vector<double> phi(n1 * rule.size());
  for (std::size_t s = 0; s < rule.size(); ++s)
    orthonormal_legendre_all(N, rule.nodes[s], std::span(phi).subspan(s * n1, n1));
  std::vector<double> table(n1 * n1 * n1, 0.0);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n1; ++b)
      for (std::size_t c = 0; c < n1; ++c) {
        // Selection rules: zero unless a+b+c is even and (a,b,c) is a triangle.
        if ((a + b + c) % 2 == 1) continue;
        if (c > a + b || a > b + c || b > a + c) continue;
        double sum = 0.0;
        for (std::size_t s = 0; s < rule.size(); ++s)
          sum += rule.weights[s] * phi[s * n1 + a] * phi[s * n1 + b] * phi[s * n1 + c];
        table[(a * n1 + b) * n1 + c] = sum;
      }

  const std::size_t P = indices.size();
  row_begin_.assign(P + 1, 0);
  for (std::size_t i = 0; i < P; ++i) {
    row_begin_[i] = entries_.size();
    for (std::size_t j = 0; j < P; ++j)
      for (std::size_t k = 0; k < P; ++k) {
        double v = 1.0;
        for (std::size_t dim = 0; dim < d && v != 0.0; ++dim) {
          const auto a = static_cast<std::size_t>(indices[i][dim]);
          const auto b = static_cast<std::size_t>(indices[j][dim]);
          const auto c = static_cast<std::size_t>(indices[k][dim]);
          v *= table[(a * n1 + b) * n1 + c];
        }
        if (v != 0.0)
          entries_.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k), v});
      }
  }
  row_begin_[P] = entries_.size();
}

std::span<const TripleProductTensor::Entry> TripleProductTensor::row(std::size_t i) const {
  if (i + 1 >= row_begin_.size()) throw std::out_of_range("TripleProductTensor::row");
  return std::span(entries_).subspan(row_begin_[i], row_begin_[i + 1] - row_begin_[i]);
}

double TripleProductTensor::operator()(std::size_t i, std::size_t j, std::size_t k) const {
  const auto r = row(i);
  const auto it = std::lower_bound(r.begin(), r.end(), std::pair{j, k}, [](const Entry& e, const auto& key) {
    return std::pair<std::size_t, std::size_t>{e.j, e.k} < key;
  });
  if (it != r.end() && it->j == j && it->k == k) return it->value;
  return 0.0;
}

void TripleProductTensor::contract(std::span<const double> a, std::span<const double> b,
                                   std::span<double> out, std::size_t count_out, std::size_t limit_a,
                                   std::size_t limit_b) const {
  const std::size_t P = basis_size();
  if (count_out > P || limit_a > P || limit_b > P || a.size() < limit_a || b.size() < limit_b ||
      out.size() < count_out)
    throw std::invalid_argument("TripleProductTensor::contract: size mismatch");
  for (std::size_t i = 0; i < count_out; ++i) {
    double sum = 0.0;
    for (const auto& e : row(i)) {
      if (e.j >= limit_a || e.k >= limit_b) continue;
      sum += e.value * a[e.j] * b[e.k];
    }
    out[i] = sum;
  }
}

TripleProductTensor triple_products(std::size_t d, int N) { return TripleProductTensor(d, N); }

}  // namespace mehybrid
