#include "mehybrid/surrogate.hpp"

#include <array>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>

#include "mehybrid/errors.hpp"

namespace mehybrid {

namespace {

constexpr std::size_t kStackTable = 256;

// Visits every node of the q^d tensor grid; fn(x, w) receives the local
// coordinates and the product weight.
template <class Fn>
void for_each_tensor_node(const QuadratureRule& rule, std::size_t d, Fn&& fn) {
  const std::size_t q = rule.size();
  std::vector<std::size_t> digit(d, 0);
  std::vector<double> x(d);
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = rule.nodes[digit[k]];
      w *= rule.weights[digit[k]];
    }
    fn(std::span<const double>(x), w);
    std::size_t k = 0;
    while (k < d && ++digit[k] == q) digit[k++] = 0;
    if (k == d) break;
  }
}

// Accumulates f(x) * Phi_i(x) * w over the grid for all basis indices.
template <class Eval>
std::vector<double> tensor_projection(const std::vector<MultiIndex>& indices, std::size_t d, int N,
                                      int q, Eval&& eval) {
  const auto rule = gauss_legendre(q);
  const std::size_t n1 = static_cast<std::size_t>(N) + 1;
  std::vector<double> coeffs(indices.size(), 0.0);
  std::vector<double> table(d * n1);
  for_each_tensor_node(rule, d, [&](std::span<const double> x, double w) {
    const double fx = eval(x);
    for (std::size_t k = 0; k < d; ++k)
      orthonormal_legendre_all(N, x[k], std::span(table).subspan(k * n1, n1));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      double phi = 1.0;
      for (std::size_t k = 0; k < d; ++k) phi *= table[k * n1 + static_cast<std::size_t>(indices[i][k])];
      coeffs[i] += w * fx * phi;
    }
  });
  return coeffs;
}

std::string format_point(std::span<const double> z) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t k = 0; k < z.size(); ++k) os << (k ? ", " : "") << z[k];
  os << ')';
  return os.str();
}

}  // namespace

GpcExpansion::GpcExpansion(Element element, int order, std::vector<double> coeffs)
    : element_(std::move(element)), order_(order), coeffs_(std::move(coeffs)) {
  if (order_ < 0) throw std::invalid_argument("GpcExpansion: negative order");
  indices_ = multi_index_set(element_.dimension(), order_);
  if (coeffs_.size() != indices_.size())
    throw std::invalid_argument("GpcExpansion: coefficient count does not match the order");
  flat_.reserve(indices_.size() * element_.dimension());
  for (const auto& i : indices_)
    for (int v : i.entries()) flat_.push_back(v);
}

double GpcExpansion::coeff(const MultiIndex& i) const {
  if (i.dimension() != dimension()) throw std::invalid_argument("GpcExpansion::coeff: dimension mismatch");
  if (i.degree() > order_) return 0.0;
  const auto pos = multi_index_position(indices_, i);
  return coeffs_[pos];
}

double GpcExpansion::evaluate_local(std::span<const double> x) const {
  const std::size_t d = dimension();
  const std::size_t n1 = static_cast<std::size_t>(order_) + 1;
  std::array<double, kStackTable> stack;
  std::vector<double> heap;
  std::span<double> table;
  if (d * n1 <= kStackTable) {
    table = std::span(stack).first(d * n1);
  } else {
    heap.resize(d * n1);
    table = heap;
  }
  for (std::size_t k = 0; k < d; ++k) orthonormal_legendre_all(order_, x[k], table.subspan(k * n1, n1));
  if (d == 1) {
    double sum = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) sum += coeffs_[i] * table[i];
    return sum;
  }
  double sum = 0.0;
  const int* idx = flat_.data();
  for (std::size_t i = 0; i < coeffs_.size(); ++i, idx += d) {
    double phi = coeffs_[i];
    for (std::size_t k = 0; k < d; ++k) phi *= table[k * n1 + static_cast<std::size_t>(idx[k])];
    sum += phi;
  }
  return sum;
}

double GpcExpansion::evaluate_unchecked(std::span<const double> z) const {
  const std::size_t d = dimension();
  std::array<double, 16> stack;
  std::vector<double> heap;
  std::span<double> x;
  if (d <= stack.size()) {
    x = std::span(stack).first(d);
  } else {
    heap.resize(d);
    x = heap;
  }
  to_local_unchecked(element_, z, x);
  return evaluate_local(x);
}

double GpcExpansion::evaluate(std::span<const double> z) const {
  if (!element_.contains(z)) throw std::invalid_argument("GpcExpansion::evaluate: point outside element");
  return evaluate_unchecked(z);
}

GpcExpansion project(const PointFunction& f, const Element& e, int N, int q) {
  if (q < 1) throw std::invalid_argument("project: need q >= 1");
  const std::size_t d = e.dimension();
  auto indices = multi_index_set(d, N);
  std::vector<double> z(d);
  auto coeffs = tensor_projection(indices, d, N, q, [&](std::span<const double> x) {
    to_global_unchecked(e, x, z);
    return f(z);
  });
  return GpcExpansion(e, N, std::move(coeffs));
}

GpcExpansion build_collocation(LimitStateModel& model, const Element& e, int N, int q) {
  if (q < N + 1) throw std::invalid_argument("build_collocation: need q >= N+1");
  if (model.dimension() != e.dimension())
    throw std::invalid_argument("build_collocation: model and element dimensions differ");
  const std::size_t d = e.dimension();
  auto indices = multi_index_set(d, N);
  std::vector<double> z(d);
  auto coeffs = tensor_projection(indices, d, N, q, [&](std::span<const double> x) {
    to_global_unchecked(e, x, z);
    try {
      return model.evaluate(z);
    } catch (const std::exception& ex) {
      std::throw_with_nested(
          ModelEvaluationError("model evaluation failed at collocation node " + format_point(z) + ": " + ex.what()));
    }
  });
  return GpcExpansion(e, N, std::move(coeffs));
}

double eval_expansion(const GpcExpansion& exp, std::span<const double> z) { return exp.evaluate(z); }

double local_variance(const GpcExpansion& exp) {
  double s = 0.0;
  const auto c = exp.coeffs();
  for (std::size_t i = 1; i < c.size(); ++i) s += c[i] * c[i];
  return s;
}

MultiElementSurrogate::MultiElementSurrogate(Decomposition decomposition, std::vector<GpcExpansion> expansions)
    : decomposition_(std::move(decomposition)), expansions_(std::move(expansions)) {
  if (decomposition_.size() != expansions_.size())
    throw std::invalid_argument("MultiElementSurrogate: one expansion per element required");
  for (std::size_t k = 0; k < expansions_.size(); ++k) {
    const auto& a = decomposition_[k];
    const auto& b = expansions_[k].element();
    if (a.lower != b.lower || a.upper != b.upper)
      throw std::invalid_argument("MultiElementSurrogate: expansion " + std::to_string(k) +
                                  " does not match its element");
  }
}

MultiElementSurrogate MultiElementSurrogate::single(GpcExpansion expansion) {
  Decomposition dec({expansion.element()});
  std::vector<GpcExpansion> v;
  v.push_back(std::move(expansion));
  return MultiElementSurrogate(std::move(dec), std::move(v));
}

double MultiElementSurrogate::evaluate(std::span<const double> z) const {
  return expansions_[decomposition_.locate(z)].evaluate_unchecked(z);
}

PointFunction MultiElementSurrogate::as_function() const {
  return [this](std::span<const double> z) { return evaluate(z); };
}

double eval_me_surrogate(const MultiElementSurrogate& s, std::span<const double> z) { return s.evaluate(z); }

double lp_error(const PointFunction& surrogate, LimitStateModel& model, double p, std::size_t m,
                std::uint64_t seed) {
  if (p < 1.0) throw std::invalid_argument("lp_error: need p >= 1");
  if (m < 1) throw std::invalid_argument("lp_error: need m >= 1");
  const auto samples = sample_uniform(m, model.dimension(), seed);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto z = samples.point(i);
    sum += std::pow(std::abs(model.evaluate(z) - surrogate(z)), p);
  }
  return std::pow(sum / static_cast<double>(m), 1.0 / p);
}

double gamma_bound(double eps_p, double eps, double p) {
  if (!(eps > 0.0)) throw std::invalid_argument("gamma_bound: need eps > 0");
  if (eps_p < 0.0) throw std::invalid_argument("gamma_bound: need eps_p >= 0");
  if (p < 1.0) throw std::invalid_argument("gamma_bound: need p >= 1");
  return eps_p / std::pow(eps, 1.0 / p);
}

}  // namespace mehybrid
