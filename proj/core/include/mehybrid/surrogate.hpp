#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mehybrid/polybasis.hpp"
#include "mehybrid/randomspace.hpp"

namespace mehybrid {

/// A point function on the reference domain, e.g. a surrogate.
using PointFunction = std::function<double(std::span<const double>)>;

/// The exact limit-state function g(z). Failure is g < 0. Every call through
/// evaluate() is counted; implementations must be deterministic and safe to
/// call concurrently.
class LimitStateModel {
 public:
  explicit LimitStateModel(std::size_t dim) : dim_(dim) {}
  virtual ~LimitStateModel() = default;
  LimitStateModel(const LimitStateModel&) = delete;
  LimitStateModel& operator=(const LimitStateModel&) = delete;

  double evaluate(std::span<const double> z) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return value(z);
  }

  std::uint64_t call_count() const noexcept { return calls_.load(std::memory_order_relaxed); }
  std::size_t dimension() const noexcept { return dim_; }

 protected:
  virtual double value(std::span<const double> z) const = 0;

 private:
  std::size_t dim_;
  std::atomic<std::uint64_t> calls_{0};
};

/// Adapts a plain callable into a counted model.
class FunctionModel final : public LimitStateModel {
 public:
  FunctionModel(std::size_t dim, PointFunction fn) : LimitStateModel(dim), fn_(std::move(fn)) {}

 protected:
  double value(std::span<const double> z) const override { return fn_(z); }

 private:
  PointFunction fn_;
};

/// Element-local gPC expansion sum_i c_i Phi_i(to_local(z)). Coefficients
/// follow the layout of multi_index_set(d, order).
class GpcExpansion {
 public:
  GpcExpansion() = default;
  GpcExpansion(Element element, int order, std::vector<double> coeffs);

  const Element& element() const noexcept { return element_; }
  int order() const noexcept { return order_; }
  std::size_t dimension() const noexcept { return element_.dimension(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }

  /// Coefficient of a multi-index; zero for indices above the order.
  double coeff(const MultiIndex& i) const;

  /// Evaluation at a reference-cube point.
  double evaluate_local(std::span<const double> x) const;

  /// Evaluation at a global point; throws std::invalid_argument when z is
  /// outside the element.
  double evaluate(std::span<const double> z) const;

  /// Same as evaluate() without the membership check.
  double evaluate_unchecked(std::span<const double> z) const;

 private:
  Element element_;
  int order_ = 0;
  std::vector<double> coeffs_;
  std::vector<MultiIndex> indices_;
  std::vector<int> flat_;  // indices_ flattened row-major
};

/// Pseudo-spectral projection of a plain function onto the order-N basis of
/// e using a q^d tensor Gauss grid. No call accounting.
GpcExpansion project(const PointFunction& f, const Element& e, int N, int q);

/// Pseudo-spectral collocation of the exact model: exactly q^d counted
/// evaluations. Requires q >= N+1.
GpcExpansion build_collocation(LimitStateModel& model, const Element& e, int N, int q);

double eval_expansion(const GpcExpansion& exp, std::span<const double> z);

/// Sum of squared coefficients above the constant mode.
double local_variance(const GpcExpansion& exp);

/// Piecewise expansion over a decomposition.
class MultiElementSurrogate {
 public:
  MultiElementSurrogate() = default;
  MultiElementSurrogate(Decomposition decomposition, std::vector<GpcExpansion> expansions);

  /// Wraps one expansion as a single-element surrogate over its element.
  /// The element must be the full domain.
  static MultiElementSurrogate single(GpcExpansion expansion);

  const Decomposition& decomposition() const noexcept { return decomposition_; }
  const std::vector<GpcExpansion>& expansions() const noexcept { return expansions_; }
  std::size_t size() const noexcept { return expansions_.size(); }
  std::size_t dimension() const noexcept { return decomposition_.dimension(); }

  double evaluate(std::span<const double> z) const;
  double evaluate_in(std::size_t k, std::span<const double> z) const {
    return expansions_[k].evaluate_unchecked(z);
  }
  std::size_t locate(std::span<const double> z) const { return decomposition_.locate(z); }

  PointFunction as_function() const;

 private:
  Decomposition decomposition_;
  std::vector<GpcExpansion> expansions_;
};

double eval_me_surrogate(const MultiElementSurrogate& s, std::span<const double> z);

/// Monte Carlo estimate of ||g - surrogate||_{L^p} on m fresh points drawn
/// from `seed`. Costs m counted model calls.
double lp_error(const PointFunction& surrogate, LimitStateModel& model, double p, std::size_t m,
                std::uint64_t seed);

/// Smallest admissible hybrid threshold eps_p / eps^(1/p).
double gamma_bound(double eps_p, double eps, double p);

}  // namespace mehybrid
