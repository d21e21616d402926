#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mehybrid {

/// Half-open box prod [lower_d, upper_d) inside the reference domain
/// [-1,1]^d, together with its probability mass under the uniform density.
/// A face lying on the domain boundary +1 is treated as closed.
struct Element {
  std::vector<double> lower;
  std::vector<double> upper;
  double prob = 0.0;

  std::size_t dimension() const noexcept { return lower.size(); }
  bool contains(std::span<const double> z) const;
  double width(std::size_t d) const { return upper[d] - lower[d]; }
};

/// Builds an element and fills in its probability. Throws on a degenerate
/// or out-of-domain box.
Element make_element(std::vector<double> lower, std::vector<double> upper);

/// The full domain [-1,1]^d.
Element unit_element(std::size_t d);

/// prod (b_d - a_d)/2.
double element_probability(const Element& e);

/// Affine map from the element to the reference cube [-1,1]^d.
std::vector<double> to_local(const Element& e, std::span<const double> z);
/// Inverse of to_local.
std::vector<double> to_global(const Element& e, std::span<const double> x);

// Unchecked in-place variants for hot loops.
void to_local_unchecked(const Element& e, std::span<const double> z, std::span<double> x);
void to_global_unchecked(const Element& e, std::span<const double> x, std::span<double> z);

/// Bisects e along every dimension in dims; 2^|dims| children ordered with
/// the first listed dimension varying slowest.
std::vector<Element> split_element(const Element& e, std::span<const std::size_t> dims);

/// Ordered, pairwise-disjoint covering of [-1,1]^d by elements.
class Decomposition {
 public:
  Decomposition() = default;
  explicit Decomposition(std::vector<Element> elements);

  static Decomposition unit(std::size_t d);

  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  std::size_t dimension() const noexcept { return elements_.empty() ? 0 : elements_.front().dimension(); }
  const Element& operator[](std::size_t k) const { return elements_[k]; }
  const std::vector<Element>& elements() const noexcept { return elements_; }

  /// Index of the unique element containing z. Throws std::domain_error
  /// when z lies outside [-1,1]^d (or in a hole of a corrupted mesh).
  std::size_t locate(std::span<const double> z) const;

  /// Replaces element k by its children, keeping them contiguous at k.
  void replace(std::size_t k, std::vector<Element> children);

  double total_probability() const;

  /// Checks probabilities, bounds and pairwise disjointness. Returns an
  /// empty string when the mesh is legal, otherwise a description naming the
  /// offending element ids.
  std::string check() const;

 private:
  std::vector<Element> elements_;
};

/// m points stored row-major, generated from a seed.
struct SampleSet {
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> data;

  std::size_t size() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> point(std::size_t i) const { return std::span(data).subspan(i * dim, dim); }
};

/// Points per generator chunk. Chunk c uses the Philox key seed ^ c, so any
/// chunk can be regenerated independently.
inline constexpr std::size_t kSampleChunk = 1u << 16;

/// m i.i.d. uniform points on (-1,1)^d from Philox4x32-10.
SampleSet sample_uniform(std::size_t m, std::size_t d, std::uint64_t seed);

}  // namespace mehybrid
