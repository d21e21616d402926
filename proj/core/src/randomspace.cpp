#include "mehybrid/randomspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mehybrid/rng.hpp"

namespace mehybrid {

bool Element::contains(std::span<const double> z) const {
  if (z.size() != lower.size()) return false;
  for (std::size_t d = 0; d < z.size(); ++d) {
    if (z[d] < lower[d]) return false;
    if (z[d] >= upper[d] && !(z[d] == upper[d] && upper[d] == 1.0)) return false;
  }
  return true;
}

double element_probability(const Element& e) {
  if (e.lower.empty() || e.lower.size() != e.upper.size())
    throw std::invalid_argument("element_probability: malformed bounds");
  double p = 1.0;
  for (std::size_t d = 0; d < e.lower.size(); ++d) {
    const double w = e.upper[d] - e.lower[d];
    if (!(w > 0.0)) throw std::invalid_argument("element_probability: degenerate box");
    p *= w / 2.0;
  }
  return p;
}

Element make_element(std::vector<double> lower, std::vector<double> upper) {
  Element e{std::move(lower), std::move(upper), 0.0};
  for (std::size_t d = 0; d < e.lower.size() && d < e.upper.size(); ++d)
    if (e.lower[d] < -1.0 || e.upper[d] > 1.0)
      throw std::invalid_argument("make_element: box leaves [-1,1]^d");
  e.prob = element_probability(e);
  return e;
}

Element unit_element(std::size_t d) {
  return make_element(std::vector<double>(d, -1.0), std::vector<double>(d, 1.0));
}

void to_local_unchecked(const Element& e, std::span<const double> z, std::span<double> x) {
  for (std::size_t d = 0; d < z.size(); ++d)
    x[d] = (2.0 * z[d] - e.lower[d] - e.upper[d]) / (e.upper[d] - e.lower[d]);
}

void to_global_unchecked(const Element& e, std::span<const double> x, std::span<double> z) {
  for (std::size_t d = 0; d < x.size(); ++d)
    z[d] = e.lower[d] + 0.5 * (x[d] + 1.0) * (e.upper[d] - e.lower[d]);
}

std::vector<double> to_local(const Element& e, std::span<const double> z) {
  if (!e.contains(z)) throw std::invalid_argument("to_local: point outside element");
  std::vector<double> x(z.size());
  to_local_unchecked(e, z, x);
  return x;
}

std::vector<double> to_global(const Element& e, std::span<const double> x) {
  if (x.size() != e.dimension()) throw std::invalid_argument("to_global: dimension mismatch");
  for (double v : x)
    if (v < -1.0 || v > 1.0) throw std::invalid_argument("to_global: point outside [-1,1]^d");
  std::vector<double> z(x.size());
  to_global_unchecked(e, x, z);
  return z;
}

std::vector<Element> split_element(const Element& e, std::span<const std::size_t> dims) {
  if (dims.empty()) throw std::invalid_argument("split_element: no dimensions to split");
  for (std::size_t d : dims)
    if (d >= e.dimension()) throw std::invalid_argument("split_element: dimension out of range");
  const std::size_t n = dims.size();
  std::vector<Element> children;
  children.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Element c = e;
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t d = dims[b];
      const double mid = 0.5 * (e.lower[d] + e.upper[d]);
      // First listed dimension is the most significant bit.
      if ((mask >> (n - 1 - b)) & 1u)
        c.lower[d] = mid;
      else
        c.upper[d] = mid;
    }
    c.prob = element_probability(c);
    children.push_back(std::move(c));
  }
  return children;
}

Decomposition::Decomposition(std::vector<Element> elements) : elements_(std::move(elements)) {}

Decomposition Decomposition::unit(std::size_t d) { return Decomposition({unit_element(d)}); }

std::size_t Decomposition::locate(std::span<const double> z) const {
  for (double v : z)
    if (!(v >= -1.0 && v <= 1.0)) throw std::domain_error("locate: point outside [-1,1]^d");
  for (std::size_t k = 0; k < elements_.size(); ++k)
    if (elements_[k].contains(z)) return k;
  throw std::domain_error("locate: point not covered by the decomposition");
}

void Decomposition::replace(std::size_t k, std::vector<Element> children) {
  if (k >= elements_.size()) throw std::out_of_range("Decomposition::replace");
  elements_.erase(elements_.begin() + static_cast<std::ptrdiff_t>(k));
  elements_.insert(elements_.begin() + static_cast<std::ptrdiff_t>(k), children.begin(), children.end());
}

double Decomposition::total_probability() const {
  double s = 0.0;
  for (const auto& e : elements_) s += e.prob;
  return s;
}

std::string Decomposition::check() const {
  std::ostringstream err;
  if (elements_.empty()) return "decomposition is empty";
  const std::size_t d = dimension();
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const auto& e = elements_[k];
    if (e.lower.size() != d || e.upper.size() != d) {
      err << "element " << k << ": dimension mismatch; ";
      continue;
    }
    double expected = 1.0;
    bool ok = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (!(e.lower[i] < e.upper[i]) || e.lower[i] < -1.0 || e.upper[i] > 1.0) ok = false;
      expected *= (e.upper[i] - e.lower[i]) / 2.0;
    }
    if (!ok) err << "element " << k << ": invalid bounds; ";
    if (!(e.prob > 0.0) || std::abs(e.prob - expected) > 1e-12)
      err << "element " << k << ": probability " << e.prob << " does not match its box; ";
  }
  for (std::size_t a = 0; a < elements_.size(); ++a)
    for (std::size_t b = a + 1; b < elements_.size(); ++b) {
      const auto& ea = elements_[a];
      const auto& eb = elements_[b];
      if (ea.lower.size() != d || eb.lower.size() != d) continue;
      bool overlap = true;
      for (std::size_t i = 0; i < d && overlap; ++i)
        overlap = std::max(ea.lower[i], eb.lower[i]) < std::min(ea.upper[i], eb.upper[i]);
      if (overlap) err << "elements " << a << " and " << b << " overlap; ";
    }
  const double total = total_probability();
  if (std::abs(total - 1.0) > 1e-12) err << "probabilities sum to " << total << " instead of 1; ";
  return err.str();
}

SampleSet sample_uniform(std::size_t m, std::size_t d, std::uint64_t seed) {
  if (m < 1 || d < 1) throw std::invalid_argument("sample_uniform: need m >= 1 and d >= 1");
  SampleSet s;
  s.dim = d;
  s.seed = seed;
  s.data.resize(m * d);
  const std::size_t values_per_chunk = kSampleChunk * d;
  const std::size_t n_chunks = (m + kSampleChunk - 1) / kSampleChunk;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const Philox4x32 gen(seed ^ static_cast<std::uint64_t>(c));
    const std::size_t begin = c * values_per_chunk;
    const std::size_t end = std::min(s.data.size(), begin + values_per_chunk);
    for (std::size_t v = begin; v < end; v += 2) {
      const auto pair = gen.symmetric_pair((v - begin) / 2);
      s.data[v] = pair[0];
      if (v + 1 < end) s.data[v + 1] = pair[1];
    }
  }
  return s;
}

}  // namespace mehybrid
