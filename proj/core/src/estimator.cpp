#include "mehybrid/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mehybrid {

namespace {

// Exact values for the samples listed in `which`, written to out[k].
void evaluate_exact(LimitStateModel& model, const SampleSet& samples, std::span<const std::size_t> which,
                    std::span<double> out, Parallelism par) {
  const std::size_t n = which.size();
  const unsigned threads = std::max(1u, par.threads);
  if (threads == 1 || n < 2 * threads) {
    for (std::size_t k = 0; k < n; ++k) out[k] = model.evaluate(samples.point(which[k]));
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t k = lo; k < hi; ++k) out[k] = model.evaluate(samples.point(which[k]));
    });
  }
}

struct RunState {
  std::uint64_t m = 0;
  std::int64_t failures = 0;  // global count
  std::uint64_t exact = 0;
  std::vector<Verdict> verdicts;
  HybridTrace trace;
};

// The iterative replacement loop over one group of samples (all samples for
// the global algorithm, one element's samples for the local one).
void replace_loop(LimitStateModel& model, const SampleSet& samples, std::vector<std::size_t> group,
                  const std::vector<double>& svals, const HybridConfig& cfg, Parallelism par, long element,
                  RunState& st) {
  std::stable_sort(group.begin(), group.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(svals[a]) < std::abs(svals[b]); });
  std::int64_t local = 0;
  for (auto i : group) local += svals[i] < 0.0 ? 1 : 0;

  const std::size_t n = group.size();
  std::size_t pos = 0;
  std::size_t iteration = 0;
  std::vector<double> g;
  const double m = static_cast<double>(st.m);
  while (pos < n) {
    std::size_t end = std::min(n, pos + cfg.delta_m);
    if (cfg.max_exact) {
      if (st.exact >= *cfg.max_exact) break;
      end = std::min<std::size_t>(end, pos + (*cfg.max_exact - st.exact));
    }
    ++iteration;
    const std::span<const std::size_t> block(group.data() + pos, end - pos);
    g.resize(block.size());
    evaluate_exact(model, samples, block, g, par);
    std::int64_t delta = 0;
    for (std::size_t k = 0; k < block.size(); ++k) {
      const std::size_t i = block[k];
      const bool exact_fail = g[k] < 0.0;
      delta += (exact_fail ? 1 : 0) - (svals[i] < 0.0 ? 1 : 0);
      st.verdicts[i] = exact_fail ? Verdict::exact_fail : Verdict::exact_safe;
    }
    st.failures += delta;
    local += delta;
    st.exact += block.size();
    pos = end;
    const double estimate = static_cast<double>(element < 0 ? st.failures : local) / m;
    st.trace.records.push_back({iteration, estimate, st.exact, element});
    if (std::abs(static_cast<double>(delta)) <= cfg.eta_stop * m) break;
  }
}

std::vector<double> surrogate_values(const PointFunction& surrogate, const SampleSet& samples) {
  std::vector<double> s(samples.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = surrogate(samples.point(i));
  return s;
}

RunState initial_state(const std::vector<double>& svals) {
  RunState st;
  st.m = svals.size();
  st.verdicts.resize(svals.size());
  for (std::size_t i = 0; i < svals.size(); ++i) {
    const bool fail = svals[i] < 0.0;
    st.failures += fail ? 1 : 0;
    st.verdicts[i] = fail ? Verdict::surrogate_fail : Verdict::surrogate_safe;
  }
  return st;
}

HybridResult finish(RunState&& st) {
  HybridResult r;
  r.estimate.m = st.m;
  r.estimate.failures = static_cast<std::uint64_t>(st.failures);
  r.estimate.p_f = static_cast<double>(st.failures) / static_cast<double>(st.m);
  r.estimate.n_exact = st.exact;
  r.estimate.n_surrogate = st.m;
  r.estimate.stddev = mc_stddev(r.estimate.p_f, st.m);
  r.trace = std::move(st.trace);
  r.verdicts = std::move(st.verdicts);
  return r;
}

}  // namespace

void HybridConfig::validate(std::size_t m) const {
  if (delta_m < 1 || delta_m > m) throw std::invalid_argument("hybrid: delta_m must satisfy 1 <= delta_m <= m");
  if (!(eta_stop >= 0.0)) throw std::invalid_argument("hybrid: eta_stop must be >= 0");
}

std::uint64_t HybridResult::recount() const {
  return static_cast<std::uint64_t>(std::count_if(verdicts.begin(), verdicts.end(), [](Verdict v) {
    return v == Verdict::surrogate_fail || v == Verdict::exact_fail;
  }));
}

double mc_stddev(double p, std::uint64_t m) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mc_stddev: p must lie in [0,1]");
  if (m < 1) throw std::invalid_argument("mc_stddev: need m >= 1");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(m));
}

Estimate mc_estimate(LimitStateModel& model, const SampleSet& samples, Parallelism par) {
  const std::size_t m = samples.size();
  if (m == 0) throw std::invalid_argument("mc_estimate: empty sample set");
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> g(m);
  evaluate_exact(model, samples, all, g, par);
  Estimate e;
  e.m = m;
  e.failures = static_cast<std::uint64_t>(std::count_if(g.begin(), g.end(), [](double v) { return v < 0.0; }));
  e.p_f = static_cast<double>(e.failures) / static_cast<double>(m);
  e.n_exact = m;
  e.stddev = mc_stddev(e.p_f, m);
  return e;
}

Estimate direct_hybrid(LimitStateModel& model, const PointFunction& surrogate, const SampleSet& samples,
                       double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("direct_hybrid: gamma must be >= 0");
  const std::size_t m = samples.size();
  if (m == 0) throw std::invalid_argument("direct_hybrid: empty sample set");
  Estimate e;
  e.m = m;
  for (std::size_t i = 0; i < m; ++i) {
    const auto z = samples.point(i);
    const double s = surrogate(z);
    ++e.n_surrogate;
    if (s < -gamma) {
      ++e.failures;
    } else if (std::abs(s) <= gamma) {
      ++e.n_exact;
      if (model.evaluate(z) < 0.0) ++e.failures;
    }
  }
  e.p_f = static_cast<double>(e.failures) / static_cast<double>(m);
  e.stddev = mc_stddev(e.p_f, m);
  return e;
}

HybridResult iterative_hybrid(LimitStateModel& model, const PointFunction& surrogate, const SampleSet& samples,
                              const HybridConfig& cfg, Parallelism par) {
  cfg.validate(samples.size());
  const auto svals = surrogate_values(surrogate, samples);
  RunState st = initial_state(svals);
  std::vector<std::size_t> all(svals.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  replace_loop(model, samples, std::move(all), svals, cfg, par, -1, st);
  return finish(std::move(st));
}

HybridResult me_gha(LimitStateModel& model, const MultiElementSurrogate& surrogate, const SampleSet& samples,
                    const HybridConfig& cfg, Parallelism par) {
  return iterative_hybrid(model, surrogate.as_function(), samples, cfg, par);
}

HybridResult me_lha(LimitStateModel& model, const MultiElementSurrogate& surrogate, const SampleSet& samples,
                    const HybridConfig& cfg, Parallelism par, const std::vector<std::size_t>& element_order) {
  cfg.validate(samples.size());
  const std::size_t m = samples.size();
  const std::size_t M = surrogate.size();
  std::vector<std::vector<std::size_t>> groups(M);
  std::vector<double> svals(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto z = samples.point(i);
    const std::size_t k = surrogate.locate(z);
    groups[k].push_back(i);
    svals[i] = surrogate.evaluate_in(k, z);
  }
  RunState st = initial_state(svals);

  std::vector<std::size_t> order = element_order;
  if (order.empty()) {
    order.resize(M);
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k)
      if (sorted[k] != k || sorted.size() != M)
        throw std::invalid_argument("me_lha: element_order must be a permutation of the elements");
  }
  for (std::size_t k : order) {
    if (groups[k].empty()) continue;
    replace_loop(model, samples, std::move(groups[k]), svals, cfg, par, static_cast<long>(k), st);
  }
  return finish(std::move(st));
}

double relative_error(double p_hat, double p_ref) {
  if (!(p_ref > 0.0)) throw std::invalid_argument("relative_error: reference must be > 0");
  return std::abs(p_hat - p_ref) / p_ref;
}

std::string trace_csv(const HybridTrace& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,estimate,n_exact,element\n";
  for (const auto& r : trace.records)
    os << r.iteration << ',' << r.estimate << ',' << r.n_exact << ',' << r.element << '\n';
  return os.str();
}

}  // namespace mehybrid
