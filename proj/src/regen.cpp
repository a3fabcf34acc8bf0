#include "mcquad/regen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcquad/error.hpp"
#include "mcquad/quadrature.hpp"

namespace mcquad::regen {

std::vector<Block> SplitTrace::blocks() const {
  std::vector<Block> out;
  for (std::size_t k = 0; k + 1 < regeneration_times.size(); ++k)
    out.push_back({regeneration_times[k] + 1, regeneration_times[k + 1] + 1});
  return out;
}

SplitTrace split_simulate(const ChainConfig& config, std::size_t n) {
  if (config.kind != ChainKind::doeblin_mixture)
    throw UnsupportedChain(std::string("chain '") + to_string(config.kind) +
                           "' has no explicit minorization (A, lambda0, psi)");
  ChainTrace raw = generate(config, n);
  SplitTrace trace{config, std::move(raw.states), std::move(raw.split_bits), {}};
  for (std::size_t i = 0; i < trace.bits.size(); ++i)
    if (trace.bits[i]) trace.regeneration_times.push_back(i);
  return trace;
}

TestFunction parse_test_function(std::string_view s) {
  if (s == "one") return TestFunction::one;
  if (s == "half" || s == "lower_half") return TestFunction::lower_half;
  if (s == "x" || s == "identity") return TestFunction::identity;
  throw InvalidArgument("unknown test function '" + std::string(s) + "' (expected one|half|x)");
}

const char* to_string(TestFunction g) {
  switch (g) {
    case TestFunction::one: return "one";
    case TestFunction::lower_half: return "half";
    case TestFunction::identity: return "x";
  }
  return "?";
}

double apply(TestFunction g, std::span<const double> x) {
  switch (g) {
    case TestFunction::one: return 1.0;
    case TestFunction::lower_half: return x[0] >= 0.0 && x[0] <= 0.5 ? 1.0 : 0.0;
    case TestFunction::identity: return x[0];
  }
  return 0.0;
}

double stationary_expectation(const ChainConfig& config, TestFunction g) {
  // Every supported target is a product over coordinates, and g only reads
  // the first one: integrate pi's first marginal against g.
  const double lo = config.domain.lower()[0], hi = config.domain.upper()[0];
  const auto rule = quad::composite_gauss(lo, hi, 256, {0.0, 0.5}, 8);
  const ChainConfig marginal = [&] {
    ChainConfig c = config;
    c.domain = Domain({lo}, {hi});
    c.small_set.reset();
    return c;
  }();
  return quad::integrate(rule, [&](double x) {
    const double pt[1] = {x};
    return apply(g, pt) * stationary_density(marginal, pt);
  });
}

KacReport kac_check(const SplitTrace& trace, TestFunction g, std::size_t min_blocks) {
  const auto blocks = trace.blocks();
  if (blocks.size() < min_blocks)
    throw InsufficientBlocks("Kac check needs at least " + std::to_string(min_blocks) +
                             " complete blocks, got " + std::to_string(blocks.size()));
  KacReport r;
  r.blocks = blocks.size();
  double sum = 0.0, length = 0.0;
  for (const auto& b : blocks) {
    for (std::size_t i = b.begin; i < b.end; ++i) sum += apply(g, trace.states.row(i));
    length += static_cast<double>(b.length());
  }
  const double nb = static_cast<double>(blocks.size());
  r.lhs = sum / nb;
  r.alpha0_hat = length / nb;
  r.rhs = r.alpha0_hat * stationary_expectation(trace.config, g);
  r.rel_err = r.rhs != 0.0 ? std::abs(r.lhs / r.rhs - 1.0) : std::abs(r.lhs);
  return r;
}

MomentReport return_time_moments(const SplitTrace& trace, double p) {
  if (!(p >= 1.0 && p <= 6.0)) throw InvalidArgument("moment order p must lie in [1, 6]");
  MomentReport r;
  r.p = p;
  const auto blocks = trace.blocks();
  double acc = 0.0;
  for (const auto& b : blocks) acc += std::pow(static_cast<double>(b.length()), p);
  r.theta_moment = blocks.empty() ? 0.0 : acc / static_cast<double>(blocks.size());

  const Domain& a = trace.config.atom_set();
  std::size_t last = trace.states.size(), count = 0;
  double tau = 0.0;
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    if (!a.contains(trace.states.row(i))) continue;
    if (last < i) {
      tau += std::pow(static_cast<double>(i - last), p);
      ++count;
    }
    last = i;
  }
  r.xi_hat = count ? tau / static_cast<double>(count) : 0.0;
  const double l = trace.config.lambda0;
  const double e = std::exp(l / p);
  r.bound = e / (l * (e - 1.0)) * std::pow(r.xi_hat, 1.0 / p);
  r.bound_holds = std::pow(r.theta_moment, 1.0 / p) <= r.bound;
  return r;
}

namespace {

double lag1_correlation(const std::vector<double>& v) {
  const std::size_t m = v.size();
  if (m < 3) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(m);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    den += (v[k] - mean) * (v[k] - mean);
    if (k + 1 < m) num += (v[k] - mean) * (v[k + 1] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

IndependenceReport block_independence_check(const Design& states,
                                            const std::vector<Block>& blocks,
                                            std::size_t min_blocks) {
  if (blocks.size() < min_blocks)
    throw InsufficientBlocks("independence check needs at least " + std::to_string(min_blocks) +
                             " blocks, got " + std::to_string(blocks.size()));
  std::vector<double> sums, lengths;
  sums.reserve(blocks.size());
  lengths.reserve(blocks.size());
  for (const auto& b : blocks) {
    double s = 0.0;
    for (std::size_t i = b.begin; i < b.end; ++i) s += states.row(i)[0];
    sums.push_back(s);
    lengths.push_back(static_cast<double>(b.length()));
  }
  IndependenceReport r;
  r.blocks = blocks.size();
  r.sum_correlation = lag1_correlation(sums);
  r.length_correlation = lag1_correlation(lengths);
  r.band = 3.0 / std::sqrt(static_cast<double>(blocks.size()));
  r.independent = std::abs(r.sum_correlation) <= r.band && std::abs(r.length_correlation) <= r.band;
  return r;
}

IndependenceReport block_independence_check(const SplitTrace& trace, std::size_t min_blocks) {
  return block_independence_check(trace.states, trace.blocks(), min_blocks);
}

std::vector<Block> fixed_length_blocks(std::size_t n, std::size_t length) {
  if (length == 0) throw InvalidArgument("block length must be >= 1");
  std::vector<Block> out;
  for (std::size_t s = 0; s + length <= n; s += length) out.push_back({s, s + length});
  return out;
}

Design subsample(const Design& states, std::size_t m0, std::size_t offset) {
  if (m0 == 0) throw InvalidArgument("sub-sampling step must be >= 1");
  if (offset >= states.size()) throw InvalidArgument("sub-sampling offset beyond the trace");
  std::vector<std::size_t> idx;
  for (std::size_t i = offset; i < states.size(); i += m0) idx.push_back(i);
  return states.subset(idx);
}

Design post_regeneration_states(const SplitTrace& trace) {
  std::vector<std::size_t> idx;
  for (std::size_t t : trace.regeneration_times)
    if (t + 1 < trace.states.size()) idx.push_back(t + 1);
  if (idx.empty()) throw InsufficientBlocks("no regeneration followed by a recorded state");
  return trace.states.subset(idx);
}

std::vector<std::vector<std::size_t>> bin_transition_counts(const Design& states, double lo,
                                                            double hi, std::size_t bins) {
  if (!(hi > lo) || bins == 0) throw InvalidArgument("invalid binning");
  auto bin_of = [&](double x) {
    auto b = static_cast<long>(std::floor((x - lo) / (hi - lo) * static_cast<double>(bins)));
    return static_cast<std::size_t>(std::clamp<long>(b, 0, static_cast<long>(bins) - 1));
  };
  std::vector<std::vector<std::size_t>> counts(bins, std::vector<std::size_t>(bins, 0));
  for (std::size_t t = 0; t + 1 < states.size(); ++t)
    ++counts[bin_of(states.row(t)[0])][bin_of(states.row(t + 1)[0])];
  return counts;
}

}  // namespace mcquad::regen
