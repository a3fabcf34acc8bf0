#include "mcquad/chains.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mcquad/error.hpp"
#include "mcquad/quadrature.hpp"
#include "mcquad/random.hpp"

namespace mcquad {

ChainKind parse_chain_kind(std::string_view s) {
  if (s == "iid" || s == "iid_uniform") return ChainKind::iid_uniform;
  if (s == "mh" || s == "markov" || s == "mh_uniform_target") return ChainKind::mh_uniform_target;
  if (s == "mixture" || s == "doeblin" || s == "doeblin_mixture") return ChainKind::doeblin_mixture;
  if (s == "smooth" || s == "mh-smooth" || s == "mh_smooth_target")
    return ChainKind::mh_smooth_target;
  throw InvalidArgument("unknown design '" + std::string(s) +
                        "' (expected iid|mh|mixture|smooth)");
}

const char* to_string(ChainKind k) {
  switch (k) {
    case ChainKind::iid_uniform: return "iid";
    case ChainKind::mh_uniform_target: return "mh";
    case ChainKind::doeblin_mixture: return "mixture";
    case ChainKind::mh_smooth_target: return "smooth";
  }
  return "?";
}

void ChainConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidArgument("epsilon must be positive");
  if (!(lambda0 > 0.0 && lambda0 <= 1.0)) throw InvalidArgument("lambda0 must lie in (0, 1]");
  if (!(residual_halfwidth > 0.0)) throw InvalidArgument("residual half-width must be positive");
  if (!(target_sd > 0.0)) throw InvalidArgument("target standard deviation must be positive");
  if (small_set) {
    if (small_set->dim() != domain.dim())
      throw InvalidArgument("small set dimension does not match the domain");
    for (std::size_t j = 0; j < dim(); ++j)
      if (small_set->lower()[j] < domain.lower()[j] || small_set->upper()[j] > domain.upper()[j])
        throw InvalidArgument("small set must lie inside the domain");
  }
}

double reflect_into(double y, double lo, double hi) {
  const double len = hi - lo;
  double t = std::fmod(y - lo, 2.0 * len);
  if (t < 0.0) t += 2.0 * len;
  if (t > len) t = 2.0 * len - t;
  return lo + t;
}

namespace {

class Walker {
 public:
  Walker(const ChainConfig& c) : c_(c), rng_(c.seed), x_(c.dim()), y_(c.dim()) {
    for (std::size_t j = 0; j < x_.size(); ++j)
      x_[j] = 0.5 * (c.domain.lower()[j] + c.domain.upper()[j]);
    if (c.kind == ChainKind::iid_uniform) draw_uniform(x_);
  }

  // Advances one step. Returns {accepted, split_bit}.
  std::pair<bool, bool> step() {
    switch (c_.kind) {
      case ChainKind::iid_uniform:
        draw_uniform(x_);
        return {true, false};
      case ChainKind::mh_uniform_target:
      case ChainKind::mh_smooth_target:
        return {metropolis(), false};
      case ChainKind::doeblin_mixture:
        return {true, mixture()};
    }
    return {false, false};
  }

  const std::vector<double>& state() const { return x_; }

 private:
  void draw_uniform(std::vector<double>& v) {
    for (std::size_t j = 0; j < v.size(); ++j)
      v[j] = rng_.uniform(c_.domain.lower()[j], c_.domain.upper()[j]);
  }

  bool metropolis() {
    for (std::size_t j = 0; j < x_.size(); ++j)
      y_[j] = rng_.uniform(x_[j] - c_.epsilon, x_[j] + c_.epsilon);
    // Always consume the acceptance uniform so the stream layout does not
    // depend on the outcome.
    const double u = rng_.uniform();
    if (!mh_accept(c_, x_, y_, u)) return false;
    x_.swap(y_);
    return true;
  }

  // Split transition: inside A the bit Y ~ Bernoulli(lambda0) selects psi
  // (Y = 1) or the residual kernel (Y = 0); outside A, X' ~ P directly.
  bool mixture() {
    const double u = rng_.uniform();
    const bool in_a = c_.atom_set().contains(x_);
    const bool fresh = u < c_.lambda0;
    if (fresh) {
      draw_uniform(x_);
    } else {
      for (std::size_t j = 0; j < x_.size(); ++j) {
        const double s = rng_.uniform(-c_.residual_halfwidth, c_.residual_halfwidth);
        x_[j] = reflect_into(x_[j] + s, c_.domain.lower()[j], c_.domain.upper()[j]);
      }
    }
    return in_a && fresh;
  }

  const ChainConfig& c_;
  Rng rng_;
  std::vector<double> x_, y_;
};

}  // namespace

bool mh_accept(const ChainConfig& config, std::span<const double> x, std::span<const double> y,
               double u) {
  if (!config.domain.contains(y)) return false;
  if (config.kind != ChainKind::mh_smooth_target) return true;
  double log_ratio = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double zy = (y[j] - config.target_mean) / config.target_sd;
    const double zx = (x[j] - config.target_mean) / config.target_sd;
    log_ratio -= 0.5 * (zy * zy - zx * zx);
  }
  return log_ratio >= 0.0 || u < std::exp(log_ratio);
}

ChainTrace generate(const ChainConfig& config, std::size_t n) {
  config.validate();
  if (n == 0) throw InvalidArgument("chain length must be >= 1");
  Walker walker(config);
  for (std::size_t t = 0; t < config.burn_in; ++t) walker.step();

  const std::size_t d = config.dim();
  std::vector<double> states(n * d);
  ChainTrace trace;
  const bool mh = config.kind == ChainKind::mh_uniform_target ||
                  config.kind == ChainKind::mh_smooth_target;
  if (mh) trace.accepted.resize(n);
  if (config.kind == ChainKind::doeblin_mixture) trace.split_bits.resize(n);

  // State i is recorded, then the step out of it is taken; the split bit of
  // that step belongs to state i.
  std::size_t steps = 0, accepted = 0;
  bool last_accept = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = walker.state();
    std::copy(x.begin(), x.end(), states.begin() + static_cast<std::ptrdiff_t>(i * d));
    if (mh) trace.accepted[i] = last_accept ? 1 : 0;
    if (i + 1 == n && config.kind != ChainKind::doeblin_mixture) break;
    auto [acc, bit] = walker.step();
    if (config.kind == ChainKind::doeblin_mixture) trace.split_bits[i] = bit ? 1 : 0;
    last_accept = acc;
    ++steps;
    if (acc) ++accepted;
  }
  trace.states = Design(std::move(states), d);
  trace.acceptance_rate =
      steps > 0 ? static_cast<double>(accepted) / static_cast<double>(steps) : 1.0;
  return trace;
}

double stationary_density(const ChainConfig& config, std::span<const double> x) {
  if (x.size() != config.dim()) throw InvalidArgument("point dimension does not match chain");
  if (!config.domain.contains(x)) return 0.0;
  if (config.kind != ChainKind::mh_smooth_target) return 1.0 / config.domain.measure();
  constexpr double inv_sqrt2 = 0.7071067811865476;
  auto cdf = [](double z) { return 0.5 * std::erfc(-z * inv_sqrt2); };
  double p = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double m = config.target_mean, s = config.target_sd;
    const double mass = cdf((config.domain.upper()[j] - m) / s) -
                        cdf((config.domain.lower()[j] - m) / s);
    const double z = (x[j] - m) / s;
    p *= std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi) * mass);
  }
  return p;
}

std::vector<std::vector<double>> mixture_bin_transitions(const ChainConfig& config,
                                                         std::size_t bins) {
  if (config.kind != ChainKind::doeblin_mixture || config.dim() != 1)
    throw UnsupportedChain("bin transitions are available for the 1-d mixture chain only");
  if (bins < 1) throw InvalidArgument("need at least one bin");
  const double lo = config.domain.lower()[0], hi = config.domain.upper()[0];
  const double len = hi - lo, w = config.residual_halfwidth;
  const double width = len / static_cast<double>(bins);

  auto overlap = [](double a, double b, double c, double e) {
    return std::max(0.0, std::min(b, e) - std::max(a, c));
  };
  // Mass the reflected uniform step from x puts on [a, b]: the step x + s
  // lands in one of the mirror images of [a, b] on the unfolded line.
  auto residual_mass = [&](double x, double a, double b) {
    double m = 0.0;
    const auto reach = static_cast<long>(std::ceil(w / len)) + 1;
    for (long k = -reach; k <= reach; ++k) {
      const double shift = 2.0 * len * static_cast<double>(k);
      m += overlap(x - w, x + w, lo + shift + (a - lo), lo + shift + (b - lo));
      m += overlap(x - w, x + w, lo + shift - (b - lo), lo + shift - (a - lo));
    }
    return m / (2.0 * w);
  };

  std::vector<std::vector<double>> p(bins, std::vector<double>(bins));
  for (std::size_t i = 0; i < bins; ++i) {
    const double a = lo + width * static_cast<double>(i);
    std::vector<double> cuts;
    for (std::size_t j = 0; j <= bins; ++j)
      for (double sgn : {-1.0, 1.0}) {
        const double e = lo + width * static_cast<double>(j);
        for (double base : {e, 2.0 * lo - e, 2.0 * hi - e}) cuts.push_back(base + sgn * w);
      }
    const auto rule = quad::composite_gauss(a, a + width, 4, cuts, 4);
    for (std::size_t j = 0; j < bins; ++j) {
      const double c = lo + width * static_cast<double>(j);
      const double r = quad::integrate(rule, [&](double x) {
        return residual_mass(x, c, c + width);
      }) / width;
      p[i][j] = config.lambda0 / static_cast<double>(bins) + (1.0 - config.lambda0) * r;
    }
  }
  return p;
}

}  // namespace mcquad
