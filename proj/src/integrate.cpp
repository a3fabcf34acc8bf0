#include "mcquad/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcquad/error.hpp"

namespace mcquad {

void LabeledSample::validate() const {
  if (values.size() != design.size())
    throw InvalidArgument("sample has " + std::to_string(values.size()) + " values for " +
                          std::to_string(design.size()) + " design points");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("sample contains a non-finite value");
  if (known_density) {
    if (known_density->size() != design.size())
      throw InvalidArgument("known density length does not match the design");
    for (double v : *known_density)
      if (!std::isfinite(v)) throw InvalidArgument("known density contains a non-finite value");
  }
}

const char* to_string(Method m) {
  switch (m) {
    case Method::ks: return "ks";
    case Method::ks_corrected: return "ksc";
    case Method::mc: return "mc";
    case Method::ks_boundary: return "ks-boundary";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "ks") return Method::ks;
  if (s == "ksc") return Method::ks_corrected;
  if (s == "mc") return Method::mc;
  if (s == "ks-boundary") return Method::ks_boundary;
  throw InvalidArgument("unknown method '" + std::string(s) +
                        "' (expected ks|ksc|mc|ks-boundary)");
}

DesignWeights::DesignWeights(const Design& design, const KernelSpec& kernel, const Bandwidth& h,
                             const EstimateOptions& options)
    : bandwidth_(h), dim_(design.dim()), floor_(options.density_floor) {
  if (design.size() < 2) throw InsufficientSample("kernel estimators need n >= 2");
  if (!(floor_ > 0.0)) throw InvalidArgument("density floor must be positive");
  const DensityField field(design, kernel, h, options.density);
  has_variance_ = options.with_variance;
  const std::size_t n = design.size();
  variance_.assign(n, 0.0);
  if (has_variance_) {
    const auto dv = field.at_points_with_variance();
    density_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      density_[i] = dv[i].density;
      variance_[i] = dv[i].variance;
    }
  } else {
    density_ = field.at_points();
  }
  clamped_density_.resize(n);
  min_density_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    min_density_ = std::min(min_density_, density_[i]);
    clamped_density_[i] = density_[i];
    if (density_[i] < floor_) {
      clamped_density_[i] = floor_;
      ++clamped_;
    }
  }
  if (clamped_ == n)
    throw DegenerateDensity("all " + std::to_string(n) +
                            " design-point densities fell below the floor");
}

EstimateReport DesignWeights::base_report(Method m) const {
  EstimateReport r;
  r.method = m;
  r.bandwidth = bandwidth_;
  r.n = density_.size();
  r.d = dim_;
  r.min_density = min_density_;
  r.clamped = clamped_;
  if (clamped_ > 0)
    r.warnings.push_back(std::to_string(clamped_) + " of " + std::to_string(r.n) +
                         " density values were below the floor and clamped");
  if (bandwidth_.fallback) r.warnings.push_back(bandwidth_.warning);
  return r;
}

EstimateReport DesignWeights::restricted(std::span<const double> values,
                                         std::span<const std::uint8_t> include,
                                         bool corrected) const {
  if (values.size() != density_.size())
    throw InvalidArgument("value count does not match the design");
  if (!include.empty() && include.size() != density_.size())
    throw InvalidArgument("inclusion mask length does not match the design");
  if (corrected && !has_variance_)
    throw InvalidState("corrected estimator needs the variance pass");
  EstimateReport r = base_report(corrected ? Method::ks_corrected : Method::ks);
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!include.empty() && !include[i]) continue;
    const double p = clamped_density_[i];
    double term = values[i] / p;
    if (corrected) {
      const double factor = 1.0 - variance_[i] / (p * p);
      if (factor < 0.0) ++r.negative_factors;
      term *= factor;
    }
    s += term;
  }
  if (r.negative_factors > 0)
    r.warnings.push_back(std::to_string(r.negative_factors) +
                         " correction factors were negative");
  r.estimate = s / static_cast<double>(values.size());
  return r;
}

EstimateReport DesignWeights::ks(std::span<const double> values) const {
  return restricted(values, {}, false);
}

EstimateReport DesignWeights::ks_corrected(std::span<const double> values) const {
  return restricted(values, {}, true);
}

EstimateReport estimate_ks(const LabeledSample& sample, const KernelSpec& kernel,
                           const Bandwidth& h, const EstimateOptions& options) {
  sample.validate();
  return DesignWeights(sample.design, kernel, h, options).ks(sample.values);
}

EstimateReport estimate_ks_corrected(const LabeledSample& sample, const KernelSpec& kernel,
                                     const Bandwidth& h, const EstimateOptions& options) {
  sample.validate();
  return DesignWeights(sample.design, kernel, h, options).ks_corrected(sample.values);
}

EstimateReport estimate_mc(const LabeledSample& sample) {
  sample.validate();
  if (!sample.known_density) throw InvalidArgument("Monte Carlo estimate needs known pi values");
  const auto& pi = *sample.known_density;
  double s = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (!(pi[i] > 0.0)) throw InvalidArgument("known pi values must be strictly positive");
    s += sample.values[i] / pi[i];
  }
  EstimateReport r;
  r.method = Method::mc;
  r.n = sample.design.size();
  r.d = sample.design.dim();
  r.estimate = s / static_cast<double>(r.n);
  r.min_density = *std::min_element(pi.begin(), pi.end());
  return r;
}

EstimateReport estimate_ks_boundary(const LabeledSample& sample, const KernelSpec& kernel,
                                    const Bandwidth& h, const Domain& domain,
                                    const EstimateOptions& options) {
  sample.validate();
  if (domain.dim() != sample.design.dim())
    throw InvalidArgument("domain dimension does not match the design");
  const std::size_t n = sample.design.size();
  std::size_t inside = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (domain.contains(sample.design.row(i))) ++inside;
  if (inside == 0) throw EmptyNumerator("no design point lies inside Q");
  std::vector<std::uint8_t> include(n);
  for (std::size_t i = 0; i < n; ++i) include[i] = domain.contains(sample.design.row(i)) ? 1 : 0;
  EstimateOptions opts = options;
  opts.with_variance = false;
  EstimateReport r = DesignWeights(sample.design, kernel, h, opts).restricted(sample.values, include, false);
  r.method = Method::ks_boundary;
  return r;
}

double average_over(const EstimateReport& report, const Domain& domain) {
  return report.estimate / domain.measure();
}

}  // namespace mcquad
