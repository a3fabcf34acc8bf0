#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcquad/density.hpp"
#include "mcquad/kernels.hpp"
#include "mcquad/types.hpp"

namespace mcquad {

// Design points with the observed values phi(X_i) and, for simulation
// baselines only, the true design density pi(X_i).
struct LabeledSample {
  Design design;
  std::vector<double> values;
  std::optional<std::vector<double>> known_density;

  // Throws InvalidArgument on length mismatches or non-finite values.
  void validate() const;
};

enum class Method { ks, ks_corrected, mc, ks_boundary };

const char* to_string(Method m);
Method parse_method(std::string_view s);

struct EstimateOptions {
  // Density values below this floor (including negative ones from order-4
  // kernels) are replaced by it and counted.
  double density_floor = 1e-12;
  DensityOptions density;
  // Skip v_hat when only the plain estimator is needed.
  bool with_variance = true;
};

struct EstimateReport {
  double estimate = 0.0;
  Method method = Method::ks;
  Bandwidth bandwidth;
  std::size_t n = 0;
  std::size_t d = 0;
  double min_density = 0.0;         // min over design points of the raw pi_hat
  std::size_t clamped = 0;          // denominators raised to the floor
  std::size_t negative_factors = 0; // corrected estimator: 1 - v/pi^2 < 0
  std::vector<std::string> warnings;
};

// Density and variance estimates at the design points, computed once and
// reusable across several value vectors observed on the same design.
class DesignWeights {
 public:
  DesignWeights(const Design& design, const KernelSpec& kernel, const Bandwidth& h,
                const EstimateOptions& options = {});

  std::size_t size() const noexcept { return density_.size(); }
  const Bandwidth& bandwidth() const noexcept { return bandwidth_; }
  std::span<const double> density() const noexcept { return density_; }
  std::span<const double> variance() const noexcept { return variance_; }

  // n^-1 sum phi_i / pi_hat_i.
  EstimateReport ks(std::span<const double> values) const;
  // n^-1 sum phi_i / pi_hat_i * (1 - v_hat_i / pi_hat_i^2).
  EstimateReport ks_corrected(std::span<const double> values) const;
  // Either sum restricted to indices with include[i] != 0; the divisor stays
  // n. This is the boundary-stabilized form when the design covers Q~ and
  // include marks the points in Q.
  EstimateReport restricted(std::span<const double> values,
                            std::span<const std::uint8_t> include, bool corrected) const;

 private:
  EstimateReport base_report(Method m) const;

  Bandwidth bandwidth_;
  std::size_t dim_;
  double floor_;
  std::vector<double> density_, variance_;
  std::vector<double> clamped_density_;
  std::size_t clamped_ = 0;
  double min_density_ = 0.0;
  bool has_variance_ = true;
};

EstimateReport estimate_ks(const LabeledSample& sample, const KernelSpec& kernel,
                           const Bandwidth& h, const EstimateOptions& options = {});

EstimateReport estimate_ks_corrected(const LabeledSample& sample, const KernelSpec& kernel,
                                     const Bandwidth& h, const EstimateOptions& options = {});

// n^-1 sum phi_i / pi_i with the known density. Throws InvalidArgument when
// the density is missing or not strictly positive.
EstimateReport estimate_mc(const LabeledSample& sample);

// Density from every point (the enlarged box Q~), numerator restricted to
// points in Q, divisor n = all points. Throws EmptyNumerator when no point
// lies in Q.
EstimateReport estimate_ks_boundary(const LabeledSample& sample, const KernelSpec& kernel,
                                    const Bandwidth& h, const Domain& domain,
                                    const EstimateOptions& options = {});

// The average of phi over Q: estimate / Leb(Q).
double average_over(const EstimateReport& report, const Domain& domain);

}  // namespace mcquad
