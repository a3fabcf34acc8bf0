#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcquad/kernels.hpp"
#include "mcquad/types.hpp"

namespace mcquad {

struct DensityOptions {
  // Drop the self-term when evaluating at design points. Off by default: the
  // estimator sums over all i, including i = j.
  bool leave_one_out = false;
  // Use the binned neighbour search. Exact for compact kernels; gaussian
  // families are truncated at 8 bandwidths per coordinate, a relative error
  // below 1e-14 of the peak contribution.
  bool pruned = true;
};

struct DensityAndVariance {
  double density = 0.0;
  double variance = 0.0;
};

// Kernel density estimate pi_hat(x) = n^-1 sum_i K_h(x - X_i) over a fixed
// design. Immutable after construction; all queries are thread-safe.
class DensityField {
 public:
  DensityField(Design design, KernelSpec kernel, Bandwidth bandwidth,
               DensityOptions options = {});

  const Design& design() const noexcept { return design_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  const Bandwidth& bandwidth() const noexcept { return bandwidth_; }
  const DensityOptions& options() const noexcept { return options_; }

  // pi_hat(x). Can be negative for order-4 kernels.
  double at(std::span<const double> x) const;

  // pi_hat(x) together with
  //   v_hat(x) = [n(n-1)]^-1 sum_i (K_h(x - X_i) - pi_hat(x))^2.
  // Throws InsufficientSample when n < 2.
  DensityAndVariance at_with_variance(std::span<const double> x) const;

  // (pi_hat(X_1), ..., pi_hat(X_n)); honours leave_one_out and pruned.
  std::vector<double> at_points() const;
  std::vector<DensityAndVariance> at_points_with_variance() const;

  // O(n^2) reference path: every pair, no truncation, index order.
  std::vector<double> at_points_reference() const;

 private:
  // Calls visit(i) for every design point whose cell neighbours x's cell.
  template <class Visit>
  void for_each_candidate(std::span<const double> x, Visit&& visit) const;
  double contribution(std::span<const double> x, std::size_t i, double* u) const;
  DensityAndVariance eval(std::span<const double> x, std::size_t skip, bool want_var) const;
  void build_index();

  Design design_;
  KernelSpec kernel_;
  Bandwidth bandwidth_;
  DensityOptions options_;
  double inv_norm_ = 0.0;  // 1 / prod h_j

  bool indexed_ = false;
  std::vector<double> origin_, cell_width_;
  std::vector<std::size_t> order_;  // design indices sorted by cell
  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> cells_;
};

double kde_at(const DensityField& field, std::span<const double> x);
std::vector<double> kde_at_points(const DensityField& field);
double variance_at(const DensityField& field, std::span<const double> x);

// Regular grid with `per_dim` nodes per axis, endpoints included; row-major
// with the first coordinate varying slowest.
Design regular_grid(const Domain& domain, std::size_t per_dim);

// Minimum of pi_hat over the regular grid on the domain.
double min_density_on(const DensityField& field, const Domain& domain,
                      std::size_t grid_per_dim = 64);

// (1_Q * K_h)(x) = int_Q K_h(x - y) dy at one point.
double boundary_mass(const KernelSpec& kernel, const Domain& domain, double h,
                     std::span<const double> x);

// Minimum over grid points x in Q of (1_Q * K_h)(x) = int_Q K_h(x - y) dy,
// the kernel mass kept inside Q. Product kernels are integrated per axis with
// Gauss-Legendre; radial kernels by the spherical rule with an indicator.
double check_boundary_condition(const KernelSpec& kernel, const Domain& domain, double h,
                                std::size_t grid_per_dim = 64);

}  // namespace mcquad
