#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcquad/types.hpp"

namespace mcquad {

enum class KernelFamily { gaussian, epanechnikov, uniform_box, gaussian_order4 };

// Radial: K(x) = K0(|x|) with a d-dependent normalization (d <= 3).
// Product: K(x) = prod_k K0(x_k).
enum class KernelForm { product, radial };

class KernelSpec {
 public:
  KernelSpec() = default;
  KernelSpec(KernelFamily family, KernelForm form) : family_(family), form_(form) {}

  KernelFamily family() const noexcept { return family_; }
  KernelForm form() const noexcept { return form_; }

  // Number of vanishing monomial moments plus one.
  int order() const noexcept { return family_ == KernelFamily::gaussian_order4 ? 4 : 2; }
  bool compact() const noexcept {
    return family_ == KernelFamily::epanechnikov || family_ == KernelFamily::uniform_box;
  }
  // Support radius in scaled units; +inf for the gaussian families.
  double support_radius() const noexcept {
    return compact() ? 1.0 : std::numeric_limits<double>::infinity();
  }
  // Radius beyond which evaluation is treated as zero by the pruned KDE
  // paths: the exact support for compact kernels, 8 for gaussian tails.
  double cutoff_radius() const noexcept { return compact() ? 1.0 : 8.0; }

  std::string name() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelFamily family_ = KernelFamily::gaussian;
  KernelForm form_ = KernelForm::product;
};

KernelFamily parse_kernel_family(std::string_view s);
KernelForm parse_kernel_form(std::string_view s);
const char* to_string(KernelFamily f);
const char* to_string(KernelForm f);

namespace kernel {

// Univariate profile of a product kernel, K0(u).
double profile(KernelFamily family, double u);

// K(x). Throws InvalidArgument on non-finite input, empty x, or a radial
// kernel in more than 3 dimensions.
double eval(const KernelSpec& spec, std::span<const double> x);

// (prod_j h_j)^-1 K(x_1/h_1, ..., x_d/h_d).
double eval_scaled(const KernelSpec& spec, const Bandwidth& h, std::span<const double> x);

// Unchecked hot-path variant: x is already divided by h; no validation.
double eval_unchecked(const KernelSpec& spec, std::span<const double> u);

struct Moment {
  std::vector<int> exponents;
  double value = 0.0;
};

struct MomentReport {
  std::size_t dim = 0;
  double mass = 0.0;              // integral of K
  std::vector<Moment> moments;    // all monomials with 0 < |l| <= order-1
  double max_deviation = 0.0;     // max(|mass-1|, |moment|)
  bool within(double tol) const { return max_deviation <= tol; }
};

// Numeric quadrature of the mass and low-order moments of K in d = 1..3.
MomentReport verify_order(const KernelSpec& spec, std::size_t dim);

// Integral of f(u, K(u)) over R^d by the same quadrature verify_order uses.
double integrate(const KernelSpec& spec, std::size_t dim,
                 const std::function<double(std::span<const double>, double)>& f);

}  // namespace kernel
}  // namespace mcquad
