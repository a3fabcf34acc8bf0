#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcquad/kernels.hpp"
#include "mcquad/types.hpp"

namespace mcquad::bandwidth {

// h_j = sd_j * (4 / ((d + 2) n))^(1 / (d + 4)).
// Throws InsufficientSample for n < 2 and DegenerateDesign when a column has
// zero sample standard deviation.
Bandwidth normal_scale(const Design& design);

// Two-stage diagonal plug-in. Fourth-order curvature functionals psi_r are
// estimated with gaussian pilot kernels whose bandwidths come from a normal
// reference for the sixth-order functionals; the diagonal AMISE
//   R(K) / (n prod h) + mu2(K)^2 / 4 * sum_jk h_j^2 h_k^2 psi_(2e_j + 2e_k)
// is then minimized. Works on standardized data, so the result is scale
// equivariant, and on a canonical row order, so it is exactly permutation
// invariant. Kernels of order > 2 use the constants of the gaussian kernel.
// Falls back to normal_scale (fallback = true, warning set) when the
// optimizer fails or leaves [normal_scale / 10, normal_scale * 10].
// Throws InsufficientSample for n < 10 and InvalidArgument for d > 3.
Bandwidth plugin_diagonal(const Design& design, const KernelSpec& kernel);

// Rows sorted lexicographically; the canonical order both selectors use.
Design canonical_order(const Design& design);

}  // namespace mcquad::bandwidth

namespace mcquad::bandwidth {

// How a bandwidth is obtained: --bandwidth {auto|silverman|<h>|<h1,h2,...>}.
struct Rule {
  enum class Kind { plugin, normal_scale, fixed } kind = Kind::plugin;
  std::vector<double> fixed;  // one entry (scalar) or one per dimension

  static Rule parse(std::string_view text);
  std::string to_string() const;
};

Bandwidth select(const Rule& rule, const Design& design, const KernelSpec& kernel);

}  // namespace mcquad::bandwidth
