#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mcquad::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Composite Gauss-Legendre rule on [a, b]: `panels` equal panels with
// `order` nodes each. Panel edges are never evaluated.
Rule composite_gauss(double a, double b, std::size_t panels, std::size_t order = 8);

// Same, with the panel grid forced through every breakpoint in `cuts` that
// falls strictly inside (a, b). Used to keep kinks of compact kernels on
// panel boundaries.
Rule composite_gauss(double a, double b, std::size_t panels,
                     const std::vector<double>& cuts, std::size_t order = 8);

double integrate(const Rule& rule, const std::function<double(double)>& f);

// Plain trapezoid rule with `points` equispaced nodes (points >= 2).
double trapezoid(double a, double b, std::size_t points,
                 const std::function<double(double)>& f);

}  // namespace mcquad::quad
