#include "mcquad/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mcquad/error.hpp"

namespace mcquad::quad {

namespace {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], by Newton
// iteration on the Legendre recurrence.
Rule legendre(std::size_t n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 =
            ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

void append_panel(Rule& out, const Rule& base, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < base.nodes.size(); ++k) {
    out.nodes.push_back(mid + half * base.nodes[k]);
    out.weights.push_back(half * base.weights[k]);
  }
}

}  // namespace

Rule composite_gauss(double a, double b, std::size_t panels, std::size_t order) {
  return composite_gauss(a, b, panels, {}, order);
}

Rule composite_gauss(double a, double b, std::size_t panels,
                     const std::vector<double>& cuts, std::size_t order) {
  if (!(b > a) || panels == 0 || order == 0)
    throw InvalidArgument("composite_gauss: need a < b and positive panel/order counts");
  std::vector<double> edges{a, b};
  for (double c : cuts)
    if (c > a && c < b) edges.push_back(c);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const Rule base = legendre(order);
  Rule out;
  const double total = b - a;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s], hi = edges[s + 1];
    const auto m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(panels * (hi - lo) / total)));
    for (std::size_t p = 0; p < m; ++p)
      append_panel(out, base, lo + (hi - lo) * p / m, lo + (hi - lo) * (p + 1) / m);
  }
  return out;
}

double integrate(const Rule& rule, const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(rule.nodes[k]);
  return s;
}

double trapezoid(double a, double b, std::size_t points,
                 const std::function<double(double)>& f) {
  if (points < 2) throw InvalidArgument("trapezoid: need at least 2 points");
  const double step = (b - a) / static_cast<double>(points - 1);
  double s = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i + 1 < points; ++i) s += f(a + step * static_cast<double>(i));
  return s * step;
}

}  // namespace mcquad::quad
