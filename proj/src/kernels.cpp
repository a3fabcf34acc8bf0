#include "mcquad/kernels.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "mcquad/error.hpp"
#include "mcquad/quadrature.hpp"

namespace mcquad {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // (2 pi)^-1/2

double unit_ball_volume(std::size_t d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
  }
  throw InvalidArgument("radial kernels are only normalized for d <= 3");
}

double radial_eval(KernelFamily family, std::size_t d, double r2) {
  const double dd = static_cast<double>(d);
  switch (family) {
    case KernelFamily::gaussian:
      return std::pow(kInvSqrt2Pi, dd) * std::exp(-0.5 * r2);
    case KernelFamily::gaussian_order4:
      return 0.5 * (dd + 2.0 - r2) * std::pow(kInvSqrt2Pi, dd) * std::exp(-0.5 * r2);
    case KernelFamily::epanechnikov:
      return r2 < 1.0 ? (dd + 2.0) / (2.0 * unit_ball_volume(d)) * (1.0 - r2) : 0.0;
    case KernelFamily::uniform_box:
      return r2 <= 1.0 ? 1.0 / unit_ball_volume(d) : 0.0;
  }
  return 0.0;
}

}  // namespace

std::string KernelSpec::name() const {
  return std::string(to_string(family_)) + "/" + to_string(form_);
}

KernelFamily parse_kernel_family(std::string_view s) {
  if (s == "gaussian") return KernelFamily::gaussian;
  if (s == "epanechnikov" || s == "epan") return KernelFamily::epanechnikov;
  if (s == "box" || s == "uniform-box") return KernelFamily::uniform_box;
  if (s == "gauss4" || s == "gaussian-order4") return KernelFamily::gaussian_order4;
  throw InvalidArgument("unknown kernel '" + std::string(s) +
                        "' (expected gaussian|epanechnikov|box|gauss4)");
}

KernelForm parse_kernel_form(std::string_view s) {
  if (s == "product") return KernelForm::product;
  if (s == "radial") return KernelForm::radial;
  throw InvalidArgument("unknown kernel form '" + std::string(s) + "' (expected product|radial)");
}

const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::uniform_box: return "box";
    case KernelFamily::gaussian_order4: return "gauss4";
  }
  return "?";
}

const char* to_string(KernelForm f) {
  return f == KernelForm::product ? "product" : "radial";
}

namespace kernel {

double profile(KernelFamily family, double u) {
  switch (family) {
    case KernelFamily::gaussian:
      return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case KernelFamily::gaussian_order4:
      return 0.5 * (3.0 - u * u) * kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case KernelFamily::epanechnikov:
      return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelFamily::uniform_box:
      return std::abs(u) <= 1.0 ? 0.5 : 0.0;
  }
  return 0.0;
}

double eval_unchecked(const KernelSpec& spec, std::span<const double> u) {
  if (spec.form() == KernelForm::product) {
    double k = 1.0;
    for (double v : u) {
      k *= profile(spec.family(), v);
      if (k == 0.0) break;
    }
    return k;
  }
  double r2 = 0.0;
  for (double v : u) r2 += v * v;
  return radial_eval(spec.family(), u.size(), r2);
}

double eval(const KernelSpec& spec, std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("kernel evaluation needs d >= 1");
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("kernel evaluated at a non-finite point");
  if (spec.form() == KernelForm::radial && x.size() > 3)
    throw InvalidArgument("radial kernels are only normalized for d <= 3");
  return eval_unchecked(spec, x);
}

double eval_scaled(const KernelSpec& spec, const Bandwidth& h, std::span<const double> x) {
  h.validate(x.size());
  std::array<double, 8> small{};
  std::vector<double> big;
  std::span<double> u;
  if (x.size() <= small.size()) {
    u = std::span<double>(small.data(), x.size());
  } else {
    big.resize(x.size());
    u = big;
  }
  for (std::size_t j = 0; j < x.size(); ++j) u[j] = x[j] / h.scales[j];
  return eval(spec, u) / h.product();
}

namespace {

std::vector<std::vector<int>> multi_indices(std::size_t dim, int max_degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> l(dim, 0);
  // Odometer over {0..max_degree}^dim keeping 0 < |l| <= max_degree.
  while (true) {
    int total = 0;
    for (int v : l) total += v;
    if (total > 0 && total <= max_degree) out.push_back(l);
    std::size_t j = 0;
    while (j < dim && ++l[j] > max_degree) l[j++] = 0;
    if (j == dim) break;
  }
  return out;
}

// Calls visit(u, w) for every node u of the quadrature rule with weight w.
template <class Visit>
void for_each_cartesian_node(const KernelSpec& spec, std::size_t dim, Visit&& visit) {
  const double reach = spec.compact() ? 1.0 : 10.0;
  static constexpr std::array<std::size_t, 4> panels{0, 200, 48, 16};
  const auto rule = quad::composite_gauss(-reach, reach, panels[dim], {-1.0, 0.0, 1.0}, 8);
  const std::size_t m = rule.nodes.size();
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> u(dim);
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
      u[j] = rule.nodes[idx[j]];
      w *= rule.weights[idx[j]];
    }
    visit(std::span<const double>(u), w);
    std::size_t j = 0;
    while (j < dim && ++idx[j] == m) idx[j++] = 0;
    if (j == dim) break;
  }
}

// Polar (d=2) and spherical (d=3) coordinates keep the radial support edge on
// a panel boundary, which the Cartesian grid cannot.
template <class Visit>
void for_each_spherical_node(const KernelSpec& spec, std::size_t dim, Visit&& visit) {
  const double reach = spec.compact() ? 1.0 : 10.0;
  const auto radial = quad::composite_gauss(0.0, reach, 64, {1.0}, 8);
  constexpr std::size_t n_phi = 96;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  std::vector<double> u(dim);
  if (dim == 2) {
    for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
      const double r = radial.nodes[a];
      for (std::size_t b = 0; b < n_phi; ++b) {
        const double phi = dphi * static_cast<double>(b);
        u[0] = r * std::cos(phi);
        u[1] = r * std::sin(phi);
        visit(std::span<const double>(u), radial.weights[a] * dphi * r);
      }
    }
    return;
  }
  const auto polar = quad::composite_gauss(-1.0, 1.0, 4, 12);
  for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
    const double r = radial.nodes[a];
    for (std::size_t c = 0; c < polar.nodes.size(); ++c) {
      const double ct = polar.nodes[c];
      const double st = std::sqrt(1.0 - ct * ct);
      for (std::size_t b = 0; b < n_phi; ++b) {
        const double phi = dphi * static_cast<double>(b);
        u[0] = r * st * std::cos(phi);
        u[1] = r * st * std::sin(phi);
        u[2] = r * ct;
        visit(std::span<const double>(u), radial.weights[a] * polar.weights[c] * dphi * r * r);
      }
    }
  }
}

template <class Visit>
void for_each_node(const KernelSpec& spec, std::size_t dim, Visit&& visit) {
  if (dim < 1 || dim > 3) throw InvalidArgument("kernel quadrature supports d in {1,2,3}");
  if (spec.form() == KernelForm::radial && dim > 1) for_each_spherical_node(spec, dim, visit);
  else for_each_cartesian_node(spec, dim, visit);
}

}  // namespace

double integrate(const KernelSpec& spec, std::size_t dim,
                 const std::function<double(std::span<const double>, double)>& f) {
  double total = 0.0;
  for_each_node(spec, dim, [&](std::span<const double> u, double w) {
    total += w * f(u, eval_unchecked(spec, u));
  });
  return total;
}

MomentReport verify_order(const KernelSpec& spec, std::size_t dim) {
  MomentReport report;
  report.dim = dim;
  const auto indices = multi_indices(dim, spec.order() - 1);
  std::vector<double> sums(indices.size(), 0.0);
  double mass = 0.0;
  for_each_node(spec, dim, [&](std::span<const double> u, double w) {
    const double k = w * eval_unchecked(spec, u);
    mass += k;
    for (std::size_t t = 0; t < indices.size(); ++t) {
      double m = k;
      for (std::size_t j = 0; j < dim; ++j)
        for (int e = 0; e < indices[t][j]; ++e) m *= u[j];
      sums[t] += m;
    }
  });
  report.mass = mass;
  report.max_deviation = std::abs(mass - 1.0);
  for (std::size_t t = 0; t < indices.size(); ++t) {
    report.max_deviation = std::max(report.max_deviation, std::abs(sums[t]));
    report.moments.push_back({indices[t], sums[t]});
  }
  return report;
}

}  // namespace kernel
}  // namespace mcquad
