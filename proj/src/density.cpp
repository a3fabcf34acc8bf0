#include "mcquad/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mcquad/error.hpp"
#include "mcquad/parallel.hpp"
#include "mcquad/quadrature.hpp"

namespace mcquad {

namespace {

constexpr std::size_t kMaxIndexedDim = 3;
constexpr std::int64_t kCellBits = 21;
constexpr std::int64_t kCellLimit = (std::int64_t{1} << kCellBits) - 2;

std::uint64_t pack(std::span<const std::int64_t> cell) {
  std::uint64_t key = 0;
  for (auto c : cell) key = (key << kCellBits) | static_cast<std::uint64_t>(c + 1);
  return key;
}

}  // namespace

DensityField::DensityField(Design design, KernelSpec kernel, Bandwidth bandwidth,
                           DensityOptions options)
    : design_(std::move(design)),
      kernel_(kernel),
      bandwidth_(std::move(bandwidth)),
      options_(options) {
  if (design_.empty()) throw InvalidState("density field needs a non-empty design");
  bandwidth_.validate(design_.dim());
  if (kernel_.form() == KernelForm::radial && design_.dim() > 3)
    throw InvalidArgument("radial kernels are only normalized for d <= 3");
  inv_norm_ = 1.0 / bandwidth_.product();
  if (options_.pruned) build_index();
}

void DensityField::build_index() {
  const std::size_t d = design_.dim();
  const std::size_t n = design_.size();
  if (d > kMaxIndexedDim) return;
  origin_.assign(d, std::numeric_limits<double>::infinity());
  cell_width_.resize(d);
  std::vector<double> top(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    auto r = design_.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      origin_[j] = std::min(origin_[j], r[j]);
      top[j] = std::max(top[j], r[j]);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    cell_width_[j] = kernel_.cutoff_radius() * bandwidth_.scales[j];
    if ((top[j] - origin_[j]) / cell_width_[j] >= static_cast<double>(kCellLimit)) return;
  }
  std::vector<std::uint64_t> keys(n);
  std::array<std::int64_t, kMaxIndexedDim> cell{};
  for (std::size_t i = 0; i < n; ++i) {
    auto r = design_.row(i);
    for (std::size_t j = 0; j < d; ++j)
      cell[j] = static_cast<std::int64_t>(std::floor((r[j] - origin_[j]) / cell_width_[j]));
    keys[i] = pack(std::span<const std::int64_t>(cell.data(), d));
  }
  order_.resize(n);
  for (std::size_t i = 0; i < n; ++i) order_[i] = i;
  std::stable_sort(order_.begin(), order_.end(),
                   [&keys](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s;
    while (e < n && keys[order_[e]] == keys[order_[s]]) ++e;
    cells_.emplace(keys[order_[s]], std::make_pair(s, e));
    s = e;
  }
  indexed_ = true;
}

template <class Visit>
void DensityField::for_each_candidate(std::span<const double> x, Visit&& visit) const {
  const std::size_t n = design_.size();
  if (!indexed_) {
    for (std::size_t i = 0; i < n; ++i) visit(i);
    return;
  }
  const std::size_t d = design_.dim();
  std::array<std::int64_t, kMaxIndexedDim> base{}, cell{};
  for (std::size_t j = 0; j < d; ++j) {
    const double c = std::floor((x[j] - origin_[j]) / cell_width_[j]);
    // Queries far outside the design's bounding box have no neighbours.
    if (c < -1.0 || c > static_cast<double>(kCellLimit)) return;
    base[j] = static_cast<std::int64_t>(c);
  }
  std::size_t combos = 1;
  for (std::size_t j = 0; j < d; ++j) combos *= 3;
  for (std::size_t m = 0; m < combos; ++m) {
    std::size_t code = m;
    bool valid = true;
    for (std::size_t j = 0; j < d; ++j) {
      cell[j] = base[j] + static_cast<std::int64_t>(code % 3) - 1;
      code /= 3;
      if (cell[j] < 0 || cell[j] > kCellLimit) valid = false;
    }
    if (!valid) continue;
    auto it = cells_.find(pack(std::span<const std::int64_t>(cell.data(), d)));
    if (it == cells_.end()) continue;
    for (std::size_t s = it->second.first; s < it->second.second; ++s) visit(order_[s]);
  }
}

double DensityField::contribution(std::span<const double> x, std::size_t i, double* u) const {
  const std::size_t d = design_.dim();
  auto r = design_.row(i);
  const double cutoff = kernel_.cutoff_radius();
  for (std::size_t j = 0; j < d; ++j) {
    u[j] = (x[j] - r[j]) / bandwidth_.scales[j];
    if (indexed_ && std::abs(u[j]) > cutoff) return 0.0;
  }
  return kernel::eval_unchecked(kernel_, std::span<const double>(u, d)) * inv_norm_;
}

DensityAndVariance DensityField::eval(std::span<const double> x, std::size_t skip,
                                      bool want_var) const {
  const std::size_t n = design_.size();
  const std::size_t count = skip < n ? n - 1 : n;
  std::vector<double> u(design_.dim());
  double sum = 0.0;
  if (!want_var) {
    for_each_candidate(x, [&](std::size_t i) {
      if (i != skip) sum += contribution(x, i, u.data());
    });
    return {sum / static_cast<double>(count), 0.0};
  }
  // Two passes over the same candidates: sum of squared deviations, plus
  // pi_hat^2 for every point that was never visited.
  std::vector<double> terms;
  for_each_candidate(x, [&](std::size_t i) {
    if (i == skip) return;
    const double k = contribution(x, i, u.data());
    terms.push_back(k);
    sum += k;
  });
  const double density = sum / static_cast<double>(count);
  double ss = 0.0;
  for (double k : terms) ss += (k - density) * (k - density);
  ss += static_cast<double>(count - terms.size()) * density * density;
  const double nn = static_cast<double>(count);
  return {density, ss / (nn * (nn - 1.0))};
}

double DensityField::at(std::span<const double> x) const {
  if (x.size() != design_.dim())
    throw InvalidArgument("query dimension does not match the design");
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("density queried at a non-finite point");
  return eval(x, design_.size(), false).density;
}

DensityAndVariance DensityField::at_with_variance(std::span<const double> x) const {
  if (design_.size() < 2)
    throw InsufficientSample("variance estimate needs at least 2 design points");
  if (x.size() != design_.dim())
    throw InvalidArgument("query dimension does not match the design");
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("density queried at a non-finite point");
  return eval(x, design_.size(), true);
}

std::vector<double> DensityField::at_points() const {
  const std::size_t n = design_.size();
  if (options_.leave_one_out && n < 2)
    throw InsufficientSample("leave-one-out density needs at least 2 design points");
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    out[i] = eval(design_.row(i), options_.leave_one_out ? i : n, false).density;
  });
  return out;
}

std::vector<DensityAndVariance> DensityField::at_points_with_variance() const {
  const std::size_t n = design_.size();
  if (n < 2 || (options_.leave_one_out && n < 3))
    throw InsufficientSample("variance estimate needs at least 2 design points");
  std::vector<DensityAndVariance> out(n);
  parallel_for(n, [&](std::size_t i) {
    out[i] = eval(design_.row(i), options_.leave_one_out ? i : n, true);
  });
  return out;
}

std::vector<double> DensityField::at_points_reference() const {
  const std::size_t n = design_.size();
  const std::size_t d = design_.dim();
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> u(d);
    auto x = design_.row(i);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (options_.leave_one_out && k == i) continue;
      auto r = design_.row(k);
      for (std::size_t j = 0; j < d; ++j) u[j] = (x[j] - r[j]) / bandwidth_.scales[j];
      s += kernel::eval_unchecked(kernel_, u);
    }
    out[i] = s * inv_norm_ / static_cast<double>(options_.leave_one_out ? n - 1 : n);
  });
  return out;
}

double kde_at(const DensityField& field, std::span<const double> x) { return field.at(x); }

std::vector<double> kde_at_points(const DensityField& field) { return field.at_points(); }

double variance_at(const DensityField& field, std::span<const double> x) {
  return field.at_with_variance(x).variance;
}

Design regular_grid(const Domain& domain, std::size_t per_dim) {
  if (per_dim < 2) throw InvalidArgument("grid needs at least 2 nodes per dimension");
  const std::size_t d = domain.dim();
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) total *= per_dim;
  std::vector<double> pts(total * d);
  for (std::size_t g = 0; g < total; ++g) {
    std::size_t code = g;
    for (std::size_t jj = d; jj-- > 0;) {
      const std::size_t k = code % per_dim;
      code /= per_dim;
      const double t = static_cast<double>(k) / static_cast<double>(per_dim - 1);
      pts[g * d + jj] = domain.lower()[jj] + t * (domain.upper()[jj] - domain.lower()[jj]);
    }
  }
  return Design(std::move(pts), d);
}

double min_density_on(const DensityField& field, const Domain& domain,
                      std::size_t grid_per_dim) {
  if (domain.dim() != field.design().dim())
    throw InvalidArgument("domain dimension does not match the design");
  const Design grid = regular_grid(domain, grid_per_dim);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) { values[g] = field.at(grid.row(g)); });
  return *std::min_element(values.begin(), values.end());
}

namespace {

// int_a^b K0(u) du for a product-kernel profile.
double profile_mass(KernelFamily family, bool compact, double a, double b) {
  const double reach = compact ? 1.0 : 12.0;
  a = std::max(a, -reach);
  b = std::min(b, reach);
  if (!(b > a)) return 0.0;
  const auto rule = quad::composite_gauss(a, b, 48, {-1.0, 0.0, 1.0}, 8);
  return quad::integrate(rule, [family](double u) { return kernel::profile(family, u); });
}

}  // namespace

double boundary_mass(const KernelSpec& kernel, const Domain& domain, double h,
                     std::span<const double> x) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidBandwidth("bandwidth must be positive");
  const std::size_t d = domain.dim();
  if (x.size() != d) throw InvalidArgument("point dimension does not match the domain");
  if (kernel.form() == KernelForm::product || d == 1) {
    double c = 1.0;
    for (std::size_t j = 0; j < d; ++j)
      c *= profile_mass(kernel.family(), kernel.compact(), (x[j] - domain.upper()[j]) / h,
                        (x[j] - domain.lower()[j]) / h);
    return c;
  }
  std::vector<double> y(d);
  return kernel::integrate(kernel, d, [&](std::span<const double> u, double k) {
    for (std::size_t j = 0; j < d; ++j) y[j] = x[j] - h * u[j];
    return domain.contains(y) ? k : 0.0;
  });
}

double check_boundary_condition(const KernelSpec& kernel, const Domain& domain, double h,
                                std::size_t grid_per_dim) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidBandwidth("bandwidth must be positive");
  const Design grid = regular_grid(domain, grid_per_dim);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(),
               [&](std::size_t g) { values[g] = boundary_mass(kernel, domain, h, grid.row(g)); });
  return *std::min_element(values.begin(), values.end());
}

}  // namespace mcquad
