#include "mcquad/bandwidth.hpp"

#include <algorithm>
#include <cstdio>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mcquad/error.hpp"

namespace mcquad::bandwidth {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

struct Moments {
  std::vector<double> mean, sd;
};

Moments column_moments(const Design& x) {
  const std::size_t n = x.size(), d = x.dim();
  Moments m{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += x.row(i)[j];
  for (std::size_t j = 0; j < d; ++j) m.mean[j] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double e = x.row(i)[j] - m.mean[j];
      m.sd[j] += e * e;
    }
  for (std::size_t j = 0; j < d; ++j) {
    m.sd[j] = std::sqrt(m.sd[j] / static_cast<double>(n - 1));
    if (!(m.sd[j] > 0.0))
      throw DegenerateDesign("design dimension " + std::to_string(j + 1) +
                             " has zero standard deviation");
  }
  return m;
}

double normal_scale_factor(std::size_t n, std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::pow(4.0 / ((dd + 2.0) * static_cast<double>(n)), 1.0 / (dd + 4.0));
}

double double_factorial_odd(int k) {  // (k-1)!! for even k
  double v = 1.0;
  for (int j = k - 1; j > 1; j -= 2) v *= j;
  return v;
}

// k-th derivative of the N(0, sigma^2) density at 0.
double normal_derivative_at_zero(int k, double sigma) {
  if (k % 2 != 0) return 0.0;
  const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
  return sign * double_factorial_odd(k) * kInvSqrt2Pi / std::pow(sigma, k + 1);
}

// Probabilists' Hermite polynomial He_k, k in {0, 2, 4}.
double hermite(int k, double u) {
  const double u2 = u * u;
  switch (k) {
    case 0: return 1.0;
    case 2: return u2 - 1.0;
    case 4: return u2 * u2 - 6.0 * u2 + 3.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// psi_r for the N(0, I) reference: D^r of the N(0, 2I) density at zero.
double psi_normal_reference(const std::vector<int>& r) {
  double v = 1.0;
  for (int k : r) v *= normal_derivative_at_zero(k, std::sqrt(2.0));
  return v;
}

// Kernel estimate of psi_r = n^-2 sum_{i,l} D^r L_g(Z_i - Z_l) with a
// gaussian product pilot L.
double psi_estimate(const Design& z, const std::vector<int>& r, double g) {
  const std::size_t n = z.size(), d = z.dim();
  const auto data = z.data();
  int order = 0;
  for (int k : r) order += k;
  double diag = 1.0;
  for (int k : r) diag *= normal_derivative_at_zero(k, 1.0);
  double off = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = data.data() + i * d;
    double row = 0.0;
    for (std::size_t l = i + 1; l < n; ++l) {
      const double* xl = data.data() + l * d;
      double q = 0.0, poly = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double u = (xi[j] - xl[j]) / g;
        q += u * u;
        poly *= hermite(r[j], u);
      }
      row += poly * std::exp(-0.5 * q);
    }
    off += row;
  }
  // Each D^r term carries (-1)^|r| He_r phi; |r| is even here.
  const double scale = std::pow(g, -static_cast<double>(d + order));
  const double pairs = std::pow(kInvSqrt2Pi, static_cast<double>(d)) * 2.0 * off;
  const double nn = static_cast<double>(n);
  return scale * (pairs + nn * diag) / (nn * nn);
}

struct KernelConstants {
  double roughness;  // R(K) = int K^2
  double mu2;        // int u_1^2 K
};

KernelConstants amise_constants(const KernelSpec& kernel, std::size_t d) {
  const KernelSpec base =
      kernel.order() > 2 ? KernelSpec(KernelFamily::gaussian, KernelForm::product) : kernel;
  const double r = kernel::integrate(base, d, [](std::span<const double>, double k) {
    return k * k;
  });
  const double mu2 = kernel::integrate(base, d, [](std::span<const double> u, double k) {
    return u[0] * u[0] * k;
  });
  return {r, mu2};
}

// Nelder-Mead on a d-dimensional objective. Returns false on non-convergence.
template <class F>
bool nelder_mead(F&& f, std::vector<double>& x, double& fx, int max_iter = 4000) {
  const std::size_t d = x.size();
  std::vector<std::vector<double>> simplex(d + 1, x);
  for (std::size_t j = 0; j < d; ++j) simplex[j + 1][j] += 0.25;
  std::vector<double> val(d + 1);
  for (std::size_t k = 0; k <= d; ++k) val[k] = f(simplex[k]);
  std::vector<std::size_t> idx(d + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return val[a] < val[b] || (val[a] == val[b] && a < b);
    });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[d - 1];
    double spread = 0.0;
    for (std::size_t k = 0; k <= d; ++k)
      for (std::size_t j = 0; j < d; ++j)
        spread = std::max(spread, std::abs(simplex[k][j] - simplex[best][j]));
    if (spread < 1e-11) {
      x = simplex[best];
      fx = val[best];
      return std::isfinite(fx);
    }
    std::vector<double> centroid(d, 0.0);
    for (std::size_t k = 0; k <= d; ++k)
      if (k != worst)
        for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[k][j] / static_cast<double>(d);
    auto along = [&](double t) {
      std::vector<double> p(d);
      for (std::size_t j = 0; j < d; ++j)
        p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
      return p;
    };
    auto refl = along(-1.0);
    const double fr = f(refl);
    if (fr < val[best]) {
      auto exp = along(-2.0);
      const double fe = f(exp);
      if (fe < fr) {
        simplex[worst] = exp, val[worst] = fe;
      } else {
        simplex[worst] = refl, val[worst] = fr;
      }
    } else if (fr < val[second]) {
      simplex[worst] = refl, val[worst] = fr;
    } else {
      auto con = fr < val[worst] ? along(-0.5) : along(0.5);
      const double fc = f(con);
      if (fc < std::min(fr, val[worst])) {
        simplex[worst] = con, val[worst] = fc;
      } else {
        for (std::size_t k = 0; k <= d; ++k) {
          if (k == best) continue;
          for (std::size_t j = 0; j < d; ++j)
            simplex[k][j] = simplex[best][j] + 0.5 * (simplex[k][j] - simplex[best][j]);
          val[k] = f(simplex[k]);
        }
      }
    }
    for (std::size_t j = 0; j < d; ++j)
      if (std::abs(simplex[best][j]) > 50.0) return false;  // ran off to 0 or infinity
  }
  return false;
}

}  // namespace

Design canonical_order(const Design& design) {
  const std::size_t n = design.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    auto ra = design.row(a), rb = design.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return design.subset(idx);
}

Bandwidth normal_scale(const Design& design) {
  if (design.size() < 2) throw InsufficientSample("normal_scale needs at least 2 points");
  const Design sorted = canonical_order(design);
  const Moments m = column_moments(sorted);
  const double factor = normal_scale_factor(design.size(), design.dim());
  std::vector<double> h(design.dim());
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = m.sd[j] * factor;
  return Bandwidth(std::move(h), BandwidthSource::normal_scale);
}

Bandwidth plugin_diagonal(const Design& design, const KernelSpec& kernel) {
  const std::size_t n = design.size(), d = design.dim();
  if (n < 10) throw InsufficientSample("plug-in bandwidth needs at least 10 points");
  if (d > 3) throw InvalidArgument("plug-in bandwidth supports d <= 3");

  const Design sorted = canonical_order(design);
  const Moments m = column_moments(sorted);
  std::vector<double> z(n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) z[i * d + j] = (sorted.row(i)[j] - m.mean[j]) / m.sd[j];
  const Design standardized(std::move(z), d);

  const Bandwidth reference = normal_scale(design);
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);

  // Stage 1: psi_(2e_j + 2e_k) for j <= k, each with its own pilot.
  std::vector<std::vector<double>> psi(d, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j; k < d; ++k) {
      std::vector<int> r(d, 0);
      r[j] += 2;
      r[k] += 2;
      double six = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        auto r6 = r;
        r6[a] += 2;
        six += psi_normal_reference(r6);
      }
      double at_zero = 1.0;
      for (int v : r) at_zero *= normal_derivative_at_zero(v, 1.0);
      const double g = std::pow(-2.0 * at_zero / (nn * six), 1.0 / (dd + 6.0));
      psi[j][k] = psi[k][j] = psi_estimate(standardized, r, g);
    }
  }

  // Stage 2: minimize the diagonal AMISE in log-bandwidth.
  const KernelConstants c = amise_constants(kernel, d);
  auto amise = [&](const std::vector<double>& logh) {
    double prod = 1.0, bias = 0.0;
    std::vector<double> h2(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double h = std::exp(logh[j]);
      prod *= h;
      h2[j] = h * h;
    }
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) bias += h2[j] * h2[k] * psi[j][k];
    return c.roughness / (nn * prod) + 0.25 * c.mu2 * c.mu2 * bias;
  };

  std::vector<double> logh(d);
  bool ok = true;
  if (d == 1) {
    ok = psi[0][0] > 0.0;
    if (ok) logh[0] = std::log(std::pow(c.roughness / (c.mu2 * c.mu2 * psi[0][0] * nn), 0.2));
  } else {
    for (std::size_t j = 0; j < d; ++j) logh[j] = std::log(reference.scales[j] / m.sd[j]);
    double best = 0.0;
    ok = nelder_mead(amise, logh, best);
  }

  std::vector<double> h(d);
  std::string problem;
  if (!ok) problem = "plug-in optimizer did not converge";
  for (std::size_t j = 0; j < d && problem.empty(); ++j) {
    h[j] = std::exp(logh[j]) * m.sd[j];
    if (!std::isfinite(h[j]) || h[j] < reference.scales[j] / 10.0 ||
        h[j] > reference.scales[j] * 10.0)
      problem = "plug-in bandwidth left [normal_scale/10, normal_scale*10]";
  }
  if (!problem.empty()) {
    Bandwidth out = reference;
    out.fallback = true;
    out.warning = problem + "; using normal_scale";
    return out;
  }
  return Bandwidth(std::move(h), BandwidthSource::plugin);
}

}  // namespace mcquad::bandwidth

namespace mcquad::bandwidth {

Rule Rule::parse(std::string_view text) {
  Rule r;
  if (text == "auto" || text == "plugin") return r;
  if (text == "silverman" || text == "normal") {
    r.kind = Kind::normal_scale;
    return r;
  }
  r.kind = Kind::fixed;
  std::string s(text);
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size())
      throw InvalidArgument("bandwidth must be auto, silverman, or positive numbers; got '" +
                            std::string(text) + "'");
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidBandwidth("bandwidth entries must be > 0");
    r.fixed.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return r;
}

std::string Rule::to_string() const {
  switch (kind) {
    case Kind::plugin: return "auto";
    case Kind::normal_scale: return "silverman";
    case Kind::fixed: {
      std::string s;
      for (std::size_t j = 0; j < fixed.size(); ++j) {
        if (j) s += ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", fixed[j]);
        s += buf;
      }
      return s;
    }
  }
  return "?";
}

Bandwidth select(const Rule& rule, const Design& design, const KernelSpec& kernel) {
  switch (rule.kind) {
    case Rule::Kind::plugin: return plugin_diagonal(design, kernel);
    case Rule::Kind::normal_scale: return normal_scale(design);
    case Rule::Kind::fixed: {
      if (rule.fixed.size() == 1) return Bandwidth::scalar(rule.fixed[0], design.dim());
      if (rule.fixed.size() != design.dim())
        throw InvalidBandwidth("bandwidth has " + std::to_string(rule.fixed.size()) +
                               " entries for " + std::to_string(design.dim()) + " dimensions");
      return Bandwidth(rule.fixed);
    }
  }
  throw InvalidArgument("unknown bandwidth rule");
}

}  // namespace mcquad::bandwidth
