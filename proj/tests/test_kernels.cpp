#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "mcquad/error.hpp"
#include "mcquad/kernels.hpp"
#include "oracle.hpp"

using namespace mcquad;

namespace {

const KernelFamily kFamilies[] = {KernelFamily::gaussian, KernelFamily::epanechnikov,
                                  KernelFamily::uniform_box, KernelFamily::gaussian_order4};
const KernelForm kForms[] = {KernelForm::product, KernelForm::radial};

double at(const KernelSpec& k, std::vector<double> x) { return kernel::eval(k, x); }

}  // namespace

TEST_CASE("kernel values at reference points") {
  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const KernelSpec g(KernelFamily::gaussian, KernelForm::product);
  CHECK(at(g, {0.0}) == doctest::Approx(0.398942).epsilon(1e-6));
  CHECK(at(g, {0.0}) == doctest::Approx(phi0).epsilon(1e-15));

  const KernelSpec e(KernelFamily::epanechnikov, KernelForm::product);
  CHECK(at(e, {0.0}) == 0.75);
  CHECK(at(e, {1.5}) == 0.0);

  const KernelSpec g4(KernelFamily::gaussian_order4, KernelForm::product);
  CHECK(at(g4, {0.0}) == doctest::Approx(1.5 * phi0).epsilon(1e-15));
  // Order-4 construction 0.5 (3 - u^2) phi(u) at a generic point.
  CHECK(at(g4, {1.3}) == doctest::Approx(0.5 * (3.0 - 1.69) * oracle::gauss(1.3)).epsilon(1e-14));

  const KernelSpec box(KernelFamily::uniform_box, KernelForm::product);
  CHECK(at(box, {0.5}) == 0.5);
  CHECK(at(box, {1.0001}) == 0.0);
}

TEST_CASE("radial kernels use the d-ball constants") {
  // Epanechnikov radial: (d + 2) / (2 V_d) (1 - r^2); V_2 = pi, V_3 = 4 pi / 3.
  const KernelSpec e(KernelFamily::epanechnikov, KernelForm::radial);
  CHECK(at(e, {0.0, 0.0}) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-15));
  CHECK(at(e, {0.0, 0.0, 0.0}) == doctest::Approx(5.0 / (2.0 * 4.0 * std::numbers::pi / 3.0)));
  CHECK(at(e, {0.8, 0.7}) == 0.0);
  const KernelSpec box(KernelFamily::uniform_box, KernelForm::radial);
  CHECK(at(box, {0.3, 0.3}) == doctest::Approx(1.0 / std::numbers::pi));
  // The radial gaussian coincides with the product gaussian.
  const KernelSpec gr(KernelFamily::gaussian, KernelForm::radial);
  CHECK(at(gr, {0.4, -1.1}) == doctest::Approx(oracle::gauss(0.4) * oracle::gauss(-1.1)).epsilon(1e-14));
  CHECK_THROWS_AS(at(gr, {0.0, 0.0, 0.0, 0.0}), InvalidArgument);
}

TEST_CASE("eval rejects non-finite and empty input") {
  const KernelSpec g;
  CHECK_THROWS_AS(at(g, {std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
  CHECK_THROWS_AS(at(g, {0.0, std::numeric_limits<double>::infinity()}), InvalidArgument);
  CHECK_THROWS_AS(at(g, {}), InvalidArgument);
  try {
    at(g, {std::nan("")});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
}

TEST_CASE("eval_scaled follows the scaling identity") {
  const KernelSpec box(KernelFamily::uniform_box, KernelForm::product);
  const std::vector<double> half{0.5};
  CHECK(kernel::eval_scaled(box, Bandwidth({1.0}), half) == 0.5);
  const KernelSpec g;
  const std::vector<double> zero1{0.0}, zero2{0.0, 0.0};
  CHECK(kernel::eval_scaled(g, Bandwidth({2.0}), zero1) == doctest::Approx(0.398942 / 2).epsilon(1e-6));
  CHECK(kernel::eval_scaled(g, Bandwidth({1.0, 0.5}), zero2) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi) / 0.5).epsilon(1e-14));
  CHECK_THROWS_AS(kernel::eval_scaled(g, Bandwidth({0.0}), zero1), InvalidBandwidth);
  CHECK_THROWS_AS(kernel::eval_scaled(g, Bandwidth({-1.0}), zero1), InvalidBandwidth);
  CHECK_THROWS_AS(kernel::eval_scaled(g, Bandwidth({1.0}), zero2), InvalidBandwidth);
}

TEST_CASE("symmetry and scaling hold on random inputs") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0), hs(0.05, 3.0);
  for (auto fam : kFamilies)
    for (auto form : kForms)
      for (std::size_t d = 1; d <= 3; ++d) {
        const KernelSpec k(fam, form);
        for (int t = 0; t < 1000; ++t) {
          std::vector<double> x(d), mx(d);
          for (std::size_t j = 0; j < d; ++j) {
            x[j] = u(gen);
            mx[j] = -x[j];
          }
          REQUIRE(kernel::eval(k, x) == kernel::eval(k, mx));
          const double h = hs(gen);
          std::vector<double> xs(d);
          for (std::size_t j = 0; j < d; ++j) xs[j] = x[j] / h;
          const double expect = kernel::eval(k, xs) / std::pow(h, static_cast<double>(d));
          const double got = kernel::eval_scaled(k, Bandwidth::scalar(h, d), x);
          REQUIRE(std::abs(got - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
        }
      }
}

TEST_CASE("mass and moments vanish to the kernel order") {
  for (auto fam : kFamilies)
    for (auto form : kForms)
      for (std::size_t d = 1; d <= 3; ++d) {
        const KernelSpec k(fam, form);
        // Radial and product forms are the same thing in one dimension.
        if (form == KernelForm::radial && d == 1) continue;
        const auto r = kernel::verify_order(k, d);
        INFO(k.name() << " d=" << d << " dev=" << r.max_deviation);
        CHECK(r.within(1e-6));
        CHECK(r.mass == doctest::Approx(1.0).epsilon(1e-6));
      }
}

TEST_CASE("order-4 second moment by an independent trapezoid") {
  // int u^2 0.5 (3 - u^2) phi(u) du = 0.5 (3 - 3) = 0.
  const double m2 = oracle::trapezoid(
      [](double u) { return u * u * 0.5 * (3.0 - u * u) * oracle::gauss(u); }, -12.0, 12.0, 200001);
  CHECK(std::abs(m2) < 1e-9);
  const auto r = kernel::verify_order(KernelSpec(KernelFamily::gaussian_order4, KernelForm::product), 1);
  bool found = false;
  for (const auto& m : r.moments)
    if (m.exponents == std::vector<int>{2}) {
      found = true;
      CHECK(std::abs(m.value) < 1e-6);
    }
  CHECK(found);
}

TEST_CASE("order-4 kernel takes negative values") {
  const KernelSpec g4(KernelFamily::gaussian_order4, KernelForm::product);
  double lo = 1.0;
  for (int i = 0; i <= 800; ++i) lo = std::min(lo, at(g4, {-4.0 + 0.01 * i}));
  CHECK(lo < 0.0);
  CHECK(g4.order() == 4);
  CHECK(KernelSpec().order() == 2);
}

TEST_CASE("compact kernels vanish outside their support") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (auto fam : {KernelFamily::epanechnikov, KernelFamily::uniform_box})
    for (auto form : kForms) {
      const KernelSpec k(fam, form);
      CHECK(k.compact());
      CHECK(k.support_radius() == 1.0);
      for (int t = 0; t < 2000; ++t) {
        std::vector<double> x{u(gen), u(gen)};
        const double r = form == KernelForm::radial ? std::hypot(x[0], x[1])
                                                    : std::max(std::abs(x[0]), std::abs(x[1]));
        if (r > 1.0) REQUIRE(kernel::eval(k, x) == 0.0);
      }
    }
  CHECK(std::isinf(KernelSpec().support_radius()));
}

TEST_CASE("kernel names parse") {
  CHECK(parse_kernel_family("gaussian") == KernelFamily::gaussian);
  CHECK(parse_kernel_family("epanechnikov") == KernelFamily::epanechnikov);
  CHECK(parse_kernel_family("box") == KernelFamily::uniform_box);
  CHECK(parse_kernel_family("gauss4") == KernelFamily::gaussian_order4);
  CHECK(parse_kernel_form("radial") == KernelForm::radial);
  CHECK_THROWS_AS(parse_kernel_family("triweight"), InvalidArgument);
  CHECK_THROWS_AS(parse_kernel_form("diagonal"), InvalidArgument);
}
