#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcquad/bandwidth.hpp"
#include "mcquad/chains.hpp"
#include "mcquad/integrate.hpp"
#include "mcquad/kernels.hpp"

namespace mcquad::bench {

// Test integrands on [0,1]^d, each a product of unit-integral factors so the
// true integral is exactly 1:
//   m1: 2 sin(pi x)^2
//   m2: (1 + pi^2) / (pi (1 + e)) sin(pi x) exp(x)
//   m3: pi / 2 sin(pi x) (1 + cos(5 pi x))
enum class Model { m1, m2, m3 };

Model parse_model(std::string_view s);
const char* to_string(Model m);

// phi(x); zero outside [0,1]^d.
double eval_model(Model model, std::span<const double> x);
// One univariate factor.
double model_factor(Model model, double x);

struct StudyConfig {
  std::vector<Model> models{Model::m1, Model::m2, Model::m3};
  std::vector<std::size_t> dims{1};
  std::vector<std::size_t> sizes{500, 1000, 2000};
  std::vector<ChainKind> designs{ChainKind::iid_uniform, ChainKind::mh_uniform_target};
  std::vector<Method> methods{Method::ks, Method::ks_corrected, Method::mc};
  std::size_t replicates = 50;
  std::uint64_t seed = 1;
  KernelSpec kernel;
  bandwidth::Rule bandwidth;
  double epsilon = 0.2;
  std::size_t burn_in = 1000;
  // The d = 3, n >= 2000 cells cost O(R n^2) at large constants; they are
  // skipped unless full is set.
  bool full = true;

  bool skipped(std::size_t dim, std::size_t n) const noexcept { return !full && dim == 3 && n >= 2000; }
  void validate() const;
};

struct StudyRow {
  Model model = Model::m1;
  std::size_t dim = 1;
  std::size_t n = 0;
  ChainKind design = ChainKind::iid_uniform;
  Method method = Method::ks;
  std::size_t replicate = 0;
  double estimate = 0.0;
  double error = 0.0;            // estimate - 1
  std::vector<double> bandwidth; // empty for mc
  std::size_t clamped = 0;
  std::uint64_t design_hash = 0; // FNV-1a of the design coordinates
  bool failed = false;
  std::string message;
};

// Seed of the design draw for one replicate of one (d, n, design) cell. The
// replicate seed is base + replicate index; it is mixed with the cell so
// cells use distinct streams. Models and methods share the draw.
std::uint64_t design_seed(const StudyConfig& config, std::size_t replicate, std::size_t dim,
                          std::size_t n, ChainKind design);

// One row per (model, dim, n, design, method, replicate), sorted in config
// order. Replicates run concurrently; failures become rows with failed=true.
std::vector<StudyRow> run_study(const StudyConfig& config);

struct CellSummary {
  Model model = Model::m1;
  std::size_t dim = 1;
  std::size_t n = 0;
  ChainKind design = ChainKind::iid_uniform;
  Method method = Method::ks;
  std::size_t count = 0;
  std::size_t failed = 0;
  double mean = 0.0, bias = 0.0, sd = 0.0, rmse = 0.0;
  double q1 = 0.0, median = 0.0, q3 = 0.0;  // of the estimates
};

// Quantile with linear interpolation between order statistics
// (h = (m - 1) p, the default of R and NumPy). `sorted` must be ascending.
double quantile(std::span<const double> sorted, double p);

// Statistics per cell over successful replicates: sample sd (m - 1 divisor),
// rmse = sqrt(mean error^2). Throws InsufficientSample when a cell has fewer
// than 2 successful replicates.
std::vector<CellSummary> summarize(const std::vector<StudyRow>& rows);

void write_rows_csv(std::ostream& out, const std::vector<StudyRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);

std::uint64_t hash_design(const Design& design);

struct RateConfig {
  std::vector<std::size_t> sizes{250, 500, 1000, 2000, 4000};
  std::size_t replicates = 200;
  Model model = Model::m1;
  std::size_t dim = 1;
  KernelSpec kernel;
  double c = 0.5;               // h(n) = c * n^(-1 / (smoothness + d))
  double smoothness = 2.0;
  double p0 = 4.0;              // return-time moment order for the growth check
  double epsilon = 0.2;
  double target_mean = 0.5;
  double target_sd = 0.25;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 1;

  double bandwidth_at(std::size_t n) const;
};

struct RatePoint {
  std::size_t n = 0;
  double h = 0.0;
  double rmse_ks = 0.0;
  double rmse_mc = 0.0;
};

struct RateReport {
  std::vector<RatePoint> points;
  double slope_ks = 0.0;  // least-squares slope of log rmse on log n
  double slope_mc = 0.0;
  // h(n) decreasing and n h^(d p0 / (p0 - 1)) / log n increasing on the grid.
  bool growth_condition = false;
};

// Requires >= 5 sizes spanning at least a factor 16.
RateReport rate_experiment(const RateConfig& config);

// Ordinary least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mcquad::bench
