#include "mcquad/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <optional>
#include <map>
#include <numbers>
#include <ostream>
#include <tuple>

#include "mcquad/error.hpp"
#include "mcquad/parallel.hpp"
#include "mcquad/random.hpp"

namespace mcquad::bench {

Model parse_model(std::string_view s) {
  if (s == "m1") return Model::m1;
  if (s == "m2") return Model::m2;
  if (s == "m3") return Model::m3;
  throw InvalidArgument("unknown model '" + std::string(s) + "' (expected m1|m2|m3)");
}

const char* to_string(Model m) {
  switch (m) {
    case Model::m1: return "m1";
    case Model::m2: return "m2";
    case Model::m3: return "m3";
  }
  return "?";
}

double model_factor(Model model, double x) {
  using std::numbers::pi;
  if (x < 0.0 || x > 1.0) return 0.0;
  const double s = std::sin(pi * x);
  switch (model) {
    case Model::m1: return 2.0 * s * s;
    case Model::m2: return (1.0 + pi * pi) / (pi * (1.0 + std::numbers::e)) * s * std::exp(x);
    case Model::m3: return 0.5 * pi * s * (1.0 + std::cos(5.0 * pi * x));
  }
  return 0.0;
}

double eval_model(Model model, std::span<const double> x) {
  double v = 1.0;
  for (double xi : x) v *= model_factor(model, xi);
  return v;
}

void StudyConfig::validate() const {
  if (models.empty() || dims.empty() || sizes.empty() || designs.empty() || methods.empty())
    throw InvalidArgument("study needs at least one model, dimension, size, design and method");
  if (replicates < 1) throw InvalidArgument("study needs at least one replicate");
  for (auto d : dims)
    if (d < 1 || d > 3) throw InvalidArgument("study dimensions must lie in {1,2,3}");
  for (auto n : sizes)
    if (n < 10) throw InvalidArgument("study sample sizes must be >= 10");
  for (auto m : methods)
    if (m == Method::ks_boundary)
      throw InvalidArgument("the study runs ks, ksc and mc; ks-boundary needs an enlarged domain");
  for (auto k : designs)
    if (k != ChainKind::iid_uniform && k != ChainKind::mh_uniform_target &&
        k != ChainKind::doeblin_mixture)
      throw InvalidArgument("study designs must have the uniform target (iid|mh|mixture)");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
}

std::uint64_t hash_design(const Design& design) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : design.data()) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::uint64_t design_seed(const StudyConfig& config, std::size_t replicate, std::size_t dim,
                          std::size_t n, ChainKind design) {
  const std::uint64_t replicate_seed = config.seed + replicate;
  const std::uint64_t cell = (static_cast<std::uint64_t>(dim) << 56) ^
                             (static_cast<std::uint64_t>(design) << 48) ^ n;
  return mix_seed(replicate_seed, cell);
}

std::vector<StudyRow> run_study(const StudyConfig& config) {
  config.validate();
  struct Task {
    std::size_t di, ni, ki, r;
  };
  std::vector<Task> tasks;
  for (std::size_t di = 0; di < config.dims.size(); ++di)
    for (std::size_t ni = 0; ni < config.sizes.size(); ++ni)
      if (!config.skipped(config.dims[di], config.sizes[ni]))
        for (std::size_t ki = 0; ki < config.designs.size(); ++ki)
          for (std::size_t r = 0; r < config.replicates; ++r) tasks.push_back({di, ni, ki, r});

  const std::size_t per_task = config.models.size() * config.methods.size();
  std::vector<std::vector<StudyRow>> produced(tasks.size());
  const bool needs_kernel = std::any_of(config.methods.begin(), config.methods.end(),
                                        [](Method m) { return m != Method::mc; });

  parallel_for(tasks.size(), [&](std::size_t t) {
    const Task& task = tasks[t];
    const std::size_t dim = config.dims[task.di], n = config.sizes[task.ni];
    const ChainKind kind = config.designs[task.ki];
    auto& out = produced[t];
    out.reserve(per_task);
    auto make_row = [&](Model model, Method method) {
      StudyRow row;
      row.model = model;
      row.dim = dim;
      row.n = n;
      row.design = kind;
      row.method = method;
      row.replicate = task.r;
      return row;
    };
    try {
      ChainConfig chain;
      chain.kind = kind;
      chain.domain = Domain::unit(dim);
      chain.epsilon = config.epsilon;
      chain.burn_in = config.burn_in;
      chain.seed = design_seed(config, task.r, dim, n, kind);
      const Design design = generate(chain, n).states;
      const std::uint64_t hash = hash_design(design);

      std::optional<DesignWeights> weights;
      if (needs_kernel) {
        const Bandwidth h = bandwidth::select(config.bandwidth, design, config.kernel);
        weights.emplace(design, config.kernel, h);
      }
      std::vector<double> values(n);
      for (Model model : config.models) {
        for (std::size_t i = 0; i < n; ++i) values[i] = eval_model(model, design.row(i));
        for (Method method : config.methods) {
          StudyRow row = make_row(model, method);
          row.design_hash = hash;
          EstimateReport rep;
          if (method == Method::mc) {
            LabeledSample s{design, values, std::vector<double>(n, 1.0)};
            rep = estimate_mc(s);
          } else {
            rep = method == Method::ks ? weights->ks(values) : weights->ks_corrected(values);
            row.bandwidth = rep.bandwidth.scales;
            row.clamped = rep.clamped;
          }
          row.estimate = rep.estimate;
          row.error = rep.estimate - 1.0;
          out.push_back(std::move(row));
        }
      }
    } catch (const std::exception& e) {
      out.clear();
      for (Model model : config.models)
        for (Method method : config.methods) {
          StudyRow row = make_row(model, method);
          row.failed = true;
          row.estimate = row.error = std::numeric_limits<double>::quiet_NaN();
          row.message = e.what();
          out.push_back(std::move(row));
        }
    }
  });

  // Reassemble in config order: model, dim, n, design, method, replicate.
  std::vector<StudyRow> rows;
  rows.reserve(tasks.size() * per_task);
  const std::size_t n_methods = config.methods.size();
  for (std::size_t mi = 0; mi < config.models.size(); ++mi)
    for (std::size_t di = 0; di < config.dims.size(); ++di)
      for (std::size_t ni = 0; ni < config.sizes.size(); ++ni)
        for (std::size_t ki = 0; ki < config.designs.size(); ++ki)
          for (std::size_t me = 0; me < n_methods; ++me)
            for (std::size_t r = 0; r < config.replicates; ++r) {
              const std::size_t t =
                  ((di * config.sizes.size() + ni) * config.designs.size() + ki) *
                      config.replicates + r;
              rows.push_back(produced[t][mi * n_methods + me]);
            }
  return rows;
}

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InsufficientSample("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<CellSummary> summarize(const std::vector<StudyRow>& rows) {
  using Key = std::tuple<int, std::size_t, std::size_t, int, int>;
  std::vector<Key> order;
  std::map<Key, std::vector<const StudyRow*>> cells;
  for (const auto& row : rows) {
    const Key key{static_cast<int>(row.model), row.dim, row.n, static_cast<int>(row.design),
                  static_cast<int>(row.method)};
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    const auto& members = cells[key];
    CellSummary s;
    s.model = members.front()->model;
    s.dim = members.front()->dim;
    s.n = members.front()->n;
    s.design = members.front()->design;
    s.method = members.front()->method;
    std::vector<double> est;
    for (const auto* r : members) {
      if (r->failed) {
        ++s.failed;
        continue;
      }
      est.push_back(r->estimate);
    }
    s.count = est.size();
    if (s.count < 2)
      throw InsufficientSample(std::string("cell ") + to_string(s.model) + "/d" +
                               std::to_string(s.dim) + "/n" + std::to_string(s.n) + "/" +
                               mcquad::to_string(s.design) + "/" + mcquad::to_string(s.method) +
                               " has fewer than 2 successful replicates");
    const double m = static_cast<double>(s.count);
    double sum = 0.0, sq_err = 0.0;
    for (double e : est) {
      sum += e;
      sq_err += (e - 1.0) * (e - 1.0);
    }
    s.mean = sum / m;
    s.bias = s.mean - 1.0;
    double ss = 0.0;
    for (double e : est) ss += (e - s.mean) * (e - s.mean);
    s.sd = std::sqrt(ss / (m - 1.0));
    s.rmse = std::sqrt(sq_err / m);
    std::sort(est.begin(), est.end());
    s.q1 = quantile(est, 0.25);
    s.median = quantile(est, 0.5);
    s.q3 = quantile(est, 0.75);
    out.push_back(s);
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_rows_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "model,dim,n,design,method,replicate,estimate,error,bandwidth,clamped,status\n";
  for (const auto& r : rows) {
    std::string h;
    for (std::size_t j = 0; j < r.bandwidth.size(); ++j) h += (j ? ";" : "") + fmt(r.bandwidth[j]);
    out << to_string(r.model) << ',' << r.dim << ',' << r.n << ',' << to_string(r.design) << ','
        << to_string(r.method) << ',' << r.replicate << ',' << fmt(r.estimate) << ','
        << fmt(r.error) << ',' << h << ',' << r.clamped << ',' << (r.failed ? "failed" : "ok")
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "model,dim,n,design,method,count,failed,mean,bias,sd,rmse,q1,median,q3\n";
  for (const auto& c : cells)
    out << to_string(c.model) << ',' << c.dim << ',' << c.n << ',' << to_string(c.design) << ','
        << to_string(c.method) << ',' << c.count << ',' << c.failed << ',' << fmt(c.mean) << ','
        << fmt(c.bias) << ',' << fmt(c.sd) << ',' << fmt(c.rmse) << ',' << fmt(c.q1) << ','
        << fmt(c.median) << ',' << fmt(c.q3) << '\n';
}

double RateConfig::bandwidth_at(std::size_t n) const {
  return c * std::pow(static_cast<double>(n), -1.0 / (smoothness + static_cast<double>(dim)));
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs >= 2 pairs");
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

RateReport rate_experiment(const RateConfig& config) {
  if (config.sizes.size() < 5) throw InvalidArgument("rate experiment needs >= 5 sample sizes");
  const auto [lo, hi] = std::minmax_element(config.sizes.begin(), config.sizes.end());
  if (*hi < 16 * *lo) throw InvalidArgument("rate experiment sizes must span a factor >= 16");
  if (config.replicates < 2) throw InvalidArgument("rate experiment needs >= 2 replicates");

  ChainConfig base;
  base.kind = ChainKind::mh_smooth_target;
  base.domain = Domain::unit(config.dim);
  base.epsilon = config.epsilon;
  base.target_mean = config.target_mean;
  base.target_sd = config.target_sd;
  base.burn_in = config.burn_in;
  base.validate();

  RateReport report;
  const std::size_t reps = config.replicates;
  for (std::size_t n : config.sizes) {
    const double h = config.bandwidth_at(n);
    std::vector<double> err_ks(reps), err_mc(reps);
    parallel_for(reps, [&](std::size_t r) {
      ChainConfig chain = base;
      chain.seed = mix_seed(config.seed + r, n);
      const Design design = generate(chain, n).states;
      std::vector<double> values(n), pi(n);
      for (std::size_t i = 0; i < n; ++i) {
        values[i] = eval_model(config.model, design.row(i));
        pi[i] = stationary_density(chain, design.row(i));
      }
      EstimateOptions opts;
      opts.with_variance = false;
      const DesignWeights w(design, config.kernel, Bandwidth::scalar(h, config.dim), opts);
      err_ks[r] = w.ks(values).estimate - 1.0;
      err_mc[r] = estimate_mc(LabeledSample{design, values, pi}).estimate - 1.0;
    });
    auto rmse = [](const std::vector<double>& e) {
      double s = 0.0;
      for (double v : e) s += v * v;
      return std::sqrt(s / static_cast<double>(e.size()));
    };
    report.points.push_back({n, h, rmse(err_ks), rmse(err_mc)});
  }

  std::vector<double> ln, lk, lm;
  for (const auto& p : report.points) {
    ln.push_back(std::log(static_cast<double>(p.n)));
    lk.push_back(std::log(p.rmse_ks));
    lm.push_back(std::log(p.rmse_mc));
  }
  report.slope_ks = ols_slope(ln, lk);
  report.slope_mc = ols_slope(ln, lm);

  auto sorted = report.points;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.n < b.n; });
  const double expo = static_cast<double>(config.dim) * config.p0 / (config.p0 - 1.0);
  bool ok = config.p0 > 3.0;
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    auto growth = [&](const RatePoint& p) {
      return static_cast<double>(p.n) * std::pow(p.h, expo) / std::log(static_cast<double>(p.n));
    };
    if (!(sorted[k].h < sorted[k - 1].h) || !(growth(sorted[k]) > growth(sorted[k - 1])))
      ok = false;
  }
  report.growth_condition = ok;
  return report;
}

}  // namespace mcquad::bench
