#include "mcquad/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcquad/bandwidth.hpp"
#include "mcquad/bench.hpp"
#include "mcquad/chains.hpp"
#include "mcquad/error.hpp"
#include "mcquad/geo.hpp"
#include "mcquad/integrate.hpp"
#include "mcquad/kernels.hpp"
#include "mcquad/parallel.hpp"
#include "mcquad/regen.hpp"

namespace mcquad::cli {

namespace {

using json = nlohmann::ordered_json;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw InvalidArgument("cannot parse " + what + " '" + s + "' as a number");
  return v;
}

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

template <class T, class F>
std::vector<T> parse_list(const std::string& s, F parse) {
  std::vector<T> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse(tok));
  return out;
}

std::size_t to_size(const std::string& s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw InvalidArgument("cannot parse '" + s + "' as a count");
  return v;
}

// "lo1:hi1,lo2:hi2,..."
Domain parse_domain(const std::string& s) {
  std::vector<double> lo, hi;
  for (const auto& part : split(s, ',')) {
    const auto bounds = split(part, ':');
    if (bounds.size() != 2) throw InvalidArgument("domain entries look like lo:hi, got '" + part + "'");
    lo.push_back(to_double(bounds[0], "domain bound"));
    hi.push_back(to_double(bounds[1], "domain bound"));
  }
  return Domain(lo, hi);
}

std::uint64_t default_seed() {
  const char* env = std::getenv("MCQUAD_SEED");
  if (!env || !*env) return 1;
  const std::string s(env);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InvalidArgument("MCQUAD_SEED must be a non-negative integer, got '" + s + "'");
  return v;
}

// Options shared by the subcommands.
struct Common {
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::string kernel = "gaussian";
  std::string form = "product";
  std::string bandwidth = "auto";
  std::string out;

  KernelSpec kernel_spec() const {
    return KernelSpec(parse_kernel_family(kernel), parse_kernel_form(form));
  }
};

void add_threads(CLI::App* app, Common& c) {
  app->add_option("--threads", c.threads, "Worker threads (default: all cores; 1 = sequential)");
}
void add_seed(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Base seed (default: $MCQUAD_SEED or 1)");
}
void add_kernel(CLI::App* app, Common& c) {
  app->add_option("--kernel", c.kernel, "gaussian|epanechnikov|box|gauss4");
  app->add_option("--kernel-form", c.form, "product|radial");
  app->add_option("--bandwidth", c.bandwidth, "auto|silverman|<h>|<h1,h2,...>");
}

// Output sink: a file when a path is given, else the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
      return;
    }
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    file_.open(path, std::ios::binary);
    if (!file_) throw DataError("cannot open '" + path + "' for writing");
    os_ = &file_;
  }
  std::ostream& get() { return *os_; }
  void finish(const std::string& path) {
    os_->flush();
    if (!*os_) throw DataError("writing '" + (path.empty() ? std::string("stdout") : path) + "' failed");
  }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

// Labeled-sample CSV: header x1..xd plus the named extra columns. Blank
// lines and lines starting with '#' are ignored.
struct Table {
  std::size_t dim = 0;
  std::vector<double> points;
  std::map<std::string, std::vector<double>> columns;
  std::size_t rows = 0;
};

Table read_table(const std::string& path, const std::vector<std::string>& required,
                 const std::vector<std::string>& optional_cols) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    header = split(line, ',');
    break;
  }
  if (header.empty()) throw DataError("'" + path + "' has no header row");

  Table t;
  std::vector<std::size_t> x_idx;
  for (std::size_t j = 1;; ++j) {
    const auto it = std::find(header.begin(), header.end(), "x" + std::to_string(j));
    if (it == header.end()) break;
    x_idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  if (x_idx.empty()) throw DataError("'" + path + "' has no x1 column");
  t.dim = x_idx.size();
  std::map<std::string, std::size_t> col_idx;
  for (const auto& name : required) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("'" + path + "' is missing the '" + name + "' column");
    col_idx[name] = static_cast<std::size_t>(it - header.begin());
  }
  for (const auto& name : optional_cols) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it != header.end()) col_idx[name] = static_cast<std::size_t>(it - header.begin());
  }
  for (const auto& kv : col_idx) t.columns[kv.first];

  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    auto value = [&](std::size_t idx) {
      double v = 0.0;
      const auto& c = cells[idx];
      const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || p != c.data() + c.size() || c.empty() || !std::isfinite(v))
        throw DataError(path + ":" + std::to_string(lineno) + ": bad value '" + c + "' in column '" +
                        header[idx] + "'");
      return v;
    };
    for (auto idx : x_idx) t.points.push_back(value(idx));
    for (const auto& [name, idx] : col_idx) t.columns[name].push_back(value(idx));
    ++t.rows;
  }
  if (t.rows == 0) throw DataError("'" + path + "' has no data rows");
  return t;
}

json bandwidth_json(const Bandwidth& h) {
  json j;
  j["scales"] = h.scales;
  j["source"] = to_string(h.source);
  j["fallback"] = h.fallback;
  if (!h.warning.empty()) j["warning"] = h.warning;
  return j;
}

void apply_threads(const Common& c) {
  if (c.threads > 0) set_max_threads(c.threads);
}

// simulate -----------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string design = "mh";
  std::size_t n = 1000;
  std::size_t dim = 1;
  double epsilon = 0.2;
  double lambda0 = 0.5;
  std::size_t burn_in = 1000;
  std::string domain;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  apply_threads(a.common);
  ChainConfig c;
  c.kind = parse_chain_kind(a.design);
  c.domain = a.domain.empty() ? Domain::unit(a.dim) : parse_domain(a.domain);
  c.epsilon = a.epsilon;
  c.lambda0 = a.lambda0;
  c.burn_in = a.burn_in;
  c.seed = a.common.seed;
  c.validate();
  if (a.n < 1) throw InvalidArgument("--n must be >= 1");
  const std::size_t d = c.dim();

  Sink sink(a.common.out, out);
  auto& os = sink.get();
  os << "# mcquad simulate design=" << to_string(c.kind) << " n=" << a.n << " domain=" << c.domain.to_string()
     << " epsilon=" << fmt(c.epsilon) << " lambda0=" << fmt(c.lambda0) << " burn_in=" << c.burn_in
     << " seed=" << c.seed << "\n";
  for (std::size_t j = 0; j < d; ++j) os << (j ? "," : "") << "x" << j + 1;

  if (c.kind == ChainKind::doeblin_mixture) {
    const auto trace = regen::split_simulate(c, a.n);
    os << ",y,regen\n";
    std::size_t block = 0;
    for (std::size_t i = 0; i < a.n; ++i) {
      for (std::size_t j = 0; j < d; ++j) os << (j ? "," : "") << fmt(trace.states.row(i)[j]);
      os << "," << int(trace.bits[i]) << "," << block << "\n";
      if (trace.bits[i]) ++block;
    }
  } else {
    const auto trace = generate(c, a.n);
    const bool mh = c.kind != ChainKind::iid_uniform;
    os << (mh ? ",accepted\n" : "\n");
    for (std::size_t i = 0; i < a.n; ++i) {
      for (std::size_t j = 0; j < d; ++j) os << (j ? "," : "") << fmt(trace.states.row(i)[j]);
      if (mh) os << "," << int(trace.accepted[i]);
      os << "\n";
    }
  }
  sink.finish(a.common.out);
  return kOk;
}

// estimate -----------------------------------------------------------------

struct EstimateArgs {
  Common common;
  std::string input;
  std::string method = "ksc";
  std::string domain;
  double floor = 1e-12;
  bool leave_one_out = false;
};

int do_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  apply_threads(a.common);
  const Method method = parse_method(a.method);
  const KernelSpec kernel = a.common.kernel_spec();
  const auto rule = bandwidth::Rule::parse(a.common.bandwidth);
  std::optional<Domain> domain;
  if (!a.domain.empty()) domain = parse_domain(a.domain);
  if (method == Method::ks_boundary && !domain)
    throw InvalidArgument("--method ks-boundary needs --domain for Q");

  const Table t = read_table(a.input, {"phi"}, {"pi"});
  if (domain && domain->dim() != t.dim)
    throw InvalidArgument("--domain has " + std::to_string(domain->dim()) + " intervals for " +
                          std::to_string(t.dim) + "-dimensional data");
  LabeledSample sample{Design(t.points, t.dim), t.columns.at("phi"), std::nullopt};
  if (t.columns.count("pi")) sample.known_density = t.columns.at("pi");
  if (method == Method::mc && !sample.known_density)
    throw DataError("'" + a.input + "' is missing the 'pi' column needed by --method mc");

  EstimateOptions opts;
  opts.density_floor = a.floor;
  opts.density.leave_one_out = a.leave_one_out;
  EstimateReport r;
  if (method == Method::mc) {
    r = estimate_mc(sample);
  } else {
    const Bandwidth h = bandwidth::select(rule, sample.design, kernel);
    if (method == Method::ks) r = estimate_ks(sample, kernel, h, opts);
    else if (method == Method::ks_corrected) r = estimate_ks_corrected(sample, kernel, h, opts);
    else r = estimate_ks_boundary(sample, kernel, h, *domain, opts);
  }

  json j;
  j["estimate"] = r.estimate;
  j["method"] = to_string(r.method);
  j["bandwidth"] = method == Method::mc ? json(nullptr) : bandwidth_json(r.bandwidth);
  j["n"] = r.n;
  j["d"] = r.d;
  j["min_density"] = r.min_density;
  j["clamped"] = r.clamped;
  j["negative_factors"] = r.negative_factors;
  j["warnings"] = r.warnings;
  j["config"] = {{"command", "estimate"},
                 {"input", a.input},
                 {"method", to_string(method)},
                 {"kernel", kernel.name()},
                 {"bandwidth_rule", rule.to_string()},
                 {"domain", domain ? domain->to_string() : std::string()},
                 {"density_floor", a.floor},
                 {"leave_one_out", a.leave_one_out}};
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  Sink sink(a.common.out, out);
  sink.get() << j.dump(2) << "\n";
  sink.finish(a.common.out);
  return kOk;
}

// bandwidth ----------------------------------------------------------------

struct BandwidthArgs {
  Common common;
  std::string input;
};

int do_bandwidth(const BandwidthArgs& a, std::ostream& out, std::ostream& err) {
  apply_threads(a.common);
  const KernelSpec kernel = a.common.kernel_spec();
  const auto rule = bandwidth::Rule::parse(a.common.bandwidth);
  const Table t = read_table(a.input, {}, {});
  const Design design(t.points, t.dim);
  const Bandwidth h = bandwidth::select(rule, design, kernel);
  if (h.fallback) err << "warning: " << h.warning << "\n";
  json j = bandwidth_json(h);
  j["n"] = design.size();
  j["d"] = design.dim();
  j["config"] = {{"command", "bandwidth"},
                 {"input", a.input},
                 {"kernel", kernel.name()},
                 {"bandwidth_rule", rule.to_string()}};
  Sink sink(a.common.out, out);
  sink.get() << j.dump(2) << "\n";
  sink.finish(a.common.out);
  return kOk;
}

// bench --------------------------------------------------------------------

struct BenchArgs {
  Common common;
  std::string models = "m1,m2,m3";
  std::string dims = "1,2,3";
  std::string sizes = "500,1000,2000";
  std::string designs = "iid,mh";
  std::string methods = "ks,ksc,mc";
  std::size_t replicates = 50;
  double epsilon = 0.2;
  std::size_t burn_in = 1000;
  bool full = false;
  std::string summary;
};

int do_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  apply_threads(a.common);
  bench::StudyConfig c;
  c.models = parse_list<bench::Model>(a.models, bench::parse_model);
  c.dims = parse_list<std::size_t>(a.dims, to_size);
  c.sizes = parse_list<std::size_t>(a.sizes, to_size);
  c.designs = parse_list<ChainKind>(a.designs, parse_chain_kind);
  c.methods = parse_list<Method>(a.methods, parse_method);
  c.replicates = a.replicates;
  c.seed = a.common.seed;
  c.kernel = a.common.kernel_spec();
  c.bandwidth = bandwidth::Rule::parse(a.common.bandwidth);
  c.epsilon = a.epsilon;
  c.burn_in = a.burn_in;
  c.full = a.full;
  c.validate();

  std::ostringstream header;
  header << "# mcquad bench models=" << a.models << " dims=" << a.dims << " sizes=" << a.sizes
         << " designs=" << a.designs << " methods=" << a.methods << " replicates=" << c.replicates
         << " seed=" << c.seed << " kernel=" << c.kernel.name() << " bandwidth=" << c.bandwidth.to_string()
         << " epsilon=" << fmt(c.epsilon) << " burn_in=" << c.burn_in << " full=" << (c.full ? 1 : 0)
         << "\n";
  for (auto d : c.dims)
    for (auto n : c.sizes)
      if (c.skipped(d, n)) err << "note: skipping d=" << d << " n=" << n << " cells (use --full)\n";

  const auto rows = bench::run_study(c);
  std::size_t failed = 0;
  for (const auto& r : rows)
    if (r.failed) ++failed;
  if (failed) err << "warning: " << failed << " of " << rows.size() << " rows failed\n";

  const std::string out_path = a.common.out.empty() ? "results.csv" : a.common.out;
  {
    Sink sink(out_path, out);
    sink.get() << header.str();
    bench::write_rows_csv(sink.get(), rows);
    sink.finish(out_path);
  }
  std::string summary_path = a.summary;
  if (summary_path.empty()) {
    summary_path = out_path == "-" ? std::string("summary.csv")
                                   : (std::filesystem::path(out_path).parent_path() / "summary.csv").string();
  }
  if (c.replicates < 2) {
    err << "note: summary needs >= 2 replicates; " << summary_path << " not written\n";
    return kOk;
  }
  const auto cells = bench::summarize(rows);
  Sink sink(summary_path, out);
  sink.get() << header.str();
  bench::write_summary_csv(sink.get(), cells);
  sink.finish(summary_path);
  return kOk;
}

// regen --------------------------------------------------------------------

struct RegenArgs {
  Common common;
  double lambda0 = 0.5;
  std::size_t n = 100000;
  double p = 2.0;
  std::string g = "half";
  std::size_t burn_in = 1000;
};

int do_regen(const RegenArgs& a, std::ostream& out, std::ostream& err) {
  apply_threads(a.common);
  ChainConfig c;
  c.kind = ChainKind::doeblin_mixture;
  c.lambda0 = a.lambda0;
  c.seed = a.common.seed;
  c.burn_in = a.burn_in;
  c.validate();
  const auto g = regen::parse_test_function(a.g);
  const auto trace = regen::split_simulate(c, a.n);
  const auto blocks = trace.blocks();

  json j;
  j["n"] = a.n;
  j["visits"] = trace.visits();
  j["visit_rate"] = static_cast<double>(trace.visits()) / static_cast<double>(a.n);
  j["blocks"] = blocks.size();
  const auto kac = regen::kac_check(trace, g);
  j["kac"] = {{"g", regen::to_string(g)},
              {"lhs", kac.lhs},
              {"rhs", kac.rhs},
              {"rel_err", kac.rel_err},
              {"alpha0_hat", kac.alpha0_hat},
              {"alpha0", 1.0 / c.lambda0}};
  const auto m = regen::return_time_moments(trace, a.p);
  j["moments"] = {{"p", m.p},
                  {"theta_moment", m.theta_moment},
                  {"xi_hat", m.xi_hat},
                  {"bound", m.bound},
                  {"bound_holds", m.bound_holds}};
  try {
    const auto ind = regen::block_independence_check(trace);
    j["independence"] = {{"sum_correlation", ind.sum_correlation},
                         {"length_correlation", ind.length_correlation},
                         {"band", ind.band},
                         {"blocks", ind.blocks},
                         {"independent", ind.independent}};
  } catch (const InsufficientBlocks& e) {
    j["independence"] = nullptr;
    err << "warning: " << e.what() << "\n";
  }
  j["config"] = {{"command", "regen"},
                 {"lambda0", c.lambda0},
                 {"residual_halfwidth", c.residual_halfwidth},
                 {"n", a.n},
                 {"p", a.p},
                 {"g", regen::to_string(g)},
                 {"burn_in", c.burn_in},
                 {"seed", c.seed}};
  Sink sink(a.common.out, out);
  sink.get() << j.dump(2) << "\n";
  sink.finish(a.common.out);
  return kOk;
}

// ocean --------------------------------------------------------------------

struct OceanArgs {
  Common common;
  std::string input;
  std::string band = "equatorial";
  std::string lon;
  std::optional<int> year;
  std::optional<int> month;
  bool all_months = false;
  bool strict = false;
  double margin = 5.0;
  bool no_wrap = false;
  std::size_t min_records = 30;
};

int do_ocean(const OceanArgs& a, std::ostream& out, std::ostream& err) {
  apply_threads(a.common);
  if (a.month.has_value() == a.all_months)
    throw InvalidArgument("give exactly one of --month or --all-months");
  if (a.month && (*a.month < 1 || *a.month > 12)) throw InvalidArgument("--month must be 1..12");
  geo::BandSpec band = geo::parse_band(a.band);
  if (!a.lon.empty()) {
    const auto parts = split(a.lon, ':');
    if (parts.size() != 2) throw InvalidArgument("--lon looks like lo:hi");
    band.lon_min = to_double(parts[0], "longitude");
    band.lon_max = to_double(parts[1], "longitude");
  }
  band.validate();
  geo::BandOptions opts;
  opts.kernel = a.common.kernel_spec();
  opts.bandwidth = bandwidth::Rule::parse(a.common.bandwidth);
  opts.min_records = a.min_records;
  opts.margin = a.margin;
  opts.periodic_lon = !a.no_wrap;

  const auto data = geo::ingest_file(a.input, a.strict);
  for (const auto& w : data.warnings) err << "warning: " << w << "\n";
  if (data.skipped) {
    err << "warning: skipped " << data.skipped << " malformed rows\n";
    for (const auto& p : data.problems) err << "  " << p << "\n";
  }
  const auto series = geo::band_series(data.records, band, a.year, a.month, opts);
  for (const auto& s : series.skipped) err << "skipped: " << s << "\n";
  if (series.rows.empty())
    throw InsufficientSample("no (year, month) cell of band " + band.name + " could be estimated");

  Sink sink(a.common.out, out);
  auto& os = sink.get();
  os << "# mcquad ocean input=" << a.input << " band=" << band.name << " lat=" << fmt(band.lat_min) << ":"
     << fmt(band.lat_max) << " lon=" << fmt(band.lon_min) << ":" << fmt(band.lon_max)
     << " year=" << (a.year ? std::to_string(*a.year) : "all")
     << " month=" << (a.month ? std::to_string(*a.month) : "all") << " kernel=" << opts.kernel.name()
     << " bandwidth=" << opts.bandwidth.to_string() << " margin=" << fmt(opts.margin)
     << " periodic_lon=" << (opts.periodic_lon ? 1 : 0) << " min_records=" << opts.min_records << "\n";
  geo::write_series_csv(os, series.rows);
  sink.finish(a.common.out);
  return kOk;
}

int code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::usage: return kUsage;
    case ErrorKind::data: return kData;
    case ErrorKind::numerical: return kNumerical;
  }
  return kInternal;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel-smoothing integration with Markov designs", "mcquad"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", "mcquad 0.1.0");

  std::uint64_t seed0 = 1;
  try {
    seed0 = default_seed();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  SimulateArgs sim;
  sim.common.seed = seed0;
  auto* s = app.add_subcommand("simulate", "Emit a design trajectory as CSV");
  add_threads(s, sim.common);
  add_seed(s, sim.common);
  s->add_option("--design", sim.design, "iid|mh|mixture|smooth");
  s->add_option("--n", sim.n, "Number of states");
  s->add_option("--dim", sim.dim, "Dimension of the unit cube (ignored with --domain)");
  s->add_option("--domain", sim.domain, "lo1:hi1,lo2:hi2,...");
  s->add_option("--epsilon", sim.epsilon, "MH proposal half-width");
  s->add_option("--lambda0", sim.lambda0, "Mixture weight of the regeneration measure");
  s->add_option("--burn-in", sim.burn_in, "Discarded initial steps");
  s->add_option("--out", sim.common.out, "Output CSV (default stdout)");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Estimate an integral from a labeled sample");
  add_threads(e, est.common);
  add_kernel(e, est.common);
  e->add_option("--input", est.input, "CSV with header x1,...,xd,phi[,pi]")->required();
  e->add_option("--method", est.method, "ks|ksc|mc|ks-boundary");
  e->add_option("--domain", est.domain, "Q as lo1:hi1,...; required by ks-boundary");
  e->add_option("--floor", est.floor, "Density floor");
  e->add_flag("--leave-one-out", est.leave_one_out, "Drop the self-term from the density estimate");
  e->add_option("--out", est.common.out, "Output JSON (default stdout)");

  BandwidthArgs bw;
  auto* b = app.add_subcommand("bandwidth", "Select a bandwidth for a design");
  add_threads(b, bw.common);
  add_kernel(b, bw.common);
  b->add_option("--input", bw.input, "CSV with header x1,...,xd")->required();
  b->add_option("--out", bw.common.out, "Output JSON (default stdout)");

  BenchArgs be;
  be.common.seed = seed0;
  auto* bn = app.add_subcommand("bench", "Run the replicated simulation study");
  add_threads(bn, be.common);
  add_seed(bn, be.common);
  add_kernel(bn, be.common);
  bn->add_option("--models", be.models, "Comma list of m1,m2,m3");
  bn->add_option("--dims", be.dims, "Comma list of dimensions in 1..3");
  bn->add_option("--sizes", be.sizes, "Comma list of sample sizes");
  bn->add_option("--designs", be.designs, "Comma list of iid,mh,mixture");
  bn->add_option("--methods", be.methods, "Comma list of ks,ksc,mc");
  bn->add_option("--replicates", be.replicates, "Replicates per cell");
  bn->add_option("--epsilon", be.epsilon, "MH proposal half-width");
  bn->add_option("--burn-in", be.burn_in, "Discarded initial steps");
  bn->add_flag("--full", be.full, "Include the d=3, n>=2000 cells");
  bn->add_option("--out", be.common.out, "Results CSV (default results.csv)");
  bn->add_option("--summary", be.summary, "Summary CSV (default summary.csv next to --out)");

  RegenArgs rg;
  rg.common.seed = seed0;
  auto* r = app.add_subcommand("regen", "Regeneration diagnostics of the split mixture chain");
  add_threads(r, rg.common);
  add_seed(r, rg.common);
  r->add_option("--lambda0", rg.lambda0, "Mixture weight of the regeneration measure");
  r->add_option("--n", rg.n, "Chain length");
  r->add_option("--p", rg.p, "Return-time moment order in [1,6]");
  r->add_option("--g", rg.g, "Kac test function: one|half|x");
  r->add_option("--burn-in", rg.burn_in, "Discarded initial steps");
  r->add_option("--out", rg.common.out, "Output JSON (default stdout)");

  OceanArgs oc;
  auto* o = app.add_subcommand("ocean", "Monthly band averages of observed temperatures");
  add_threads(o, oc.common);
  add_kernel(o, oc.common);
  o->add_option("--input", oc.input, "CSV with header date,lat,lon,sst")->required();
  o->add_option("--band", oc.band, "Preset name or lo:hi latitude");
  o->add_option("--lon", oc.lon, "Longitude range lo:hi");
  o->add_option("--year", oc.year, "Restrict to one year");
  auto* month = o->add_option("--month", oc.month, "Month 1..12");
  auto* all = o->add_flag("--all-months", oc.all_months, "Every month present");
  month->excludes(all);
  o->add_flag("--strict", oc.strict, "Fail on the first malformed row");
  o->add_option("--margin", oc.margin, "Degrees around the band used for the density only");
  o->add_flag("--no-wrap", oc.no_wrap, "Do not treat longitude as periodic");
  o->add_option("--min-records", oc.min_records, "Minimum in-band records per cell");
  o->add_option("--out", oc.common.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "mcquad 0.1.0\n";
    return kOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  try {
    if (s->parsed()) return do_simulate(sim, out);
    if (e->parsed()) return do_estimate(est, out, err);
    if (b->parsed()) return do_bandwidth(bw, out, err);
    if (bn->parsed()) return do_bench(be, out, err);
    if (r->parsed()) return do_regen(rg, out, err);
    if (o->parsed()) return do_ocean(oc, out, err);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return code_for(ex);
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace mcquad::cli
