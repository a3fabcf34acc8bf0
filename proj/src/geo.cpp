#include "mcquad/geo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "mcquad/error.hpp"
#include "mcquad/parallel.hpp"

namespace mcquad::geo {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : days[m - 1];
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(sep, start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = parse_int(s.substr(0, 4)), m = parse_int(s.substr(5, 2)), d = parse_int(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  if (*m < 1 || *m > 12 || *d < 1 || *d > days_in_month(*y, *m)) return std::nullopt;
  return Date{*y, *m, *d};
}

IngestResult ingest(std::istream& in, bool strict) {
  IngestResult result;
  std::string line;
  if (!std::getline(in, line)) {
    result.warnings.push_back("input is empty; no records");
    return result;
  }
  const auto header = split(line, ',');
  std::vector<std::string> names;
  for (auto h : header) names.push_back(trim(h));
  auto column = [&](const char* name) -> std::size_t {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DataError(std::string("missing column '") + name + "' in header");
    return static_cast<std::size_t>(it - names.begin());
  };
  const std::size_t c_date = column("date"), c_lat = column("lat"), c_lon = column("lon"),
                    c_val = column("sst");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    std::string problem;
    ObsRecord rec;
    if (fields.size() != names.size()) {
      problem = "expected " + std::to_string(names.size()) + " fields";
    } else {
      const auto date = parse_date(trim(fields[c_date]));
      const auto lat = parse_double(fields[c_lat]);
      const auto lon = parse_double(fields[c_lon]);
      const auto val = parse_double(fields[c_val]);
      if (!date) problem = "bad date";
      else if (!lat || *lat < -90.0 || *lat > 90.0) problem = "latitude out of [-90, 90]";
      else if (!lon || *lon <= -180.0 || *lon > 180.0) problem = "longitude out of (-180, 180]";
      else if (!val) problem = "non-finite value";
      else rec = ObsRecord{*date, *lat, *lon, *val};
    }
    if (!problem.empty()) {
      const std::string msg = "line " + std::to_string(line_no) + ": " + problem;
      if (strict) throw DataError(msg);
      ++result.skipped;
      if (result.problems.size() < 20) result.problems.push_back(msg);
      continue;
    }
    result.records.push_back(rec);
  }
  if (result.records.empty()) result.warnings.push_back("no valid records");
  return result;
}

IngestResult ingest_file(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return ingest(in, strict);
}

bool BandSpec::contains(double lat, double lon) const {
  const bool lat_ok = (lat > lat_min || (lat_min <= -90.0 && lat == -90.0)) && lat <= lat_max;
  const bool lon_ok = (lon > lon_min || (lon_min <= -180.0 && lon == -180.0)) && lon <= lon_max;
  return lat_ok && lon_ok;
}

double BandSpec::area() const { return (lat_max - lat_min) * (lon_max - lon_min); }

Domain BandSpec::domain() const { return Domain({lon_min, lat_min}, {lon_max, lat_max}); }

void BandSpec::validate() const {
  if (!(lat_min < lat_max) || lat_min < -90.0 || lat_max > 90.0)
    throw InvalidArgument("band needs -90 <= lat_min < lat_max <= 90");
  if (!(lon_min < lon_max) || lon_min < -180.0 || lon_max > 180.0)
    throw InvalidArgument("band needs -180 <= lon_min < lon_max <= 180");
}

const std::vector<BandSpec>& preset_bands() {
  static const std::vector<BandSpec> bands{
      {"south", -90.0, -50.0},       {"s-temperate", -50.0, -30.0},
      {"s-tropical", -30.0, -10.0},  {"equatorial", -10.0, 10.0},
      {"n-tropical", 10.0, 30.0},    {"n-temperate", 30.0, 50.0},
      {"north", 50.0, 90.0},
  };
  return bands;
}

BandSpec parse_band(std::string_view s) {
  for (const auto& b : preset_bands())
    if (b.name == s) return b;
  const auto colon = s.find(':');
  if (colon != std::string_view::npos) {
    auto lo = parse_double(s.substr(0, colon)), hi = parse_double(s.substr(colon + 1));
    if (lo && hi) {
      BandSpec b{std::string(s), *lo, *hi};
      b.validate();
      return b;
    }
  }
  throw InvalidArgument("unknown band '" + std::string(s) + "' (preset name or lo:hi)");
}

BandAverage monthly_band_average(const std::vector<ObsRecord>& records, const BandSpec& band,
                                 int year, int month, const BandOptions& options) {
  band.validate();
  if (!(options.margin >= 0.0) || !std::isfinite(options.margin))
    throw InvalidArgument("band margin must be finite and >= 0");
  const bool full_lon = band.lon_min <= -180.0 && band.lon_max >= 180.0;
  const bool wrap = full_lon && options.periodic_lon;
  const double m = options.margin;
  const double lat_lo = std::max(-90.0, band.lat_min - m), lat_hi = std::min(90.0, band.lat_max + m);
  const double lon_lo = full_lon ? -180.0 : std::max(-180.0, band.lon_min - m);
  const double lon_hi = full_lon ? 180.0 : std::min(180.0, band.lon_max + m);

  std::vector<double> pts, values;
  std::vector<std::uint8_t> inside;
  for (const auto& r : records) {
    if (r.date.year != year || r.date.month != month) continue;
    if (r.lat < lat_lo || r.lat > lat_hi || r.lon < lon_lo || r.lon > lon_hi) continue;
    pts.push_back(r.lon);
    pts.push_back(r.lat);
    values.push_back(r.value);
    inside.push_back(band.contains(r.lat, r.lon) ? 1 : 0);
  }
  const auto n_in = static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1));
  char cell[96];
  std::snprintf(cell, sizeof cell, "%s %04d-%02d", band.name.c_str(), year, month);
  if (n_in < options.min_records || n_in < 2)
    throw InsufficientSample(std::string("cell ") + cell + " has " + std::to_string(n_in) +
                             " records, need " + std::to_string(options.min_records));
  const std::size_t n = values.size();
  const Design design(pts, 2);
  const Bandwidth h = bandwidth::select(options.bandwidth, design, options.kernel);

  if (wrap) {
    // Ghost copies one period either side; the estimate below divides by the
    // augmented count, which keeps it consistent for the real records.
    pts.reserve(6 * n);
    for (double shift : {-360.0, 360.0})
      for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(pts[2 * i] + shift);
        pts.push_back(pts[2 * i + 1]);
      }
    values.reserve(3 * n);
    inside.resize(3 * n, 0);
    for (int k = 0; k < 2; ++k)
      for (std::size_t i = 0; i < n; ++i) values.push_back(values[i]);
  }

  BandAverage out;
  out.band = band;
  out.year = year;
  out.month = month;
  out.n = n_in;
  out.n_design = n;
  const DesignWeights weights(wrap ? Design(std::move(pts), 2) : design, options.kernel, h, options.estimate);
  out.report = weights.restricted(values, inside, true);
  out.report.n = n;
  out.report.warnings.push_back(
      "band normalized by its full planar lon-lat rectangle (no land mask)");
  out.average = average_over(out.report, band.domain());
  return out;
}

SeriesResult band_series(const std::vector<ObsRecord>& records, const BandSpec& band,
                         std::optional<int> year, std::optional<int> month,
                         const BandOptions& options) {
  std::set<std::pair<int, int>> present;
  for (const auto& r : records) {
    if (year && r.date.year != *year) continue;
    if (month && r.date.month != *month) continue;
    if (band.contains(r.lat, r.lon)) present.insert({r.date.year, r.date.month});
  }
  if (year && month) present.insert({*year, *month});
  const std::vector<std::pair<int, int>> cells(present.begin(), present.end());
  std::vector<std::optional<BandAverage>> results(cells.size());
  std::vector<std::string> errors(cells.size());
  parallel_for(cells.size(), [&](std::size_t k) {
    try {
      results[k] = monthly_band_average(records, band, cells[k].first, cells[k].second, options);
    } catch (const Error& e) {
      errors[k] = e.what();
    }
  });
  SeriesResult out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (results[k]) out.rows.push_back(std::move(*results[k]));
    else out.skipped.push_back(errors[k]);
  }
  return out;
}

void write_series_csv(std::ostream& out, const std::vector<BandAverage>& rows) {
  out << "year,month,band,n,average_c,bandwidth,clamped\n";
  char buf[64];
  for (const auto& r : rows) {
    std::string h;
    for (std::size_t j = 0; j < r.report.bandwidth.scales.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", r.report.bandwidth.scales[j]);
      h += (j ? ";" : "") + std::string(buf);
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.average);
    out << r.year << ',' << r.month << ',' << r.band.name << ',' << r.n << ',' << buf << ',' << h
        << ',' << r.report.clamped << '\n';
  }
}

}  // namespace mcquad::geo
