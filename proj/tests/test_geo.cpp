#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "mcquad/error.hpp"
#include "mcquad/geo.hpp"

using namespace mcquad;
using namespace mcquad::geo;

namespace {

// iid records over lat [lat_lo, lat_hi] and all longitudes.
std::vector<ObsRecord> field(std::size_t n, std::uint64_t seed, double lat_lo, double lat_hi,
                             double (*f)(double, double), int month = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(lat_lo, lat_hi), lon(-180.0, 180.0);
  std::vector<ObsRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    ObsRecord r;
    r.date = Date{2020, month, 15};
    r.lat = lat(rng);
    r.lon = lon(rng);
    if (r.lon == -180.0) r.lon = 180.0;
    r.value = f(r.lat, r.lon);
    out.push_back(r);
  }
  return out;
}

double constant(double, double) { return 15.0; }
double linear(double lat, double) { return 30.0 - 0.5 * lat; }

}  // namespace

TEST_CASE("dates") {
  CHECK(parse_date("2020-02-29") == Date{2020, 2, 29});
  CHECK_FALSE(parse_date("2019-02-29"));
  CHECK_FALSE(parse_date("2020-13-01"));
  CHECK_FALSE(parse_date("2020-1-01"));
  CHECK_FALSE(parse_date("01/02/2020"));
}

TEST_CASE("ingesting rows") {
  std::istringstream in("date,lat,lon,sst\n2020-01-15,10.5,-30.25,26.1\n\n2020-01-16,95,0,20\n");
  const auto r = ingest(in);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].date == Date{2020, 1, 15});
  CHECK(r.records[0].lat == 10.5);
  CHECK(r.records[0].lon == -30.25);
  CHECK(r.records[0].value == 26.1);
  CHECK(r.skipped == 1);
  REQUIRE(r.problems.size() == 1);
  CHECK(r.problems[0].find("line 4") != std::string::npos);

  std::istringstream strict("date,lat,lon,sst\n2020-01-16,95,0,20\n");
  CHECK_THROWS_AS(ingest(strict, true), DataError);

  std::istringstream reordered("sst,lon,lat,date\n20,1,2,2021-06-01\n");
  const auto o = ingest(reordered);
  REQUIRE(o.records.size() == 1);
  CHECK(o.records[0].lat == 2.0);

  std::istringstream empty("");
  const auto e = ingest(empty);
  CHECK(e.records.empty());
  CHECK_FALSE(e.warnings.empty());

  std::istringstream missing("date,lat,lon\n2020-01-15,1,2\n");
  try {
    ingest(missing);
    FAIL("expected an error");
  } catch (const DataError& err) {
    CHECK(std::string(err.what()).find("sst") != std::string::npos);
  }
}

TEST_CASE("preset bands partition the latitudes") {
  const auto& bands = preset_bands();
  REQUIRE(bands.size() == 7);
  CHECK(bands.front().lat_min == -90.0);
  CHECK(bands.back().lat_max == 90.0);
  for (std::size_t i = 1; i < bands.size(); ++i) CHECK(bands[i].lat_min == bands[i - 1].lat_max);
  for (double lat = -90.0; lat <= 90.0; lat += 0.5) {
    int hits = 0;
    for (const auto& b : bands) hits += b.contains(lat, 0.0);
    REQUIRE(hits == 1);
  }
  // Shared edges belong to the lower band.
  CHECK(parse_band("equatorial").contains(10.0, 0.0));
  CHECK_FALSE(parse_band("n-tropical").contains(10.0, 0.0));
  CHECK(parse_band("south").contains(-90.0, 0.0));

  const auto custom = parse_band("-5:5");
  CHECK(custom.lat_min == -5.0);
  CHECK(custom.area() == doctest::Approx(3600.0));
  CHECK_THROWS_AS(parse_band("tropics"), InvalidArgument);
  CHECK_THROWS_AS(parse_band("5:-5"), InvalidArgument);
}

TEST_CASE("constant field") {
  // Design reaching past both band edges; the self-term is dropped because
  // its upward bias is of the order of the tolerance at this n.
  const auto records = field(4000, 1, 0.0, 40.0, constant);
  BandOptions opt;
  opt.estimate.density.leave_one_out = true;
  const auto r = monthly_band_average(records, parse_band("n-tropical"), 2020, 1, opt);
  CHECK(r.average == doctest::Approx(15.0).epsilon(0.1 / 15.0));
  CHECK(r.n_design > r.n);
  CHECK(r.n > 1500);
}

TEST_CASE("linear field in latitude") {
  const auto records = field(4000, 2, 0.0, 40.0, linear);
  const auto r = monthly_band_average(records, parse_band("n-tropical"), 2020, 1);
  CHECK(std::abs(r.average - 20.0) <= 0.5);
}

TEST_CASE("band averages ignore other months and are deterministic") {
  auto records = field(1500, 3, 0.0, 40.0, linear);
  const auto other = field(500, 4, 0.0, 40.0, constant, 2);
  records.insert(records.end(), other.begin(), other.end());
  const auto band = parse_band("n-tropical");
  const auto a = monthly_band_average(records, band, 2020, 1);
  const auto b = monthly_band_average(field(1500, 3, 0.0, 40.0, linear), band, 2020, 1);
  CHECK(a.average == b.average);
  CHECK(a.n == b.n);
  CHECK_THROWS_AS(monthly_band_average(records, band, 2020, 3), InsufficientSample);
  try {
    monthly_band_average(records, band, 2021, 1);
  } catch (const InsufficientSample& e) {
    CHECK(std::string(e.what()).find("2021") != std::string::npos);
  }
  BandOptions bad;
  bad.margin = -1.0;
  CHECK_THROWS_AS(monthly_band_average(records, band, 2020, 1, bad), InvalidArgument);
}

TEST_CASE("series and csv") {
  auto records = field(600, 5, 0.0, 40.0, linear, 1);
  const auto feb = field(600, 6, 0.0, 40.0, linear, 2);
  records.insert(records.end(), feb.begin(), feb.end());
  records.push_back(ObsRecord{Date{2020, 3, 1}, 20.0, 0.0, 10.0});

  const auto s = band_series(records, parse_band("n-tropical"), std::nullopt, std::nullopt);
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].month == 1);
  CHECK(s.rows[1].month == 2);
  REQUIRE(s.skipped.size() == 1);

  const auto only = band_series(records, parse_band("n-tropical"), 2020, 2);
  REQUIRE(only.rows.size() == 1);
  CHECK(only.rows[0].average == s.rows[1].average);

  std::ostringstream out;
  write_series_csv(out, s.rows);
  const std::string text = out.str();
  CHECK(text.rfind("year,month,band,n,average_c,bandwidth,clamped\n", 0) == 0);
  CHECK(text.find("2020,2,n-tropical,") != std::string::npos);
}
