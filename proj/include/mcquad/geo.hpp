#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcquad/bandwidth.hpp"
#include "mcquad/integrate.hpp"
#include "mcquad/kernels.hpp"

namespace mcquad::geo {

struct Date {
  int year = 0, month = 0, day = 0;
  friend bool operator==(const Date&, const Date&) = default;
};

// Strict ISO-8601 calendar date YYYY-MM-DD; nullopt when malformed.
std::optional<Date> parse_date(std::string_view s);

struct ObsRecord {
  Date date;
  double lat = 0.0;    // [-90, 90]
  double lon = 0.0;    // (-180, 180]
  double value = 0.0;  // degrees C
};

struct IngestResult {
  std::vector<ObsRecord> records;
  std::size_t skipped = 0;
  std::vector<std::string> problems;  // first few malformed rows, with line numbers
  std::vector<std::string> warnings;
};

// CSV with header date,lat,lon,sst. Lenient mode skips and counts malformed
// rows; strict mode throws DataError at the first one.
IngestResult ingest(std::istream& in, bool strict = false);
IngestResult ingest_file(const std::string& path, bool strict = false);

// Latitude band, half-open (lat_min, lat_max] so that shared edges go to the
// lower band; a band starting at -90 also contains -90. Longitudes likewise.
struct BandSpec {
  std::string name;
  double lat_min = -90.0, lat_max = 90.0;
  double lon_min = -180.0, lon_max = 180.0;

  bool contains(double lat, double lon) const;
  double area() const;  // degree^2, planar
  Domain domain() const;  // (lon, lat) box
  void validate() const;
};

// The seven preset bands, south to north: south, s-temperate, s-tropical,
// equatorial, n-tropical, n-temperate, north.
const std::vector<BandSpec>& preset_bands();
// A preset name or "lo:hi" in degrees of latitude.
BandSpec parse_band(std::string_view s);

struct BandAverage {
  BandSpec band;
  int year = 0, month = 0;
  std::size_t n = 0;        // in-band records
  std::size_t n_design = 0; // records used for the density, before wrapping
  double average = 0.0;  // degrees C
  EstimateReport report;
};

struct BandOptions {
  KernelSpec kernel;
  bandwidth::Rule bandwidth;
  std::size_t min_records = 30;
  // Records this many degrees outside the band enter the density estimate but
  // not the numerator. 0 uses in-band records only.
  double margin = 5.0;
  // A band spanning all longitudes is treated as periodic in longitude, so
  // the cut at +-180 is not an edge.
  bool periodic_lon = true;
  EstimateOptions estimate;
};

// Corrected kernel-smoothing estimate of the integral of the observed field
// over the band, for one calendar month, divided by the band area. The design
// is the (lon, lat) of in-month records in the band widened by the margin;
// only in-band records are summed. Throws InsufficientSample naming the cell
// when fewer than min_records in-band records qualify.
BandAverage monthly_band_average(const std::vector<ObsRecord>& records, const BandSpec& band,
                                 int year, int month, const BandOptions& options = {});

struct SeriesResult {
  std::vector<BandAverage> rows;
  std::vector<std::string> skipped;  // cells that could not be estimated, with reasons
};

// All (year, month) cells present in the records for the band, optionally
// restricted to one year and/or month. Cells run concurrently; output is
// sorted by (year, month).
SeriesResult band_series(const std::vector<ObsRecord>& records, const BandSpec& band,
                         std::optional<int> year, std::optional<int> month,
                         const BandOptions& options = {});

void write_series_csv(std::ostream& out, const std::vector<BandAverage>& rows);

}  // namespace mcquad::geo
