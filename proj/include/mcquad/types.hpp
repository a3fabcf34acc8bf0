#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mcquad {

// n x d design stored row-major; row i is the location X_i.
class Design {
 public:
  Design() = default;
  // Throws InvalidArgument unless points.size() == n*d, n >= 1, d >= 1 and
  // every entry is finite.
  Design(std::vector<double> points, std::size_t dim);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : points_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return points_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {points_.data() + i * dim_, dim_};
  }
  std::span<const double> data() const noexcept { return points_; }

  // Rows restricted to a subset of indices, in the given order.
  Design subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> points_;
  std::size_t dim_ = 0;
};

// Axis-aligned box Q, with an optional margin delta defining the enlarged box
// Q~ = [lower - delta, upper + delta].
class Domain {
 public:
  Domain(std::vector<double> lower, std::vector<double> upper, double margin = 0.0);
  static Domain unit(std::size_t dim);

  std::size_t dim() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  double margin() const noexcept { return margin_; }

  double measure() const;
  bool contains(std::span<const double> x) const;  // closed box
  Domain enlarged() const;                         // Q~ as a margin-free box

  std::string to_string() const;

 private:
  std::vector<double> lower_, upper_;
  double margin_ = 0.0;
};

enum class BandwidthSource { user, normal_scale, plugin };

// Per-dimension positive smoothing scales.
struct Bandwidth {
  std::vector<double> scales;
  BandwidthSource source = BandwidthSource::user;
  bool fallback = false;  // plug-in failed and normal_scale was returned
  std::string warning;

  Bandwidth() = default;
  explicit Bandwidth(std::vector<double> h, BandwidthSource src = BandwidthSource::user);
  static Bandwidth scalar(double h, std::size_t dim);

  std::size_t dim() const noexcept { return scales.size(); }
  double product() const;
  // Throws InvalidBandwidth if any entry is <= 0 or non-finite, or if the
  // dimension does not match `dim` (when dim != 0).
  void validate(std::size_t dim = 0) const;
};

const char* to_string(BandwidthSource s);

}  // namespace mcquad
