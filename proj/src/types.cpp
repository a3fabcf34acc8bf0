#include "mcquad/types.hpp"

#include <cmath>
#include <sstream>

#include "mcquad/error.hpp"

namespace mcquad {

Design::Design(std::vector<double> points, std::size_t dim)
    : points_(std::move(points)), dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("design dimension must be >= 1");
  if (points_.empty()) throw InvalidArgument("design must contain at least one point");
  if (points_.size() % dim_ != 0)
    throw InvalidArgument("design buffer size is not a multiple of the dimension");
  for (double v : points_)
    if (!std::isfinite(v)) throw InvalidArgument("design contains a non-finite coordinate");
}

Design Design::subset(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return Design(std::move(out), dim_);
}

Domain::Domain(std::vector<double> lower, std::vector<double> upper, double margin)
    : lower_(std::move(lower)), upper_(std::move(upper)), margin_(margin) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw InvalidArgument("domain bounds must be non-empty and of equal dimension");
  for (std::size_t j = 0; j < lower_.size(); ++j)
    if (!(lower_[j] < upper_[j]) || !std::isfinite(lower_[j]) || !std::isfinite(upper_[j]))
      throw InvalidArgument("domain requires finite lower < upper in every coordinate");
  if (!(margin_ >= 0.0) || !std::isfinite(margin_))
    throw InvalidArgument("domain margin must be finite and >= 0");
}

Domain Domain::unit(std::size_t dim) {
  return Domain(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

double Domain::measure() const {
  double m = 1.0;
  for (std::size_t j = 0; j < lower_.size(); ++j) m *= upper_[j] - lower_[j];
  return m;
}

bool Domain::contains(std::span<const double> x) const {
  for (std::size_t j = 0; j < lower_.size(); ++j)
    if (x[j] < lower_[j] || x[j] > upper_[j]) return false;
  return true;
}

Domain Domain::enlarged() const {
  auto lo = lower_, hi = upper_;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    lo[j] -= margin_;
    hi[j] += margin_;
  }
  return Domain(std::move(lo), std::move(hi));
}

std::string Domain::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < lower_.size(); ++j)
    os << (j ? "," : "") << lower_[j] << ':' << upper_[j];
  return os.str();
}

Bandwidth::Bandwidth(std::vector<double> h, BandwidthSource src)
    : scales(std::move(h)), source(src) {
  validate();
}

Bandwidth Bandwidth::scalar(double h, std::size_t dim) {
  return Bandwidth(std::vector<double>(dim, h));
}

double Bandwidth::product() const {
  double p = 1.0;
  for (double h : scales) p *= h;
  return p;
}

void Bandwidth::validate(std::size_t dim) const {
  if (scales.empty()) throw InvalidBandwidth("bandwidth has no entries");
  if (dim != 0 && scales.size() != dim)
    throw InvalidBandwidth("bandwidth dimension " + std::to_string(scales.size()) +
                           " does not match data dimension " + std::to_string(dim));
  for (std::size_t j = 0; j < scales.size(); ++j)
    if (!(scales[j] > 0.0) || !std::isfinite(scales[j]))
      throw InvalidBandwidth("bandwidth entry " + std::to_string(j) +
                             " must be positive and finite");
}

const char* to_string(BandwidthSource s) {
  switch (s) {
    case BandwidthSource::user: return "user";
    case BandwidthSource::normal_scale: return "normal_scale";
    case BandwidthSource::plugin: return "plugin";
  }
  return "?";
}

}  // namespace mcquad
