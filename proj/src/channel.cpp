#include "d2dlf/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace d2dlf {

void LinkGeometry::validate() const {
  if (!(distance > 0.0)) throw std::domain_error("LinkGeometry: distance must be > 0");
  if (!(reference_distance > 0.0))
    throw std::domain_error("LinkGeometry: reference_distance must be > 0");
  if (pathloss_exponent < 0.0)
    throw std::domain_error("LinkGeometry: pathloss_exponent must be >= 0");
  if (shadowing_db_sigma < 0.0)
    throw std::domain_error("LinkGeometry: shadowing_db_sigma must be >= 0");
}

void ChannelStats::validate() const {
  const double m[6] = {mean_bc, mean_bd, mean_dd, mean_dc, mean_be, mean_de};
  for (double v : m) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::domain_error("ChannelStats: all means must be positive and finite");
  }
}

double exp_pdf(double h, double mean) {
  if (!(mean > 0.0)) throw std::domain_error("exp_pdf: mean must be > 0");
  if (h < 0.0) return 0.0;
  return std::exp(-h / mean) / mean;
}

double mean_from_geometry(const LinkGeometry& geo, double shadowing_draw_db) {
  geo.validate();
  const double s = std::pow(10.0, shadowing_draw_db / 10.0);
  return s * std::pow(geo.distance / geo.reference_distance, -geo.pathloss_exponent);
}

ChannelSample sample(const ChannelStats& stats, RngStream& rng) {
  ChannelSample out;
  out.h_bc = rng.exponential(stats.mean_bc);
  out.h_bd = rng.exponential(stats.mean_bd);
  out.h_dd = rng.exponential(stats.mean_dd);
  out.h_dc = rng.exponential(stats.mean_dc);
  out.h_be = rng.exponential(stats.mean_be);
  out.h_de = rng.exponential(stats.mean_de);
  return out;
}

}  // namespace d2dlf
