#pragma once

#include <cstdint>

#include "d2dlf/rng.hpp"

namespace d2dlf {

// Geometry of a single link; the mean channel gain follows
// sigma = s * (d/d0)^(-gamma) with log-normal shadowing s.
struct LinkGeometry {
  double distance = 1.0;            // meters, > 0
  double reference_distance = 1.0;  // meters, > 0
  double pathloss_exponent = 4.0;   // >= 0
  double shadowing_db_sigma = 8.0;  // dB, >= 0

  void validate() const;
};

// Noise-normalized mean channel power gains of the six links
// (BS->CU, BS->RD2D, TD2D->RD2D, TD2D->CU, BS->Eve, TD2D->Eve).
struct ChannelStats {
  double mean_bc = 1.0;
  double mean_bd = 1.0;
  double mean_dd = 1.0;
  double mean_dc = 1.0;
  double mean_be = 1.0;
  double mean_de = 1.0;

  void validate() const;
};

// One instantaneous fading state.
struct ChannelSample {
  double h_bc, h_bd, h_dd, h_dc, h_be, h_de;
};

// Exponential pdf (1/mean) * exp(-h/mean); throws on mean <= 0.
double exp_pdf(double h, double mean);

// s = 10^(shadow_db/10); returns s * (d/d0)^(-gamma).
double mean_from_geometry(const LinkGeometry& geo, double shadowing_draw_db);

// Six independent exponential draws with the configured means.
ChannelSample sample(const ChannelStats& stats, RngStream& rng);

}  // namespace d2dlf
