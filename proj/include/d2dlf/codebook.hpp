#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace d2dlf {

// Transmission tuple for one cellular quantization region: transmit power
// and secrecy rate. The transmission rate r_bc and equivocation rate
// r_e = r_bc - r_s_bc are derived from the region's lower boundary.
struct CellularCodeword {
  double p_bc = 0.0;    // linear power, >= 0
  double r_s_bc = 0.0;  // bits/s/Hz, >= 0
};

struct D2DCodeword {
  double p_dd = 0.0;  // linear power, >= 0
};

// Quantization boundaries plus per-region codewords for both links.
//
// Index convention: regions are 0-based, 0..M-1; region 0 is
// [0, boundary(1)) and carries no codeword (it is silent), regions
// 1..M-1 map to bc_words[m-1]. The top boundary is implicitly infinite
// and never stored.
struct Codebook {
  std::vector<double> bc_boundaries;  // ascending, strictly positive, size M-1
  std::vector<double> dd_boundaries;  // ascending, strictly positive, size N-1
  std::vector<CellularCodeword> bc_words;  // size M-1, word for region m=1..M-1
  std::vector<D2DCodeword> dd_words;       // size N-1

  std::size_t num_bc_regions() const { return bc_boundaries.size() + 1; }  // M
  std::size_t num_dd_regions() const { return dd_boundaries.size() + 1; }  // N

  // lower boundary of region m (m=0 -> 0)
  double bc_lower(std::size_t m) const { return m == 0 ? 0.0 : bc_boundaries[m - 1]; }
  double dd_lower(std::size_t n) const { return n == 0 ? 0.0 : dd_boundaries[n - 1]; }
  // upper boundary of region m (+inf for the top region)
  double bc_upper(std::size_t m) const;
  double dd_upper(std::size_t n) const;

  // codeword accessors for regions 1..M-1 / 1..N-1; region 0 yields the
  // silent tuple (p=0, rates 0)
  double p_bc(std::size_t m) const { return m == 0 ? 0.0 : bc_words[m - 1].p_bc; }
  double r_s_bc(std::size_t m) const { return m == 0 ? 0.0 : bc_words[m - 1].r_s_bc; }
  double p_dd(std::size_t n) const { return n == 0 ? 0.0 : dd_words[n - 1].p_dd; }
  double r_bc(std::size_t m) const;  // log2(1 + boundary(m) * p_bc(m))
  double r_dd(std::size_t n) const;  // log2(1 + boundary(n) * p_dd(n))
  double r_e(std::size_t m) const { return r_bc(m) - r_s_bc(m); }
};

// Power/rate/outage limits of problem constraints.
struct Constraints {
  double r_s_c_min = 0.1;   // bits/s/Hz
  double outage_max = 0.1;  // probability
  double p_c_max = 1.0;     // linear
  double p_d_max = 1.0;     // linear

  void validate() const;
};

struct Violation {
  std::string what;
  int index = -1;
};

// Returns m such that h falls in [boundary(m), boundary(m+1)); NaN throws.
std::size_t region_index(const std::vector<double>& boundaries, double h);

// Pr(h in [lo, hi)) for an exponential gain; hi may be +inf.
double region_probability(double mean, double lo, double hi);

// Checks every Codebook invariant; violations are returned, not thrown.
// max_rate_guard flags implausibly large derived rates (optimizer escapes).
std::vector<Violation> validate(const Codebook& cb, double max_rate_guard = 64.0);

// Structured-text (JSON) serialization; values survive a round trip
// bit-exactly.
std::string serialize(const Codebook& cb);
Codebook deserialize(const std::string& text);
Codebook load_codebook(const std::string& path);
void save_codebook(const Codebook& cb, const std::string& path);

}  // namespace d2dlf
