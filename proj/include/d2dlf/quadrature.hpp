#pragma once

#include <cmath>
#include <functional>

namespace d2dlf {

// Adaptive Gauss-Kronrod (G7/K15) integration on a finite interval.
// Bisects until the K15-G7 error estimate of every panel is below
// max(abs_tol, rel_tol*|I|) shared proportionally across panels.
namespace quad {

struct Panel {
  double value;
  double error;
};

namespace detail {

// QUADPACK 15-point Kronrod abscissae/weights and embedded 7-point Gauss
// weights on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double kronrod = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kronrod += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  return {kronrod * h, std::abs(kronrod - gauss) * h};
}

template <class F>
void refine(const F& f, double a, double b, Panel p, double tol, int depth,
            double& total, double& err) {
  if (p.error <= tol * (b - a) || depth >= 48) {
    total += p.value;
    err += p.error;
    return;
  }
  const double c = 0.5 * (a + b);
  refine(f, a, c, gk15(f, a, c), tol, depth + 1, total, err);
  refine(f, c, b, gk15(f, c, b), tol, depth + 1, total, err);
}

}  // namespace detail

// Integrate f over [a, b]. Tolerances follow the library-wide defaults
// (abs 1e-9, rel 1e-7).
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-9,
                 double rel_tol = 1e-7) {
  if (!(b > a)) return 0.0;
  Panel first = detail::gk15(f, a, b);
  double tol =
      std::max(abs_tol, rel_tol * std::abs(first.value)) / (b - a);
  double total = 0.0, err = 0.0;
  detail::refine(f, a, b, first, tol, 0, total, err);
  return total;
}

}  // namespace quad
}  // namespace d2dlf
