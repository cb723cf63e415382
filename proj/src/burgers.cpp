#include <algorithm>
#include <cmath>
#include <limits>

#include "vpbwave/waves.hpp"

namespace vpb {
namespace {

struct Tanh {
  double mid;
  double amp;
  double w0(double x0) const { return mid + amp * std::tanh(x0); }
  double w0p(double x0) const {
    const double c = std::cosh(x0);
    return std::isfinite(c) ? amp / (c * c) : 0.0;
  }
  double w0pp(double x0) const { return -2.0 * w0p(x0) * std::tanh(x0); }
};

Tanh initial_data(const BurgersWave& w) { return {0.5 * (w.w_r + w.w_l), 0.5 * (w.w_r - w.w_l)}; }

}  // namespace

double burgers_foot(double x, double t, const BurgersWave& wave) {
  const Tanh f = initial_data(wave);
  if (t <= 0.0 || f.amp == 0.0) return x - f.mid * std::max(t, 0.0);
  // x0 + w0(x0) t = x; the root lies in [x - t w_r, x - t w_l].
  double lo = x - t * std::max(wave.w_l, wave.w_r);
  double hi = x - t * std::min(wave.w_l, wave.w_r);
  double x0 = x - t * f.mid;
  // safeguarded Newton, stopped on the residual
  const double ftol = 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(x) + t * std::abs(f.mid) + t * std::abs(f.amp) + 1.0);
  // Newton can ping-pong between the bracket ends on the tanh shoulders, so
  // bisect whenever the bracket failed to halve since the last check.
  double width = hi - lo;
  for (int it = 0; it < 400; ++it) {
    const double F = x0 + f.w0(x0) * t - x;
    if (std::abs(F) <= ftol) break;
    if (F > 0.0) hi = x0; else lo = x0;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x0))) break;
    const double dF = 1.0 + t * f.w0p(x0);
    double next = x0 - F / dF;
    const bool slow = it % 2 == 1 && hi - lo > 0.5 * width;
    if (it % 2 == 1) width = hi - lo;
    if (slow || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x0 = next;
  }
  return x0;
}

double burgers_w(double x, double t, const BurgersWave& wave) {
  return initial_data(wave).w0(burgers_foot(x, t, wave));
}

double burgers_wx(double x, double t, const BurgersWave& wave) {
  const Tanh f = initial_data(wave);
  const double d = f.w0p(burgers_foot(x, t, wave));
  return d / (1.0 + t * d);
}

double burgers_wxx(double x, double t, const BurgersWave& wave) {
  const Tanh f = initial_data(wave);
  const double x0 = burgers_foot(x, t, wave);
  const double g = 1.0 + t * f.w0p(x0);
  return f.w0pp(x0) / (g * g * g);
}

double burgers_riemann(double xi, const BurgersWave& wave) {
  return std::clamp(xi, std::min(wave.w_l, wave.w_r), std::max(wave.w_l, wave.w_r));
}

}  // namespace vpb
