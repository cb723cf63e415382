#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "vpbwave/errors.hpp"
#include "vpbwave/waves.hpp"

namespace vpb {

double TransportModel::mu(double theta) const { return mu0 * std::sqrt(theta); }
double TransportModel::kappa(double theta) const { return kappa0 * std::sqrt(theta); }
double TransportModel::kappa1(double theta) const { return kappa1_0 * std::sqrt(theta); }
double TransportModel::dkappa(double theta) const { return 0.5 * kappa0 / std::sqrt(theta); }

double ContactProfile::a(double theta) const {
  return 9.0 * p_star * transport.kappa(theta) / (10.0 * theta);
}

double ContactProfile::da(double theta) const {
  return 9.0 * p_star * (transport.dkappa(theta) * theta - transport.kappa(theta)) / (10.0 * theta * theta);
}

double ContactProfile::delta() const { return std::abs(theta_plus_star - theta_minus_star); }

bool ContactProfile::trivial() const { return eta.size() < 2 || theta_plus_star == theta_minus_star; }

namespace {

struct Half {
  std::vector<double> theta;  // outward from eta = 0
  std::vector<double> q;
  std::vector<double> inc;    // Theta increment of each step, outward
};

// RK4 for Theta' = q/a, q' = -(eta/2) q/a, outward from 0 with signed step h.
Half integrate_half(const ContactProfile& p, double theta0, double q0, double h, int steps) {
  Half out;
  out.theta.resize(steps + 1);
  out.q.resize(steps + 1);
  out.inc.resize(steps);
  out.theta[0] = theta0;
  out.q[0] = q0;
  auto f = [&p](double eta, double th, double q) {
    if (!(th > 0.0)) throw ConvergenceFailure("contact profile temperature left the positive range");
    const double r = q / p.a(th);
    return std::array<double, 2>{r, -0.5 * eta * r};
  };
  double th = theta0, q = q0;
  for (int i = 0; i < steps; ++i) {
    const double eta = i * h;
    const auto k1 = f(eta, th, q);
    const auto k2 = f(eta + 0.5 * h, th + 0.5 * h * k1[0], q + 0.5 * h * k1[1]);
    const auto k3 = f(eta + 0.5 * h, th + 0.5 * h * k2[0], q + 0.5 * h * k2[1]);
    const auto k4 = f(eta + h, th + h * k3[0], q + h * k3[1]);
    const double dth = h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0;
    q += h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0;
    th += dth;
    out.inc[i] = dth;
    out.theta[i + 1] = th;
    out.q[i + 1] = q;
  }
  return out;
}

struct Shot {
  Half left, right;
  double f_minus, f_plus;
};

Shot shoot(const ContactProfile& p, double theta0, double dtheta0, double h, int m) {
  const double q0 = p.a(theta0) * dtheta0;
  Shot s{integrate_half(p, theta0, q0, -h, m), integrate_half(p, theta0, q0, h, m), 0.0, 0.0};
  s.f_minus = s.left.theta.back() - p.theta_minus_star;
  s.f_plus = s.right.theta.back() - p.theta_plus_star;
  return s;
}

// Tail constants: c2 from log-linear regression of the envelope on eta^2
// over each tail, c1 as the largest envelope ratio with that c2.
void fit_tail_constants(ContactProfile& p) {
  const double delta = p.delta();
  auto lhs = [&p](double eta) {
    const auto pt = p.at(eta);
    return pt.dev + std::abs(pt.dtheta) + std::abs(pt.ddtheta);
  };
  const double L = p.eta.back();
  const double lo = std::min(3.0, 0.25 * L);
  const double hi = std::min(10.0, 0.9 * L);
  double c2 = std::numeric_limits<double>::infinity();
  for (double side : {-1.0, 1.0}) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = 0; k <= 200; ++k) {
      const double eta = side * (lo + (hi - lo) * k / 200.0);
      const double y = lhs(eta);
      if (!(y > 0.0)) continue;
      const double x = eta * eta;
      const double ly = std::log(y);
      sx += x; sy += ly; sxx += x * x; sxy += x * ly; ++n;
    }
    if (n < 10) continue;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    c2 = std::min(c2, -slope);
  }
  if (!std::isfinite(c2) || c2 <= 0.0) c2 = 0.0;
  c2 *= 0.98;
  double c1 = 0.0;
  const double top = std::min(10.0, L);
  for (int k = 0; k <= 4000; ++k) {
    const double eta = -top + 2.0 * top * k / 4000.0;
    c1 = std::max(c1, lhs(eta) / (delta * std::exp(-c2 * eta * eta)));
  }
  p.c1_est = 1.01 * c1;
  p.c2_est = c2;
}

}  // namespace

ContactProfile contact_selfsimilar_solve(double theta_minus_star, double theta_plus_star,
                                         double p_star, const TransportModel& transport,
                                         const ContactOptions& opts) {
  if (!(theta_minus_star > 0.0) || !(theta_plus_star > 0.0)) {
    throw DomainError("contact end temperatures must be positive");
  }
  if (!(p_star > 0.0)) throw DomainError("contact pressure must be positive");
  if (!(opts.half_width > 0.0) || opts.n < 5) throw DomainError("contact grid needs L > 0 and n >= 5");

  ContactProfile p;
  p.theta_minus_star = theta_minus_star;
  p.theta_plus_star = theta_plus_star;
  p.p_star = p_star;
  p.transport = transport;

  const int m = std::max(2, (opts.n - 1) / 2);
  const int n = 2 * m + 1;
  const double L = opts.half_width;
  const double h = L / m;
  p.eta.resize(n);
  for (int i = 0; i < n; ++i) p.eta[i] = -L + i * h;

  if (theta_minus_star == theta_plus_star) {
    p.Theta.assign(n, theta_minus_star);
    p.Theta_prime.assign(n, 0.0);
    p.deviation.assign(n, 0.0);
    p.c1_est = 1.0;
    p.c2_est = 1.0;
    return p;
  }

  // Newton on (Theta(0), Theta'(0)); start from the constant-coefficient erf.
  const double mid = 0.5 * (theta_minus_star + theta_plus_star);
  const double jump = theta_plus_star - theta_minus_star;
  double x0 = mid;
  double x1 = jump / (2.0 * std::sqrt(std::numbers::pi * p.a(mid)));
  Shot s = shoot(p, x0, x1, h, m);
  int it = 0;
  const double scale = std::max(1.0, std::max(theta_minus_star, theta_plus_star));
  while (std::max(std::abs(s.f_minus), std::abs(s.f_plus)) > opts.tol * scale) {
    if (++it > opts.max_iterations) {
      std::ostringstream os;
      os << "contact shooting did not converge (mismatch " << std::max(std::abs(s.f_minus), std::abs(s.f_plus))
         << "); contact strength may be too large for the transport model";
      throw ConvergenceFailure(os.str(), std::max(std::abs(s.f_minus), std::abs(s.f_plus)));
    }
    const double e0 = 1e-7 * std::abs(x0);
    const double e1 = 1e-7 * std::max(std::abs(x1), 1e-12);
    const Shot s0 = shoot(p, x0 + e0, x1, h, m);
    const Shot s1 = shoot(p, x0, x1 + e1, h, m);
    const double j00 = (s0.f_minus - s.f_minus) / e0, j01 = (s1.f_minus - s.f_minus) / e1;
    const double j10 = (s0.f_plus - s.f_plus) / e0, j11 = (s1.f_plus - s.f_plus) / e1;
    const double det = j00 * j11 - j01 * j10;
    if (!(std::abs(det) > 0.0)) throw ConvergenceFailure("singular shooting Jacobian");
    const double d0 = -(s.f_minus * j11 - j01 * s.f_plus) / det;
    const double d1 = -(j00 * s.f_plus - j10 * s.f_minus) / det;
    const double before = std::max(std::abs(s.f_minus), std::abs(s.f_plus));
    double step = 1.0;
    for (int k = 0; k < 30; ++k, step *= 0.5) {
      try {
        Shot trial = shoot(p, x0 + step * d0, x1 + step * d1, h, m);
        if (std::max(std::abs(trial.f_minus), std::abs(trial.f_plus)) < before || k == 29) {
          x0 += step * d0;
          x1 += step * d1;
          s = std::move(trial);
          break;
        }
      } catch (const ConvergenceFailure&) {
      }
    }
  }
  p.iterations = it;

  p.Theta.resize(n);
  p.Theta_prime.resize(n);
  p.deviation.resize(n);
  // Tails accumulate from +-L inward so deviations keep relative precision.
  double acc = 0.0;
  for (int k = 0; k <= m; ++k) {
    const int pos = m - k;  // position on the left half, counted outward from 0
    if (pos < m) acc -= s.left.inc[pos];
    p.deviation[k] = acc;
    p.Theta[k] = theta_minus_star + acc;
    p.Theta_prime[k] = s.left.q[pos] / p.a(s.left.theta[pos]);
  }
  acc = 0.0;
  for (int k = n - 1; k > m; --k) {
    const int pos = k - m;
    if (pos < m) acc -= s.right.inc[pos];
    p.deviation[k] = acc;
    p.Theta[k] = theta_plus_star + acc;
    p.Theta_prime[k] = s.right.q[pos] / p.a(s.right.theta[pos]);
  }
  p.ode_residual = contact_ode_residual(p);
  fit_tail_constants(p);
  return p;
}

ContactProfile::Point ContactProfile::at(double e) const {
  if (trivial()) return {theta_minus_star, 0.0, 0.0, 0.0};
  const double L = eta.back();
  if (e <= -L) return {theta_minus_star, 0.0, 0.0, 0.0};
  if (e >= L) return {theta_plus_star, 0.0, 0.0, 0.0};
  const int n = static_cast<int>(eta.size());
  const int m = (n - 1) / 2;
  const double h = eta[1] - eta[0];
  int i = static_cast<int>(std::floor((e + L) / h));
  i = std::clamp(i, 0, n - 2);
  const double s = (e - eta[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double g00 = 6 * s * s - 6 * s, g10 = 3 * s * s - 4 * s + 1;
  const double g01 = 6 * s - 6 * s * s, g11 = 3 * s * s - 2 * s;
  const double d0 = Theta_prime[i], d1 = Theta_prime[i + 1];
  // signed deviation endpoints on the side of this interval
  double y0, y1, base;
  if (i < m) {
    base = theta_minus_star;
    y0 = deviation[i];
    y1 = (i + 1 == m) ? Theta[m] - theta_minus_star : deviation[i + 1];
  } else {
    base = theta_plus_star;
    y0 = (i == m) ? Theta[m] - theta_plus_star : deviation[i];
    y1 = deviation[i + 1];
  }
  const double dev = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  const double th = base + dev;
  const double dth = (g00 * y0 + g10 * h * d0 + g01 * y1 + g11 * h * d1) / h;
  const double ddth = (-0.5 * e * dth - da(th) * dth * dth) / a(th);
  return {th, dth, ddth, std::abs(dev)};
}

double contact_ode_residual(const ContactProfile& p) {
  if (p.trivial()) return 0.0;
  const std::size_t n = p.eta.size();
  const double h = p.eta[1] - p.eta[0];
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double qm = p.a(p.Theta[i - 1]) * p.Theta_prime[i - 1];
    const double qp = p.a(p.Theta[i + 1]) * p.Theta_prime[i + 1];
    const double r = -0.5 * p.eta[i] * p.Theta_prime[i] - (qp - qm) / (2.0 * h);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

void write_contact_csv(const ContactProfile& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  out << "eta,Theta,Theta_prime\n";
  char buf[128];
  for (std::size_t i = 0; i < p.eta.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g\n", p.eta[i], p.Theta[i], p.Theta_prime[i]);
    out << buf;
  }
}

WaveSample contact_eval(const ContactProfile& p, double x, double t) {
  const double st = std::sqrt(1.0 + t);
  const double eta = x / st;
  const auto pt = p.at(eta);
  const double c = 2.0 / (3.0 * p.p_star);
  const double q = p.a(pt.theta) * pt.dtheta;
  const double dq = -0.5 * eta * pt.dtheta;
  WaveSample w;
  w.theta = pt.theta;
  w.theta_x = pt.dtheta / st;
  w.theta_t = -0.5 * eta * pt.dtheta / (1.0 + t);
  w.v = c * pt.theta;
  w.v_x = c * w.theta_x;
  w.v_t = c * w.theta_t;
  w.u = c * q / st + p.u_star;
  w.u_x = c * dq / (1.0 + t);
  w.u_t = c * (-0.5 * eta * dq - 0.5 * q) / (st * st * st);
  return w;
}

TailCheck gaussian_tail_check(const std::vector<TailSample>& samples, double t, double c1, double c2,
                              double delta) {
  TailCheck out;
  const double tt = 1.0 + t;
  auto lhs = [&](const TailSample& s) {
    return s.dev + std::sqrt(tt) * std::abs(s.theta_x) + tt * std::abs(s.theta_xx);
  };
  auto worst = [&](double cc2) {
    double r = 0.0;
    for (const auto& s : samples) {
      const double env = c1 * delta * std::exp(-cc2 * s.x * s.x / tt);
      const double l = lhs(s);
      if (l == 0.0) continue;
      r = std::max(r, env > 0.0 ? l / env : std::numeric_limits<double>::infinity());
    }
    return r;
  };
  out.worst_ratio = worst(c2);
  out.pass = out.worst_ratio <= 1.0;
  // Largest c2 that still passes with this c1 (the envelope shrinks as c2 grows).
  if (worst(0.0) > 1.0) {
    out.tightest_c2 = 0.0;
    return out;
  }
  double lo = 0.0, hi = 1.0;
  while (worst(hi) <= 1.0 && hi < 1e6) hi *= 2.0;
  if (hi >= 1e6) {
    out.tightest_c2 = std::numeric_limits<double>::infinity();
    return out;
  }
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (worst(mid) <= 1.0) lo = mid; else hi = mid;
  }
  out.tightest_c2 = lo;
  return out;
}

std::vector<TailSample> contact_tail_samples(const ContactProfile& p, double t, int count) {
  std::vector<TailSample> out;
  out.reserve(count);
  const double st = std::sqrt(1.0 + t);
  const double xmax = 10.0 * st;
  for (int k = 0; k < count; ++k) {
    const double x = -xmax + 2.0 * xmax * k / (count - 1);
    const auto pt = p.at(x / st);
    out.push_back({x, pt.dev, pt.dtheta / st, pt.ddtheta / (1.0 + t)});
  }
  return out;
}

}  // namespace vpb
