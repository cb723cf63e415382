#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "vpbwave/diagnostics.hpp"
#include "vpbwave/errors.hpp"
#include "vpbwave/fluid.hpp"

namespace vpb {

void SolverConfig::validate() const {
  auto need = [](bool ok, const char* key, const char* msg) {
    if (!ok) throw ValidationError(key, msg);
  };
  need(h > 0.0 && std::isfinite(h), "solver.h", "h must be positive");
  need(X > 0.0 && std::isfinite(X), "solver.X", "X must be positive");
  need(2.0 * X / h >= 4.0, "solver.h", "grid needs at least 5 nodes");
  need(std::abs(2.0 * X / h - std::round(2.0 * X / h)) < 1e-6, "solver.h", "2X / h must be an integer");
  need(dt >= 0.0 && std::isfinite(dt), "solver.dt", "dt must be nonnegative (0 selects the stable bound)");
  need(cfl > 0.0 && cfl <= 1.0, "solver.cfl", "cfl must lie in (0, 1]");
  need(T >= 0.0 && std::isfinite(T), "solver.T", "T must be nonnegative");
  need(transport.mu0 > 0.0, "transport.mu0", "mu0 must be positive");
  need(transport.kappa0 > 0.0, "transport.kappa0", "kappa0 must be positive");
  need(transport.kappa1_0 > 0.0, "transport.kappa1_0", "kappa1_0 must be positive");
  need(output_interval > 0.0, "output.interval", "output interval must be positive");
  need(neutrality_tol > 0.0, "solver.neutrality_tol", "neutrality_tol must be positive");
  need(alpha > 0.0, "diagnostics.alpha", "alpha must be positive");
  need(boundary_margin >= 0, "solver.boundary_margin", "boundary_margin must be nonnegative");
}

int SolverConfig::nodes() const { return static_cast<int>(std::lround(2.0 * X / h)) + 1; }

namespace {

// S at faces i + 1/2 (i = 0..N-1): sum_{k <= i} 2 q_k h, nodes as cell centres.
std::vector<double> cumulative_charge(const std::vector<double>& q, double h) {
  std::vector<double> S(q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    acc += 2.0 * q[i] * h;
    S[i] = acc;
  }
  return S;
}

void check_neutral(const std::vector<double>& q, const std::vector<double>& n2, double h, double tol) {
  double total = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    total += q[i] * h;
    l1 += std::abs(n2[i]) * h;
  }
  if (std::abs(total) > tol * l1) {
    std::ostringstream os;
    os << "total charge " << total << " is not zero (|n2|_1 = " << l1 << ")";
    throw NeutralityViolated(os.str());
  }
}

// Removes a round-off residue of the total charge, proportionally to |q|.
void neutralize(std::vector<double>& q, double h) {
  double total = 0.0, mag = 0.0;
  for (double x : q) {
    total += x * h;
    mag += std::abs(x) * h;
  }
  if (mag == 0.0 || total == 0.0) return;
  const double c = total / mag;
  for (double& x : q) x -= c * std::abs(x);
}

std::vector<double> phi_from_faces(const std::vector<double>& S, const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double left = i == 0 ? 0.0 : S[i - 1];
    out[i] = v[i] * 0.5 * (left + S[i]);
  }
  return out;
}

struct Conserved {
  std::vector<double> v, u1, u2, u3, E, q;
};

Conserved conserved(const FluidField& f, const ChargeField& c) {
  Conserved u;
  u.v = f.v;
  u.u1 = f.u1;
  u.u2 = f.u2;
  u.u3 = f.u3;
  const std::size_t n = f.size();
  u.E.resize(n);
  u.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    u.E[i] = f.theta[i] + 0.5 * (f.u1[i] * f.u1[i] + f.u2[i] * f.u2[i] + f.u3[i] * f.u3[i]);
    u.q[i] = c.n2[i] * f.v[i];
  }
  return u;
}

void primitive(const Conserved& u, FluidField& f, ChargeField& c) {
  f.v = u.v;
  f.u1 = u.u1;
  f.u2 = u.u2;
  f.u3 = u.u3;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.theta[i] = u.E[i] - 0.5 * (u.u1[i] * u.u1[i] + u.u2[i] * u.u2[i] + u.u3[i] * u.u3[i]);
    c.n2[i] = u.q[i] / u.v[i];
  }
}

void axpy(std::vector<double>& out, const std::vector<double>& a, double s, const std::vector<double>& b) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + s * b[i];
}

}  // namespace

std::vector<double> solve_poisson(const std::vector<double>& n2, const std::vector<double>& v, double h, double tol) {
  if (n2.size() != v.size()) throw DomainError("n2 and v sizes differ");
  if (!(h > 0.0)) throw DomainError("h must be positive");
  std::vector<double> q(n2.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = n2[i] * v[i];
  check_neutral(q, n2, h, tol);
  return phi_from_faces(cumulative_charge(q, h), v);
}

PerturbationProfiles perturbation_profiles(const Perturbation& pert, const std::vector<double>& x) {
  if (!(pert.width > 0.0)) throw ValidationError("perturbation.width", "width must be positive");
  PerturbationProfiles p;
  const std::size_t n = x.size();
  p.phi.assign(n, 0.0);
  p.psi.assign(n, 0.0);
  p.zeta.assign(n, 0.0);
  p.efield.assign(n, 0.0);
  if (pert.amplitude == 0.0) return p;
  const double w = pert.width;
  if (pert.shape == PerturbationShape::gaussian) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = (x[i] - pert.center) / w;
      p.phi[i] = p.psi[i] = p.zeta[i] = p.efield[i] = pert.amplitude * std::exp(-s * s);
    }
    return p;
  }
  if (pert.shape == PerturbationShape::dipole) {
    const double k = std::sqrt(2.0 * std::exp(1.0));  // sup of s e^{-s^2} is 1 / sqrt(2e)
    for (std::size_t i = 0; i < n; ++i) {
      const double s = (x[i] - pert.center) / w;
      p.phi[i] = p.psi[i] = p.zeta[i] = p.efield[i] = pert.amplitude * k * s * std::exp(-s * s);
    }
    return p;
  }
  std::mt19937_64 rng(pert.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double>* comps[4] = {&p.phi, &p.psi, &p.zeta, &p.efield};
  for (auto* c : comps) {
    for (int b = 0; b < 4; ++b) {
      const double cen = pert.center + w * uni(rng);
      const double wid = w * (0.75 + 0.25 * uni(rng));
      const double amp = uni(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double s = (x[i] - cen) / wid;
        (*c)[i] += amp * std::exp(-s * s);
      }
    }
    double sup = 0.0;
    for (double y : *c) sup = std::max(sup, std::abs(y));
    if (sup > 0.0)
      for (double& y : *c) y *= pert.amplitude / sup;
  }
  return p;
}

void init_from_ansatz(const CompositeWave& wave, const Perturbation& pert, const SolverConfig& cfg, FluidField& f,
                      ChargeField& c) {
  cfg.validate();
  const int n = cfg.nodes();
  f.h = cfg.h;
  f.x.resize(n);
  for (int i = 0; i < n; ++i) f.x[i] = -cfg.X + i * cfg.h;
  f.v.resize(n);
  f.u1.resize(n);
  f.u2.assign(n, 0.0);
  f.u3.assign(n, 0.0);
  f.theta.resize(n);
  const PerturbationProfiles p = perturbation_profiles(pert, f.x);
  for (int i = 0; i < n; ++i) {
    const WaveSample s = wave.sample(f.x[i], 0.0);
    const bool edge = i == 0 || i == n - 1;
    f.v[i] = s.v + (edge ? 0.0 : p.phi[i]);
    f.u1[i] = s.u + (edge ? 0.0 : p.psi[i]);
    f.theta[i] = s.theta + (edge ? 0.0 : p.zeta[i]);
    if (!(f.v[i] > 0.0) || !(f.theta[i] > 0.0)) {
      std::ostringstream os;
      os << "initial data not positive at x = " << f.x[i];
      throw PositivityViolation(os.str());
    }
  }
  // q = n2 v from the face values S = E / v of the target field E, so that
  // Phi_x = v (S_{i-1/2} + S_{i+1/2}) / 2 reproduces E
  std::vector<double> q(n, 0.0);
  double prev = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double vf = 0.5 * (f.v[i] + f.v[i + 1]);
    const double ef = 0.5 * (p.efield[i] + p.efield[i + 1]);
    const double S = ef / vf;
    if (i > 0) q[i] = (S - prev) / (2.0 * cfg.h);
    prev = S;
  }
  // zero total charge, keeping the support of n2
  neutralize(q, cfg.h);
  c.n2.resize(n);
  for (int i = 0; i < n; ++i) c.n2[i] = q[i] / f.v[i];
  c.Phi_x = solve_poisson(c.n2, f.v, cfg.h, cfg.neutrality_tol);
}

FluidRates rhs(const FluidField& f, const ChargeField& c, const SolverConfig& cfg) {
  const std::size_t n = f.size();
  const double h = f.h;
  const TransportModel& tm = cfg.transport;
  FluidRates r;
  r.v.assign(n, 0.0);
  r.u1.assign(n, 0.0);
  r.u2.assign(n, 0.0);
  r.u3.assign(n, 0.0);
  r.theta.assign(n, 0.0);
  r.n2.assign(n, 0.0);
  r.energy.assign(n, 0.0);
  r.charge.assign(n, 0.0);
  if (n < 3) return r;

  std::vector<double> q(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = c.n2[i] * f.v[i];
    p[i] = 2.0 * f.theta[i] / (3.0 * f.v[i]);
  }
  const std::vector<double> S = cumulative_charge(q, h);

  // face fluxes, face k between nodes k and k+1
  const std::size_t m = n - 1;
  std::vector<double> Fv(m), Fu1(m), Fu2(m), Fu3(m), FE(m), J(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t a = k, b = k + 1;
    const double vf = 0.5 * (f.v[a] + f.v[b]);
    const double tf = 0.5 * (f.theta[a] + f.theta[b]);
    const double mu = tm.mu(tf) / vf;
    const double u1f = 0.5 * (f.u1[a] + f.u1[b]);
    const double u2f = 0.5 * (f.u2[a] + f.u2[b]);
    const double u3f = 0.5 * (f.u3[a] + f.u3[b]);
    const double visc = (4.0 / 3.0) * mu * (f.u1[b] - f.u1[a]) / h;
    const double sh2 = mu * (f.u2[b] - f.u2[a]) / h;
    const double sh3 = mu * (f.u3[b] - f.u3[a]) / h;
    const double heat = tm.kappa(tf) / vf * (f.theta[b] - f.theta[a]) / h;
    const double pf = 0.5 * (p[a] + p[b]);
    const double puf = 0.5 * (p[a] * f.u1[a] + p[b] * f.u1[b]);
    Fv[k] = u1f;
    Fu1[k] = -pf + visc;
    Fu2[k] = sh2;
    Fu3[k] = sh3;
    FE[k] = -puf + heat + visc * u1f + sh2 * u2f + sh3 * u3f;
    if (k == 0 || k == m - 1) {
      J[k] = 0.0;
    } else {
      const double k1 = tm.kappa1(tf);
      const double phif = vf * S[k];
      J[k] = 1.5 * k1 / (tf * vf) * phif - k1 / vf * (q[b] - q[a]) / h;
    }
  }
  const std::vector<double> phi = phi_from_faces(S, f.v);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double n2 = c.n2[i];
    const double Ji = 0.5 * (J[i - 1] + J[i]);
    r.v[i] = (Fv[i] - Fv[i - 1]) / h;
    r.u1[i] = (Fu1[i] - Fu1[i - 1]) / h + phi[i] * n2;
    r.u2[i] = (Fu2[i] - Fu2[i - 1]) / h;
    r.u3[i] = (Fu3[i] - Fu3[i - 1]) / h;
    r.energy[i] = (FE[i] - FE[i - 1]) / h + phi[i] * (n2 * f.u1[i] + Ji);
    r.charge[i] = -(J[i] - J[i - 1]) / h;
    r.theta[i] = r.energy[i] - f.u1[i] * r.u1[i] - f.u2[i] * r.u2[i] - f.u3[i] * r.u3[i];
    r.n2[i] = (r.charge[i] - n2 * r.v[i]) / f.v[i];
  }
  return r;
}

double stable_dt(const FluidField& f, const SolverConfig& cfg) {
  const TransportModel& tm = cfg.transport;
  double vmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0, cmax = 0.0, damp = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = f.v[i], th = f.theta[i];
    vmin = std::min(vmin, std::min(v, v * v));
    dmax = std::max({dmax, 4.0 * tm.mu(th) / 3.0, tm.kappa(th), tm.kappa1(th)});
    cmax = std::max(cmax, std::sqrt(10.0 * th / 9.0) / v);
    damp = std::max(damp, 3.0 * tm.kappa1(th) / (th * v));
  }
  double dt = 0.4 * f.h * f.h * vmin / dmax;
  if (cmax > 0.0) dt = std::min(dt, 0.5 * f.h / cmax);
  if (damp > 0.0) dt = std::min(dt, 1.0 / damp);
  return dt;
}

FluidSolver::FluidSolver(const CompositeWave& wave, const SolverConfig& cfg, const Perturbation& pert)
    : wave_(wave), cfg_(cfg) {
  init_from_ansatz(wave_, pert, cfg_, field_, charge_);
  check_boundary(0.0);
}

double FluidSolver::front_speed() const {
  const double lm = std::abs(lambda(wave_.ends.left.v, wave_.stars.s_minus, Family::minus));
  const double lp = std::abs(lambda(wave_.ends.right.v, wave_.stars.s_plus, Family::plus));
  return std::max(lm, lp);
}

void FluidSolver::check_boundary(double t) const {
  const double reach = front_speed() * t;
  const double limit = cfg_.X - cfg_.boundary_margin * cfg_.h;
  if (reach > limit) {
    std::ostringstream os;
    os << "wave front at |x| = " << reach << " is within " << cfg_.boundary_margin << " nodes of the boundary at t = "
       << t;
    throw BoundaryReached(os.str());
  }
}

void FluidSolver::pin_boundary(FluidField& f, ChargeField& c, double t) const {
  for (std::size_t i : {std::size_t{0}, f.size() - 1}) {
    const WaveSample s = wave_.sample(f.x[i], t);
    f.v[i] = s.v;
    f.u1[i] = s.u;
    f.u2[i] = 0.0;
    f.u3[i] = 0.0;
    f.theta[i] = s.theta;
    c.n2[i] = 0.0;
  }
}

void FluidSolver::step(double dt) {
  if (!(dt > 0.0)) throw StabilityViolation("dt must be positive");
  const double bound = stable_dt(field_, cfg_);
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the stability bound " << bound;
    throw StabilityViolation(os.str());
  }
  check_boundary(t_ + dt);
  const double h = cfg_.h;
  const Conserved u0 = conserved(field_, charge_);

  auto advance = [&](const Conserved& base, const FluidRates& r, double s, Conserved& out) {
    out = base;
    axpy(out.v, base.v, s, r.v);
    axpy(out.u1, base.u1, s, r.u1);
    axpy(out.u2, base.u2, s, r.u2);
    axpy(out.u3, base.u3, s, r.u3);
    axpy(out.E, base.E, s, r.energy);
    axpy(out.q, base.q, s, r.charge);
  };

  FluidField f1 = field_;
  ChargeField c1 = charge_;
  Conserved u1;
  advance(u0, rhs(field_, charge_, cfg_), dt, u1);
  primitive(u1, f1, c1);
  pin_boundary(f1, c1, t_ + dt);
  c1.Phi_x = solve_poisson(c1.n2, f1.v, h, cfg_.neutrality_tol);

  Conserved u2;
  advance(conserved(f1, c1), rhs(f1, c1, cfg_), dt, u2);
  Conserved un = u0;
  for (std::size_t i = 0; i < un.v.size(); ++i) {
    un.v[i] = 0.5 * (u0.v[i] + u2.v[i]);
    un.u1[i] = 0.5 * (u0.u1[i] + u2.u1[i]);
    un.u2[i] = 0.5 * (u0.u2[i] + u2.u2[i]);
    un.u3[i] = 0.5 * (u0.u3[i] + u2.u3[i]);
    un.E[i] = 0.5 * (u0.E[i] + u2.E[i]);
    un.q[i] = 0.5 * (u0.q[i] + u2.q[i]);
  }
  un.q.front() = un.q.back() = 0.0;
  neutralize(un.q, h);
  FluidField fn = field_;
  ChargeField cn = charge_;
  primitive(un, fn, cn);
  pin_boundary(fn, cn, t_ + dt);
  for (std::size_t i = 0; i < fn.size(); ++i) {
    if (!(fn.v[i] > 0.0) || !(fn.theta[i] > 0.0)) {
      std::ostringstream os;
      os << "v or theta not positive at x = " << fn.x[i] << ", t = " << t_ + dt << " (v = " << fn.v[i]
         << ", theta = " << fn.theta[i] << ")";
      throw PositivityViolation(os.str());
    }
  }
  cn.Phi_x = solve_poisson(cn.n2, fn.v, h, cfg_.neutrality_tol);
  // commit only a fully valid state, so a failure leaves the last good one
  field_ = std::move(fn);
  charge_ = std::move(cn);
  t_ += dt;
  ++steps_;
}

void FluidSolver::step() {
  const double dt = cfg_.dt > 0.0 ? cfg_.dt : cfg_.cfl * stable_dt(field_, cfg_);
  step(dt);
}

std::vector<DiagnosticsRecord> FluidSolver::run(const std::function<void(const DiagnosticsRecord&)>& observe) {
  check_boundary(cfg_.T);
  std::vector<DiagnosticsRecord> out;
  auto record = [&] {
    out.push_back(diagnostics_record(field_, charge_, wave_, t_, cfg_.alpha));
    if (observe) observe(out.back());
  };
  record();
  long k = 1;
  while (t_ < cfg_.T * (1.0 - 1e-14)) {
    const double next = std::min(cfg_.T, k * cfg_.output_interval);
    while (t_ < next * (1.0 - 1e-14)) {
      double dt = cfg_.dt > 0.0 ? cfg_.dt : cfg_.cfl * stable_dt(field_, cfg_);
      if (t_ + dt > next) dt = next - t_;
      step(dt);
    }
    t_ = next;  // absorb rounding in the step sum
    record();
    ++k;
  }
  return out;
}

void write_snapshot_csv(const FluidField& f, const ChargeField& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  out << "x,v,u1,u2,u3,theta,n2,Phi_x\n";
  char buf[320];
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", f.x[i], f.v[i], f.u1[i],
                  f.u2[i], f.u3[i], f.theta[i], c.n2[i], c.Phi_x[i]);
    out << buf;
  }
}

MassCoordinate::MassCoordinate(std::vector<double> y, const std::vector<double>& rho) : y_(std::move(y)) {
  if (y_.size() != rho.size() || y_.size() < 2) throw DomainError("need matching y and rho with at least 2 points");
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (!(rho[i] > 0.0)) throw DomainError("density must be positive");
  for (std::size_t i = 1; i < y_.size(); ++i)
    if (!(y_[i] > y_[i - 1])) throw DomainError("y must be strictly increasing");
  // cumulative trapezoid, anchored so that x_L(0) = 0
  xl_.assign(y_.size(), 0.0);
  for (std::size_t i = 1; i < y_.size(); ++i) xl_[i] = xl_[i - 1] + 0.5 * (rho[i] + rho[i - 1]) * (y_[i] - y_[i - 1]);
  if (y_.front() <= 0.0 && y_.back() >= 0.0) {
    const double shift = [&] {
      auto it = std::upper_bound(y_.begin(), y_.end(), 0.0);
      std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - y_.begin(), 1), y_.size() - 1);
      const double s = (0.0 - y_[k - 1]) / (y_[k] - y_[k - 1]);
      return xl_[k - 1] + s * (xl_[k] - xl_[k - 1]);
    }();
    for (double& v : xl_) v -= shift;
  } else {
    const double shift = xl_.front() - rho.front() * y_.front();
    for (double& v : xl_) v -= shift;
  }
}

namespace {
double lerp_table(const std::vector<double>& a, const std::vector<double>& b, double x) {
  auto it = std::upper_bound(a.begin(), a.end(), x);
  std::size_t k = static_cast<std::size_t>(it - a.begin());
  k = std::clamp<std::size_t>(k, 1, a.size() - 1);
  const double s = (x - a[k - 1]) / (a[k] - a[k - 1]);
  return b[k - 1] + s * (b[k] - b[k - 1]);
}
}  // namespace

double MassCoordinate::forward(double y) const { return lerp_table(y_, xl_, y); }
double MassCoordinate::inverse(double xl) const { return lerp_table(xl_, y_, xl); }

MassCoordinate lagrangian_coordinate(const std::vector<double>& y, const std::vector<double>& rho) {
  return MassCoordinate(y, rho);
}

}  // namespace vpb
