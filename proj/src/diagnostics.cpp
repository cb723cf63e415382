#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vpbwave/diagnostics.hpp"
#include "vpbwave/errors.hpp"

namespace vpb {

double l2_norm(const std::vector<double>& f, double h) {
  if (f.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = (i == 0 || i + 1 == f.size()) ? 0.5 : 1.0;
    s += w * f[i] * f[i];
  }
  return std::sqrt(s * h);
}

std::vector<double> gradient(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> g(n, 0.0);
  if (n < 2) return g;
  g[0] = (f[1] - f[0]) / h;
  g[n - 1] = (f[n - 1] - f[n - 2]) / h;
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  return g;
}

double linf_norm(const std::vector<double>& f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

PerturbationFields perturbation_fields(const FluidField& field, const CompositeWave& wave, double t) {
  const std::size_t n = field.size();
  PerturbationFields p;
  p.phi.resize(n);
  p.psi1.resize(n);
  p.psi2 = field.u2;
  p.psi3 = field.u3;
  p.zeta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const WaveSample s = wave.sample(field.x[i], t);
    p.phi[i] = field.v[i] - s.v;
    p.psi1[i] = field.u1[i] - s.u;
    p.zeta[i] = field.theta[i] - s.theta;
  }
  return p;
}

namespace {

double sq(double x) { return x * x; }

double sum_sq(std::initializer_list<const std::vector<double>*> fs, double h) {
  double s = 0.0;
  for (auto* f : fs) s += sq(l2_norm(*f, h));
  return s;
}

}  // namespace

DiagnosticsRecord perturbation_norms(const FluidField& field, const CompositeWave& wave, double t, double alpha) {
  const double h = field.h;
  const PerturbationFields p = perturbation_fields(field, wave, t);
  DiagnosticsRecord r;
  r.t = t;
  const double l2 = sum_sq({&p.phi, &p.psi1, &p.psi2, &p.psi3, &p.zeta}, h);
  const auto dphi = gradient(p.phi, h), d1 = gradient(p.psi1, h), d2 = gradient(p.psi2, h), d3 = gradient(p.psi3, h),
             dz = gradient(p.zeta, h);
  const double dl2 = sum_sq({&dphi, &d1, &d2, &d3, &dz}, h);
  r.l2_pert = std::sqrt(l2);
  r.h1_pert = std::sqrt(l2 + dl2);
  r.linf_pert = std::max({linf_norm(p.phi), linf_norm(p.psi1), linf_norm(p.psi2), linf_norm(p.psi3),
                          linf_norm(p.zeta)});
  double w = 0.0;
  const std::size_t n = field.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double wt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    const double ww = weight_hat_w(field.x[i], t, alpha);
    w += wt * (sq(p.phi[i]) + sq(p.psi1[i]) + sq(p.psi2[i]) + sq(p.psi3[i]) + sq(p.zeta[i])) * ww * ww;
  }
  r.weighted_l2 = w * h;
  return r;
}

double charge_energy(const FluidField& field, const ChargeField& charge) {
  const auto dn = gradient(charge.n2, field.h);
  return sum_sq({&charge.Phi_x, &charge.n2, &dn}, field.h);
}

double energy_fluid(const FluidField& field, const ChargeField& charge, const CompositeWave& wave, double t) {
  const DiagnosticsRecord r = perturbation_norms(field, wave, t);
  return sq(r.h1_pert) + charge_energy(field, charge);
}

DiagnosticsRecord diagnostics_record(const FluidField& field, const ChargeField& charge, const CompositeWave& wave,
                                     double t, double alpha) {
  DiagnosticsRecord r = perturbation_norms(field, wave, t, alpha);
  const double ce = charge_energy(field, charge);
  r.l2_charge = std::sqrt(ce);
  r.linf_charge = std::max(linf_norm(charge.Phi_x), linf_norm(charge.n2));
  r.energy_fluid = sq(r.h1_pert) + ce;
  r.min_v = *std::min_element(field.v.begin(), field.v.end());
  r.min_theta = *std::min_element(field.theta.begin(), field.theta.end());
  double q = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) q += charge.n2[i] * field.v[i];
  r.total_charge = q * field.h;
  return r;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
  if (t.size() != y.size()) throw DomainError("t and y sizes differ");
  std::vector<double> X, Y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    if (!(y[i] > 0.0)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "series value %g at t = %g is not positive", y[i], t[i]);
      throw NonPositiveSeries(buf);
    }
    X.push_back(std::log1p(t[i]));
    Y.push_back(std::log(y[i]));
  }
  const int n = static_cast<int>(X.size());
  if (n < 10) throw DomainError("decay fit needs at least 10 points in the window");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += sq(X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("decay fit window has no spread in t");
  DecayFit f;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double rss = 0.0;
  for (int i = 0; i < n; ++i) rss += sq(Y[i] - f.intercept - f.exponent * X[i]);
  f.halfwidth = 2.0 * std::sqrt(rss / (n - 2) / sxx);
  f.points = n;
  return f;
}

std::string diagnostics_csv_header() {
  return "t,l2_pert,h1_pert,linf_pert,l2_charge,linf_charge,weighted_l2,energy_fluid,min_v,min_theta,total_charge";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t, r.l2_pert,
                r.h1_pert, r.linf_pert, r.l2_charge, r.linf_charge, r.weighted_l2, r.energy_fluid, r.min_v,
                r.min_theta, r.total_charge);
  return buf;
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  out << diagnostics_csv_header() << '\n';
  for (const auto& r : records) out << diagnostics_csv_row(r) << '\n';
}

}  // namespace vpb
