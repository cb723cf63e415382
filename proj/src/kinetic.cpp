#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "quadrature.hpp"
#include "vpbwave/errors.hpp"
#include "vpbwave/kinetic.hpp"
#include "vpbwave/parallel.hpp"

namespace vpb::kinetic {
namespace {

void same_grid(const Distribution& a, const Distribution& b) {
  if (a.grid != b.grid) throw DomainError("distributions live on different velocity grids");
}

void check_params(const MaxwellParams& p) {
  if (!(p.rho > 0.0)) throw DomainError("rho must be positive");
  if (!(p.theta > 0.0)) throw DomainError("theta must be positive");
}

}  // namespace

Distribution Distribution::zeros(GridPtr g) {
  const auto n = static_cast<Eigen::Index>(g->size());
  return {std::move(g), Eigen::VectorXd::Zero(n)};
}

Distribution operator+(const Distribution& a, const Distribution& b) {
  same_grid(a, b);
  return {a.grid, a.values + b.values};
}

Distribution operator-(const Distribution& a, const Distribution& b) {
  same_grid(a, b);
  return {a.grid, a.values - b.values};
}

Distribution operator*(double s, const Distribution& a) { return {a.grid, s * a.values}; }

double max_abs_diff(const Distribution& a, const Distribution& b) {
  same_grid(a, b);
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

double max_abs(const Distribution& a) { return a.values.size() ? a.values.cwiseAbs().maxCoeff() : 0.0; }

double l1_norm(const Distribution& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.values.size(); ++i) s += a.grid->weight(i) * std::abs(a.values[i]);
  return s;
}

double maxwellian_value(const MaxwellParams& p, const Vec3& xi) {
  const double d0 = xi[0] - p.u[0], d1 = xi[1] - p.u[1], d2 = xi[2] - p.u[2];
  const double rt = kR * p.theta;
  return p.rho * std::pow(2.0 * std::numbers::pi * rt, -1.5) * std::exp(-(d0 * d0 + d1 * d1 + d2 * d2) / (2.0 * rt));
}

Distribution maxwellian(const MaxwellParams& p, GridPtr grid) {
  check_params(p);
  Distribution f = Distribution::zeros(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) f.values[i] = maxwellian_value(p, grid->node(i));
  return f;
}

MaxwellParams Moments::params() const {
  MaxwellParams p;
  p.rho = rho;
  for (int k = 0; k < 3; ++k) p.u[k] = rho != 0.0 ? momentum[k] / rho : 0.0;
  const double u2 = p.u[0] * p.u[0] + p.u[1] * p.u[1] + p.u[2] * p.u[2];
  p.theta = rho != 0.0 ? energy / rho - 0.5 * u2 : 0.0;
  return p;
}

Moments raw_moments(const Distribution& f) {
  Moments m;
  const auto& g = *f.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double wf = g.weight(i) * f.values[i];
    const Vec3& x = g.node(i);
    m.rho += wf;
    m.momentum[0] += wf * x[0];
    m.momentum[1] += wf * x[1];
    m.momentum[2] += wf * x[2];
    m.energy += 0.5 * wf * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  }
  return m;
}

Moments moments(const Distribution& f) {
  const Moments m = raw_moments(f);
  if (!(m.rho > 0.0)) {
    std::ostringstream os;
    os << "nonphysical moments: rho = " << m.rho;
    throw NonphysicalMoments(os.str());
  }
  const double theta = m.params().theta;
  if (!(theta > 0.0)) {
    std::ostringstream os;
    os << "nonphysical moments: theta = " << theta;
    throw NonphysicalMoments(os.str());
  }
  return m;
}

MaxwellParams discrete_maxwellian_fit(const Distribution& f) {
  const Moments target = moments(f);
  MaxwellParams p = target.params();
  auto vec = [](const Moments& m) {
    Eigen::Matrix<double, 5, 1> v;
    v << m.rho, m.momentum[0], m.momentum[1], m.momentum[2], m.energy;
    return v;
  };
  auto pack = [](const MaxwellParams& q) {
    Eigen::Matrix<double, 5, 1> v;
    v << q.rho, q.u[0], q.u[1], q.u[2], q.theta;
    return v;
  };
  auto unpack = [](const Eigen::Matrix<double, 5, 1>& v) {
    MaxwellParams q;
    q.rho = v[0];
    q.u = {v[1], v[2], v[3]};
    q.theta = v[4];
    return q;
  };
  const auto t = vec(target);
  const double scale = t.cwiseAbs().maxCoeff();
  for (int it = 0; it < 20; ++it) {
    const Eigen::Matrix<double, 5, 1> r = vec(raw_moments(maxwellian(p, f.grid))) - t;
    if (r.cwiseAbs().maxCoeff() <= 1e-15 * scale) break;
    Eigen::Matrix<double, 5, 5> J;
    const auto x = pack(p);
    for (int k = 0; k < 5; ++k) {
      auto xp = x;
      const double e = 1e-7 * std::max(1.0, std::abs(x[k]));
      xp[k] += e;
      J.col(k) = (vec(raw_moments(maxwellian(unpack(xp), f.grid))) - t - r) / e;
    }
    const Eigen::Matrix<double, 5, 1> dx = J.fullPivLu().solve(-r);
    MaxwellParams next = unpack(x + dx);
    if (!(next.rho > 0.0 && next.theta > 0.0)) break;
    p = next;
    if (dx.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) break;
  }
  return p;
}

double inner_product(const Distribution& g1, const Distribution& g2, const Distribution& ref) {
  same_grid(g1, g2);
  same_grid(g1, ref);
  double s = 0.0;
  for (Eigen::Index i = 0; i < g1.values.size(); ++i) {
    if (!(ref.values[i] > 0.0)) throw DomainError("reference distribution must be positive on all nodes");
    s += g1.grid->weight(i) * g1.values[i] * g2.values[i] / ref.values[i];
  }
  return s;
}

std::array<Distribution, 5> chi_basis(const MaxwellParams& p, GridPtr grid) {
  check_params(p);
  const Distribution M = maxwellian(p, grid);
  std::array<Distribution, 5> chi;
  for (auto& c : chi) c = Distribution::zeros(grid);
  const double rt = kR * p.theta;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vec3& x = grid->node(i);
    const double d0 = x[0] - p.u[0], d1 = x[1] - p.u[1], d2 = x[2] - p.u[2];
    const double m = M.values[i];
    chi[0].values[i] = m / std::sqrt(p.rho);
    chi[1].values[i] = d0 * m / std::sqrt(rt * p.rho);
    chi[2].values[i] = d1 * m / std::sqrt(rt * p.rho);
    chi[3].values[i] = d2 * m / std::sqrt(rt * p.rho);
    chi[4].values[i] = ((d0 * d0 + d1 * d1 + d2 * d2) / rt - 3.0) * m / std::sqrt(6.0 * p.rho);
  }
  return chi;
}

Eigen::Matrix<double, 5, 5> gram_matrix(const std::array<Distribution, 5>& chi, const Distribution& ref) {
  Eigen::Matrix<double, 5, 5> G;
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) G(i, j) = G(j, i) = inner_product(chi[i], chi[j], ref);
  return G;
}

Distribution project_P0(const Distribution& g, const MaxwellParams& p) {
  const auto chi = chi_basis(p, g.grid);
  const Distribution M = maxwellian(p, g.grid);
  const auto G = gram_matrix(chi, M);
  Eigen::Matrix<double, 5, 1> b;
  for (int j = 0; j < 5; ++j) b[j] = inner_product(chi[j], g, M);
  const Eigen::Matrix<double, 5, 1> c = G.ldlt().solve(b);
  Distribution out = Distribution::zeros(g.grid);
  for (int j = 0; j < 5; ++j) out.values += c[j] * chi[j].values;
  return out;
}

Distribution project_P1(const Distribution& g, const MaxwellParams& p) { return g - project_P0(g, p); }

Distribution project_Pc(const Distribution& g, const MaxwellParams& p) {
  const Distribution M = maxwellian(p, g.grid);
  double mass_g = 0.0, mass_m = 0.0;
  for (Eigen::Index i = 0; i < g.values.size(); ++i) {
    mass_g += g.grid->weight(i) * g.values[i];
    mass_m += g.grid->weight(i) * M.values[i];
  }
  return g - (mass_g / mass_m) * M;
}

Split micro_macro_split(const Distribution& F) {
  Split s;
  s.params = discrete_maxwellian_fit(F);
  s.maxwellian = maxwellian(s.params, F.grid);
  s.micro = F - s.maxwellian;
  return s;
}

double conservation_defect(const Distribution& q, double scale) {
  const Moments m = raw_moments(q);
  const double worst = std::max({std::abs(m.rho), std::abs(m.momentum[0]), std::abs(m.momentum[1]),
                                 std::abs(m.momentum[2]), std::abs(m.energy)});
  return scale > 0.0 ? worst / scale : worst;
}

// Hard spheres: the Maxwellian average of |xi - xi_*| has a closed form
// (mean of a noncentral chi with 3 degrees of freedom).
double nu_freq(const Vec3& xi, const MaxwellParams& p) {
  check_params(p);
  const double s = std::sqrt(kR * p.theta);
  const double d0 = xi[0] - p.u[0], d1 = xi[1] - p.u[1], d2 = xi[2] - p.u[2];
  const double a = std::sqrt(d0 * d0 + d1 * d1 + d2 * d2) / s;
  constexpr double c = 0.79788456080286535588;  // sqrt(2 / pi)
  double mean;
  if (a < 1e-4) {
    mean = 2.0 * c * (1.0 + a * a / 6.0);  // series; (a + 1/a) erf loses digits near 0
  } else {
    mean = c * std::exp(-0.5 * a * a) + (a + 1.0 / a) * std::erf(a / std::numbers::sqrt2);
  }
  // hemisphere integral of |V . Omega| is pi |V|
  return std::numbers::pi * p.rho * s * mean;
}

Eigen::VectorXd nu_on_grid(const VelocityGrid& grid, const MaxwellParams& p) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out[static_cast<Eigen::Index>(i)] = nu_freq(grid.node(i), p);
  return out;
}

double nu_weighted_norm2(const Distribution& g, const Eigen::VectorXd& nu, const Distribution& mstar, bool inverse) {
  same_grid(g, mstar);
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.values.size(); ++i) {
    const double f = inverse ? 1.0 / nu[i] : nu[i];
    s += g.grid->weight(i) * f * g.values[i] * g.values[i] / mstar.values[i];
  }
  return s;
}

void write_distribution_csv(const Distribution& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  out << "index,xi1,xi2,xi3,value\n";
  char buf[160];
  for (std::size_t i = 0; i < f.grid->size(); ++i) {
    const Vec3& x = f.grid->node(i);
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g,%.17g\n", i, x[0], x[1], x[2], f.values[static_cast<Eigen::Index>(i)]);
    out << buf;
  }
}

}  // namespace vpb::kinetic
