#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include "vpbwave/errors.hpp"
#include "vpbwave/kinetic.hpp"

using namespace vpb::kinetic;

namespace {

// polynomial (degree <= 3 in the scaled velocity) times the Maxwellian
Distribution random_poly(GridPtr g, const MaxwellParams& p, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  double c[10];
  for (double& x : c) x = N(rng);
  Distribution f = maxwellian(p, g);
  const double s = std::sqrt(kR * p.theta);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Vec3& x = g->node(i);
    const double a = (x[0] - p.u[0]) / s, b = (x[1] - p.u[1]) / s, d = (x[2] - p.u[2]) / s;
    f.values[static_cast<Eigen::Index>(i)] *=
        c[0] + c[1] * a + c[2] * b + c[3] * d + c[4] * a * a + c[5] * a * b + c[6] * d * d + c[7] * a * a * a +
        c[8] * a * b * d + c[9] * b * b * d;
  }
  return f;
}

double moment_dev(const Distribution& g) {
  const Moments m = raw_moments(g);
  return std::max({std::abs(m.rho), std::abs(m.momentum[0]), std::abs(m.momentum[1]), std::abs(m.momentum[2]),
                   std::abs(m.energy)});
}

// E|c - Z| for Z ~ N(0, s^2 I_3), |c| = r: average over directions first,
// (1/2) int_{-1}^{1} |c - Z| dmu = ((r + q)^3 - |r - q|^3) / (6 r q), q = |Z|,
// then over the radial density of |Z|
double mean_distance(double r, double s) {
  auto f = [&](double q) {
    const double dens = 4.0 * M_PI * q * q * std::pow(2.0 * M_PI * s * s, -1.5) * std::exp(-0.5 * q * q / (s * s));
    const double ang = r == 0.0 ? q : (std::pow(r + q, 3) - std::pow(std::abs(r - q), 3)) / (6.0 * r * q);
    return dens * ang;
  };
  // split at the kink q = r
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = r > 0.0 ? GK::integrate(f, 0.0, r, 15, 1e-14) : 0.0;
  total += GK::integrate(f, r, r + 20.0 * s, 15, 1e-14);
  return total;
}

}  // namespace

TEST_CASE("maxwellian moments on gauss-hermite grids") {
  MaxwellParams p;
  const GridPtr g = VelocityGrid::gauss_hermite(8, p);
  const Moments m = moments(maxwellian(p, g));
  CHECK(m.rho == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(m.momentum[0]) < 1e-13);
  CHECK(m.energy == doctest::Approx(1.0).epsilon(1e-13));

  MaxwellParams q;
  q.u = {0.3, 0.0, 0.0};
  const GridPtr g2 = VelocityGrid::gauss_hermite(8, q);
  const Moments m2 = moments(maxwellian(q, g2));
  CHECK(m2.momentum[0] == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(m2.energy == doctest::Approx(1.045).epsilon(1e-13));
  CHECK(maxwellian_value(q, q.u) == doctest::Approx(std::pow(2.0 * M_PI * kR, -1.5)));

  const Moments half = raw_moments(0.5 * maxwellian(q, g2));
  CHECK(half.rho == doctest::Approx(0.5 * m2.rho));
  CHECK(half.energy == doctest::Approx(0.5 * m2.energy));
  CHECK_THROWS_AS(moments(-1.0 * maxwellian(q, g2)), vpb::NonphysicalMoments);

  const MaxwellParams back = m2.params();
  CHECK(back.theta == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chi basis and projections") {
  std::mt19937_64 rng(9);
  MaxwellParams p;
  p.rho = 1.4;
  p.u = {0.4, -0.2, 0.1};
  p.theta = 0.8;
  const GridPtr g = VelocityGrid::gauss_hermite(24, p);
  const Distribution M = maxwellian(p, g);
  const auto chi = chi_basis(p, g);
  CHECK((gram_matrix(chi, M) - Eigen::Matrix<double, 5, 5>::Identity()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(inner_product(chi[0], chi[0], M) == doctest::Approx(1.0));
  CHECK(inner_product(M, M, M) == doctest::Approx(p.rho).epsilon(1e-12));

  const GridPtr gs = VelocityGrid::gauss_hermite(10, p);
  const Distribution Ms = maxwellian(p, gs);
  CHECK(max_abs(project_P0(Ms, p) - Ms) <= 1e-10 * max_abs(Ms));
  CHECK(max_abs(project_P1(Ms, p)) <= 1e-10 * max_abs(Ms));
  CHECK(max_abs(project_Pc(Ms, p)) <= 1e-12 * max_abs(Ms));
  for (int k = 0; k < 20; ++k) {
    const Distribution f = random_poly(gs, p, rng);
    const Distribution a = project_P0(f, p);
    CHECK(max_abs(project_P0(a, p) - a) <= 1e-12 * max_abs(f));
    CHECK(max_abs(a + project_P1(f, p) - f) <= 1e-12 * max_abs(f));
    CHECK(max_abs(project_P0(project_P1(f, p), p)) <= 1e-12 * max_abs(f));
    CHECK(moment_dev(project_P1(f, p)) <= 1e-10 * l1_norm(f));
    const Distribution c = project_Pc(f, p);
    CHECK(std::abs(raw_moments(c).rho) <= 1e-10 * l1_norm(f));
    CHECK(max_abs(project_Pc(c, p) - c) <= 1e-12 * max_abs(f));
    // moments of M + microscopic part are those of M
    const Moments mm = raw_moments(Ms + project_P1(f, p)), m0 = raw_moments(Ms);
    CHECK(mm.rho == doctest::Approx(m0.rho).epsilon(1e-8));
    CHECK(mm.energy == doctest::Approx(m0.energy).epsilon(1e-8));
  }
  for (int k = 0; k < 100; ++k) {
    const Distribution a = random_poly(gs, p, rng), b = random_poly(gs, p, rng);
    const double ab = inner_product(a, b, Ms);
    CHECK(ab == doctest::Approx(inner_product(b, a, Ms)).epsilon(1e-14));
    CHECK(ab * ab <= inner_product(a, a, Ms) * inner_product(b, b, Ms) * (1.0 + 1e-12));
  }
}

TEST_CASE("micro-macro split") {
  MaxwellParams p;
  p.u = {0.1, 0.2, 0.0};
  p.theta = 1.2;
  const GridPtr g = VelocityGrid::gauss_hermite(12, p);
  const Split pure = micro_macro_split(maxwellian(p, g));
  CHECK(max_abs(pure.micro) <= 1e-12);
  std::mt19937_64 rng(1);
  const Distribution F = maxwellian(p, g) + 0.05 * random_poly(g, p, rng);
  const Split s = micro_macro_split(F);
  CHECK(max_abs(s.maxwellian + s.micro - F) <= 1e-15 * max_abs(F));
  CHECK(moment_dev(s.micro) <= 1e-10);
}

TEST_CASE("collision frequency") {
  MaxwellParams p;
  p.rho = 0.7;
  p.u = {0.2, 0.0, 0.0};
  p.theta = 1.1;
  const double s = std::sqrt(kR * p.theta);
  const Vec3 a{0.9, -0.4, 0.3};
  CHECK(nu_freq({p.u[0] + a[0], a[1], a[2]}, p) == doctest::Approx(nu_freq({p.u[0] - a[0], -a[1], -a[2]}, p)).epsilon(1e-13));
  for (double r : {0.0, 5e-5, 0.5, 1.5, 3.0, 6.0}) {
    const double nu = nu_freq({p.u[0] + r, 0.0, 0.0}, p);
    CHECK(nu == doctest::Approx(M_PI * p.rho * mean_distance(r, s)).epsilon(1e-11));
    CHECK(nu / (1.0 + r) > 0.5);
    CHECK(nu / (1.0 + r) < 5.0);
  }
  const double r0 = 8.0 * std::sqrt(p.theta), r1 = 8.5 * std::sqrt(p.theta);
  const double slope = (nu_freq({p.u[0] + r1, 0.0, 0.0}, p) - nu_freq({p.u[0] + r0, 0.0, 0.0}, p)) / (r1 - r0);
  CHECK(slope == doctest::Approx(M_PI * p.rho).epsilon(1e-2));
}

TEST_CASE("collision operator on a small box") {
  const GridPtr g = VelocityGrid::uniform_box(12, 6.0);
  MaxwellParams p;
  p.u = {0.2, -0.1, 0.0};
  p.theta = 1.1;
  const Distribution M = maxwellian(p, g);
  CHECK(max_abs(collision_Q(M, M)) <= 1e-3 * max_abs(M));

  MaxwellParams q;
  q.rho = 0.9;
  q.theta = 0.9;
  const Distribution f = maxwellian(q, g);
  std::mt19937_64 rng(4);
  const Distribution h = M + 0.1 * random_poly(g, p, rng);
  const Distribution a = collision_Q(2.5 * f, h), b = collision_Q(f, h);
  CHECK(max_abs(a - 2.5 * b) <= 1e-13 * max_abs(a));

  CollisionReport rep;
  collision_Q_sym(f, h, {}, &rep);
  // 12^3 is far from converged; only the flag logic is checked here
  CHECK(std::isfinite(rep.conservation_defect));
  CHECK(rep.grid_too_coarse == (rep.conservation_defect > CollisionQuad{}.defect_bound));
  CHECK(rep.pairs > 0);

  // 8^3 is too coarse for the bound
  const GridPtr coarse = VelocityGrid::uniform_box(8, 6.0);
  CollisionQuad quad;
  quad.defect_bound = 1e-4;
  CollisionReport cr;
  collision_Q_sym(maxwellian(q, coarse), maxwellian(p, coarse), quad, &cr);
  CHECK(cr.grid_too_coarse);
}

TEST_CASE("linearized operators: dissipativity, null spaces and inverses") {
  MaxwellParams p;
  p.rho = 1.0 / 3.0;
  p.u = {0.1, 0.0, 0.0};
  const GridPtr g = VelocityGrid::uniform_box(10, 6.0);
  const LinearizedOperators ops = assemble_linearized(g, p);
  const Distribution M = maxwellian(p, g);
  CHECK((ops.L * M.values).cwiseAbs().maxCoeff() <= 1e-3 * max_abs(M));
  CHECK((ops.N * M.values).cwiseAbs().maxCoeff() <= 1e-3 * max_abs(M));

  const GlobalMaxwellianStar star = choose_global_maxwellian({p});
  CHECK(star.theta_star > 0.5 * p.theta);
  CHECK(star.theta_star < p.theta);
  const Distribution Ms = maxwellian(star.params(), g);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const Distribution x = project_P1(random_poly(g, p, rng), p);
    const Distribution Lx{g, ops.L * x.values};
    CHECK(inner_product(x, Lx, Ms) <= 1e-8 * inner_product(x, x, Ms));
    const Distribution y = project_Pc(random_poly(g, p, rng), p);
    const Distribution Ny{g, ops.N * y.values};
    CHECK(inner_product(y, Ny, Ms) <= 1e-8 * inner_product(y, y, Ms));
  }

  // matrix agrees with the operator form; the two prune partners
  // differently, so compare with pruning off
  {
    CollisionQuad all;
    all.prune = 0.0;
    const GridPtr gc = VelocityGrid::uniform_box(8, 6.0);
    const LinearizedOperators full = assemble_linearized(gc, p, all);
    const Distribution x = project_P1(random_poly(gc, p, rng), p);
    const Distribution l = linearized_LM(x, p, all);
    CHECK((full.L * x.values - l.values).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(l));
    const Distribution nl = linearized_NM(x, p, all);
    CHECK((full.N * x.values - nl.values).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(nl));
  }

  // inverse roundtrip
  for (int k = 0; k < 5; ++k) {
    const Distribution gx = project_P1(random_poly(g, p, rng), p);
    const Distribution h = project_P1(Distribution{g, ops.L * gx.values}, p);
    const InverseResult inv = invert_LM_on_microspace(ops, h, 1e-10);
    const Distribution d = inv.g - gx;
    CHECK(std::sqrt(inner_product(d, d, M) / inner_product(gx, gx, M)) <= 1e-8);
    CHECK(max_abs(project_P0(inv.g, p)) <= 1e-10 * max_abs(inv.g));
  }
  const InverseResult zero = invert_LM_on_microspace(ops, Distribution::zeros(g), 1e-10);
  CHECK(max_abs(zero.g) == 0.0);
  CHECK_THROWS_AS(invert_LM_on_microspace(ops, M, 1e-10), vpb::NotMicroscopic);

  const Distribution nz = project_Pc(random_poly(g, p, rng), p);
  const Distribution hn{g, ops.N * nz.values};
  const InverseResult invn = invert_NM_on_meanfree(ops, project_Pc(hn, p), 1e-10);
  CHECK(std::sqrt(inner_product(invn.g - nz, invn.g - nz, M) / inner_product(nz, nz, M)) <= 1e-10);

  // gbar
  CHECK(max_abs(gbar(ops, 1.0, 0.0, 0.0)) == 0.0);
  const Distribution g1 = gbar(ops, 1.2, 0.3, 0.0), g2 = gbar(ops, 1.2, 0.0, -0.2), g3 = gbar(ops, 1.2, 0.3, -0.2);
  CHECK(max_abs(g1 + g2 - g3) <= 1e-7 * max_abs(g3));
  CHECK(moment_dev(g3) <= 1e-8 * l1_norm(g3));
}

TEST_CASE("global maxwellian choice") {
  MaxwellParams a, b;
  a.theta = 1.0;
  b.theta = 1.6;
  const GlobalMaxwellianStar s = choose_global_maxwellian({a, b});
  CHECK(s.theta_star > 0.8);
  CHECK(s.theta_star < 1.0);
  b.theta = 2.5;
  CHECK_THROWS_AS(choose_global_maxwellian({a, b}), vpb::DomainError);
}
