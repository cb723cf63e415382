#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>

#include "inverse_cache.hpp"
#include "quadrature.hpp"
#include "vpbwave/errors.hpp"
#include "vpbwave/kinetic.hpp"
#include "vpbwave/parallel.hpp"

namespace vpb::kinetic {
namespace {

struct Stencil {
  std::array<std::size_t, 64> idx;
  std::array<double, 64> c;
  std::array<double, 3> q;  // t (1 - t) per axis, trilinear only
  int count = 0;
};

struct BoxMap {
  int n;
  double inv_h;
  Vec3 lo;  // first node
  Interpolation mode;
  BoxMap(const VelocityGrid& g, Interpolation m) : n(g.n()), inv_h(1.0 / g.spacing()), mode(m) {
    for (int k = 0; k < 3; ++k) lo[k] = g.center()[k] - g.half_width() + 0.5 * g.spacing();
  }
};

// Interpolation stencil at p; false outside the node hull. Cubic falls back
// to trilinear where the 4-node window would leave the box.
inline bool make_stencil(const BoxMap& g, const Vec3& p, Stencil& s) {
  const int n = g.n;
  int base[3];
  double t[3];
  bool cubic = g.mode == Interpolation::cubic;
  for (int k = 0; k < 3; ++k) {
    const double x = (p[k] - g.lo[k]) * g.inv_h;
    if (!(x >= 0.0 && x <= n - 1)) return false;
    int b = static_cast<int>(x);
    if (b >= n - 1) b = n - 2;
    base[k] = b;
    t[k] = x - b;
    if (b < 1 || b > n - 3) cubic = false;
  }
  const std::size_t nn = static_cast<std::size_t>(n);
  if (!cubic) {
    const std::size_t i0 = (static_cast<std::size_t>(base[0]) * nn + base[1]) * nn + base[2];
    const std::size_t dx = nn * nn, dy = nn;
    const double x0 = 1 - t[0], x1 = t[0], y0 = 1 - t[1], y1 = t[1], z0 = 1 - t[2], z1 = t[2];
    s.idx[0] = i0;           s.c[0] = x0 * y0 * z0;
    s.idx[1] = i0 + 1;       s.c[1] = x0 * y0 * z1;
    s.idx[2] = i0 + dy;      s.c[2] = x0 * y1 * z0;
    s.idx[3] = i0 + dy + 1;  s.c[3] = x0 * y1 * z1;
    s.idx[4] = i0 + dx;      s.c[4] = x1 * y0 * z0;
    s.idx[5] = i0 + dx + 1;  s.c[5] = x1 * y0 * z1;
    s.idx[6] = i0 + dx + dy; s.c[6] = x1 * y1 * z0;
    s.idx[7] = i0 + dx + dy + 1; s.c[7] = x1 * y1 * z1;
    s.q = {x0 * x1, y0 * y1, z0 * z1};
    s.count = 8;
    return true;
  }
  double w[3][4];
  for (int k = 0; k < 3; ++k) {
    const double x = t[k];
    w[k][0] = -x * (x - 1) * (x - 2) / 6.0;
    w[k][1] = (x + 1) * (x - 1) * (x - 2) / 2.0;
    w[k][2] = -(x + 1) * x * (x - 2) / 2.0;
    w[k][3] = (x + 1) * x * (x - 1) / 6.0;
  }
  const std::size_t i0 = (static_cast<std::size_t>(base[0] - 1) * nn + (base[1] - 1)) * nn + (base[2] - 1);
  int m = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const std::size_t row = i0 + (a * nn + b) * nn;
      const double wab = w[0][a] * w[1][b];
      for (int c = 0; c < 4; ++c) {
        s.idx[m] = row + c;
        s.c[m] = wab * w[2][c];
        ++m;
      }
    }
  s.q = {0.0, 0.0, 0.0};
  s.count = 64;
  return true;
}

// Nodal values packed with their axis second differences. The trilinear
// error is -(1/2) sum_k t_k (1 - t_k) h^2 f_kk, so subtracting the
// interpolated differences makes the interpolant exact on quadratics.
struct Field {
  std::vector<double> d;  // 4 per node: value, d_00, d_11, d_22
  bool corrected = false;
};

Field make_field(const VelocityGrid& g, const Eigen::VectorXd& v, Interpolation mode) {
  Field f;
  f.corrected = mode == Interpolation::corrected;
  const int n = g.n();
  f.d.assign(4 * g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) f.d[4 * i] = v[static_cast<Eigen::Index>(i)];
  if (!f.corrected) return f;
  const std::size_t stride[3] = {static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n), 1};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k) {
        const std::size_t i = g.index(a, b, k);
        const int pos[3] = {a, b, k};
        for (int ax = 0; ax < 3; ++ax) {
          if (pos[ax] == 0 || pos[ax] == n - 1) continue;
          f.d[4 * i + 1 + ax] = f.d[4 * (i + stride[ax])] - 2.0 * f.d[4 * i] + f.d[4 * (i - stride[ax])];
        }
      }
  return f;
}

inline double interp(const Field& v, const Stencil& s) {
  double r = 0.0;
  if (!v.corrected || s.count != 8) {
    for (int m = 0; m < s.count; ++m) r += s.c[m] * v.d[4 * s.idx[m]];
    return r;
  }
  const double h0 = 0.5 * s.q[0], h1 = 0.5 * s.q[1], h2 = 0.5 * s.q[2];
  for (int m = 0; m < 8; ++m) {
    const double* p = &v.d[4 * s.idx[m]];
    r += s.c[m] * (p[0] - h0 * p[1] - h1 * p[2] - h2 * p[3]);
  }
  return r;
}

// The same interpolant as a linear map: add(node, coefficient).
template <class Add>
inline void interp_weights(const VelocityGrid& g, const Stencil& s, Interpolation mode, Add&& add) {
  if (mode != Interpolation::corrected || s.count != 8) {
    for (int m = 0; m < s.count; ++m) add(s.idx[m], s.c[m]);
    return;
  }
  const int n = g.n();
  const std::size_t stride[3] = {static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n), 1};
  for (int m = 0; m < 8; ++m) {
    const std::size_t i = s.idx[m];
    std::size_t rest = i;
    double centre = s.c[m];
    for (int ax = 0; ax < 3; ++ax) {
      const auto pos = static_cast<int>(rest / stride[ax]);
      rest %= stride[ax];
      if (pos == 0 || pos == n - 1) continue;
      const double k = 0.5 * s.q[ax] * s.c[m];
      add(i + stride[ax], -k);
      add(i - stride[ax], -k);
      centre += 2.0 * k;
    }
    add(i, centre);
  }
}

struct Angles {
  std::vector<Vec3> dir;  // upper half of a symmetric product grid
  std::vector<double> w;
};

// Product grid (Gauss-Legendre in cos, midpoint in phi) on the full sphere;
// the grid is symmetric under Omega -> -Omega and both give the same
// post-collision pair, so masking (V . Omega) >= 0 equals summing |V . Omega|
// over the mu > 0 half.
Angles make_angles(int n_phi, int n_mu) {
  if (n_phi < 2 || n_phi % 2 || n_mu < 2 || n_mu % 2) {
    throw DomainError("angular grid needs even n_phi and n_mu");
  }
  const auto [mu, wmu] = detail::gauss_legendre(n_mu);
  Angles a;
  for (int i = 0; i < n_mu; ++i) {
    if (mu[i] <= 0.0) continue;
    const double st = std::sqrt(1.0 - mu[i] * mu[i]);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * std::numbers::pi * (j + 0.5) / n_phi;
      a.dir.push_back({st * std::cos(phi), st * std::sin(phi), mu[i]});
      a.w.push_back(wmu[i] * 2.0 * std::numbers::pi / n_phi);
    }
  }
  return a;
}

struct PairSet {
  std::vector<std::size_t> order;  // nodes sorted by |xi - c|^2
  std::vector<double> r2;          // sorted radii
  std::vector<double> r2_node;     // per node
  double e_cut = std::numeric_limits<double>::infinity();
};

std::vector<double> tail_envelope(const VelocityGrid& g, const Eigen::VectorXd& f, const std::vector<double>& r2,
                                  double dr, int nb) {
  std::vector<double> env(nb + 1, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int b = std::min(nb, static_cast<int>(r2[i] / dr));
    env[b] = std::max(env[b], std::abs(f[static_cast<Eigen::Index>(i)]));
  }
  for (int b = nb - 1; b >= 0; --b) env[b] = std::max(env[b], env[b + 1]);
  return env;
}

// Energy cut: |xi'|^2 + |xi*'|^2 = |xi|^2 + |xi*|^2 about the box center, so a
// pair whose total exceeds E can only see values bounded by the product of
// the two tail envelopes.
PairSet make_pairs(const VelocityGrid& g, const Eigen::VectorXd& f, const Eigen::VectorXd& gg, double prune) {
  PairSet ps;
  const std::size_t n = g.size();
  ps.r2_node.resize(n);
  double rmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& x = g.node(i);
    const double d0 = x[0] - g.center()[0], d1 = x[1] - g.center()[1], d2 = x[2] - g.center()[2];
    ps.r2_node[i] = d0 * d0 + d1 * d1 + d2 * d2;
    rmax = std::max(rmax, ps.r2_node[i]);
  }
  ps.order.resize(n);
  std::iota(ps.order.begin(), ps.order.end(), std::size_t{0});
  std::stable_sort(ps.order.begin(), ps.order.end(),
                   [&](std::size_t a, std::size_t b) { return ps.r2_node[a] < ps.r2_node[b]; });
  ps.r2.resize(n);
  for (std::size_t k = 0; k < n; ++k) ps.r2[k] = ps.r2_node[ps.order[k]];
  if (prune <= 0.0) return ps;

  const int nb = 1024;
  const double dr = (rmax + 1e-12) / nb;
  const auto F = tail_envelope(g, f, ps.r2_node, dr, nb);
  const auto G = tail_envelope(g, gg, ps.r2_node, dr, nb);
  const double thr = prune * F[0] * G[0];
  if (!(thr > 0.0)) return ps;
  for (int m = 0; m <= 2 * nb; ++m) {
    double b = 0.0;
    for (int ka = 0; ka <= std::min(m, nb); ++ka) {
      const int kb = std::clamp(m - ka - 1, 0, nb);
      b = std::max(b, F[ka] * G[kb]);
    }
    if (b < thr) {
      ps.e_cut = m * dr;
      break;
    }
  }
  return ps;
}

inline bool keep_pair(std::size_t i, std::size_t j, const CollisionQuad& q) {
  if (q.subsample >= 1.0) return true;
  std::uint64_t a = std::min(i, j), b = std::max(i, j);
  std::uint64_t x = q.seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2));
  x ^= x >> 33; x *= 0xff51afd7ed558ccdULL; x ^= x >> 33; x *= 0xc4ceb9fe1a85ec53ULL; x ^= x >> 33;
  return static_cast<double>(x >> 11) * 0x1.0p-53 < q.subsample;
}

// Reference Maxwellians. Interpolation acts on f / W_f and g / W_g, and the
// references themselves are evaluated exactly at the post-collision points.
struct Reference {
  MaxwellParams p;
  double a = 0.0;  // log prefactor
  double b = 0.0;  // 1 / (2 R theta)
  double at(const Vec3& x) const {
    const double d0 = x[0] - p.u[0], d1 = x[1] - p.u[1], d2 = x[2] - p.u[2];
    return std::exp(a - b * (d0 * d0 + d1 * d1 + d2 * d2));
  }
};

inline double pair_reference(const Reference& f, const Vec3& x, const Reference& g, const Vec3& y) {
  const double a0 = x[0] - f.p.u[0], a1 = x[1] - f.p.u[1], a2 = x[2] - f.p.u[2];
  const double b0 = y[0] - g.p.u[0], b1 = y[1] - g.p.u[1], b2 = y[2] - g.p.u[2];
  return std::exp(f.a + g.a - f.b * (a0 * a0 + a1 * a1 + a2 * a2) - g.b * (b0 * b0 + b1 * b1 + b2 * b2));
}

Reference make_reference(const MaxwellParams& p) {
  Reference r;
  r.p = p;
  r.p.rho = 1.0;
  r.b = 1.0 / (2.0 * kR * p.theta);
  r.a = -1.5 * std::log(2.0 * std::numbers::pi * kR * p.theta);
  return r;
}

MaxwellParams default_reference(const VelocityGrid& g, const Eigen::VectorXd& f) {
  MaxwellParams ref;
  ref.u = g.center();
  ref.theta = std::pow(g.half_width() / 8.0, 2) / kR;
  GridPtr view(&g, [](const VelocityGrid*) {});
  const MaxwellParams m = raw_moments(Distribution{view, f.cwiseAbs()}).params();
  if (m.rho > 0.0 && m.theta > 0.0) ref = m;
  ref.rho = 1.0;
  return ref;
}

struct Weighting {
  bool weighted = false;
  bool shared = false;  // same reference for both slots: W(xi')W(xi*') = W(xi)W(xi*)
  Reference ref_f, ref_g;
  Eigen::VectorXd Wf, Wg;
};

Weighting make_weighting(const VelocityGrid& g, const CollisionQuad& q, const Eigen::VectorXd& f,
                         const Eigen::VectorXd& gg) {
  Weighting w;
  w.weighted = q.weighted;
  const auto n = static_cast<Eigen::Index>(g.size());
  if (!q.weighted) {
    w.shared = true;
    w.Wf = w.Wg = Eigen::VectorXd::Ones(n);
    return w;
  }
  const MaxwellParams pf = q.has_reference ? q.reference : default_reference(g, f);
  const MaxwellParams pg = q.has_reference ? q.reference : default_reference(g, gg);
  w.ref_f = make_reference(pf);
  w.ref_g = make_reference(pg);
  w.shared = q.has_reference || (pf.u == pg.u && pf.theta == pg.theta);
  w.Wf.resize(n);
  w.Wg.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w.Wf[i] = w.ref_f.at(g.node(static_cast<std::size_t>(i)));
    w.Wg[i] = w.ref_g.at(g.node(static_cast<std::size_t>(i)));
  }
  return w;
}

void require_box(const VelocityGrid& g) {
  if (g.kind() != GridKind::uniform_box) {
    throw DomainError("collision operator needs a uniform box grid (post-collision interpolation)");
  }
}

struct Hit {
  std::size_t j;
  double w;  // half_weight * w_Omega * |V . Omega|, without the partner weight
  Stencil s1, s2;
  bool ok;    // both post-collision points inside the node hull
  Vec3 p1, p2;  // xi', xi*'
};

// Calls body(hit) for every retained partner j > i (unordered) or j != i of
// row i and every direction.
template <class Body>
void visit_row(const VelocityGrid& g, const BoxMap& box, const Angles& ang, const PairSet& ps, const CollisionQuad& q,
               std::size_t i, bool unordered, Body&& body) {
  const double ri = ps.r2_node[i];
  if (!(ri < ps.e_cut)) return;
  const double limit = ps.e_cut - ri;
  const Vec3& xi = g.node(i);
  const double scale = q.subsample < 1.0 ? 1.0 / q.subsample : 1.0;
  Hit h;
  for (std::size_t k = 0; k < ps.order.size() && ps.r2[k] < limit; ++k) {
    const std::size_t j = ps.order[k];
    if (j == i || (unordered && j < i) || !keep_pair(i, j, q)) continue;
    const Vec3& xs = g.node(j);
    const Vec3 V{xi[0] - xs[0], xi[1] - xs[1], xi[2] - xs[2]};
    h.j = j;
    for (std::size_t a = 0; a < ang.dir.size(); ++a) {
      const Vec3& o = ang.dir[a];
      const double d = V[0] * o[0] + V[1] * o[1] + V[2] * o[2];
      h.p1 = {xi[0] - d * o[0], xi[1] - d * o[1], xi[2] - d * o[2]};
      h.p2 = {xs[0] + d * o[0], xs[1] + d * o[1], xs[2] + d * o[2]};
      h.ok = make_stencil(box, h.p1, h.s1) && make_stencil(box, h.p2, h.s2);
      h.w = 0.5 * scale * ang.w[a] * std::abs(d);
      body(h);
    }
  }
}

struct QPair {
  Eigen::VectorXd fg;  // Q(f, g)
  Eigen::VectorXd gf;  // Q(g, f)
  std::size_t pairs = 0;
};

// Both orderings in one sweep over unordered node pairs. Row j with partner i
// sees the same directions with xi' and xi*' exchanged.
QPair collision_kernel(const Distribution& f, const Distribution& g, const CollisionQuad& quad) {
  if (f.grid != g.grid) throw DomainError("collision_Q arguments live on different grids");
  const VelocityGrid& grid = *f.grid;
  require_box(grid);
  const BoxMap box(grid, quad.interpolation);
  const Angles ang = make_angles(quad.n_phi, quad.n_mu);
  const Weighting wt = make_weighting(grid, quad, f.values, g.values);
  const Field rf = make_field(grid, f.values.cwiseQuotient(wt.Wf), quad.interpolation);
  const Field rg = make_field(grid, g.values.cwiseQuotient(wt.Wg), quad.interpolation);
  const PairSet ps = make_pairs(grid, f.values, g.values, quad.prune);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double* F = f.values.data();
  const double* G = g.values.data();

  QPair out;
  out.fg = Eigen::VectorXd::Zero(n);
  out.gf = Eigen::VectorXd::Zero(n);
  // per-chunk buffers, summed in chunk order so the result does not depend
  // on thread timing
  struct Part {
    std::size_t begin;
    Eigen::VectorXd fg, gf;
    std::size_t pairs;
  };
  std::vector<Part> parts;
  std::mutex merge;
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    Eigen::VectorXd fg = Eigen::VectorXd::Zero(n), gf = Eigen::VectorXd::Zero(n);
    std::size_t pairs = 0;
    for (std::size_t i = b; i < e; ++i) {
      std::size_t last = std::numeric_limits<std::size_t>::max();
      double acc_fg = 0.0, acc_gf = 0.0;
      visit_row(grid, box, ang, ps, quad, i, true, [&](const Hit& h) {
        const std::size_t j = h.j;
        // gains at row i: f(xi') g(xi*') and g(xi') f(xi*'); row j swaps the points
        double gi_fg = 0.0, gi_gf = 0.0, gj_fg = 0.0, gj_gf = 0.0;
        if (h.ok) {
          const double f1 = interp(rf, h.s1), f2 = interp(rf, h.s2);
          const double g1 = interp(rg, h.s1), g2 = interp(rg, h.s2);
          double w12 = 1.0, w21 = 1.0;  // W_f(xi') W_g(xi*'), W_f(xi*') W_g(xi')
          if (wt.weighted) {
            if (wt.shared) {
              w12 = w21 = wt.Wf[static_cast<Eigen::Index>(i)] * wt.Wf[static_cast<Eigen::Index>(j)];
            } else {
              w12 = pair_reference(wt.ref_f, h.p1, wt.ref_g, h.p2);
              w21 = pair_reference(wt.ref_f, h.p2, wt.ref_g, h.p1);
            }
          }
          gi_fg = w12 * f1 * g2;
          gi_gf = w21 * g1 * f2;
          gj_fg = w21 * f2 * g1;
          gj_gf = w12 * g2 * f1;
        }
        const double wi = h.w * grid.weight(j);
        const double wj = h.w * grid.weight(i);
        acc_fg += wi * (gi_fg - F[i] * G[j]);
        acc_gf += wi * (gi_gf - G[i] * F[j]);
        fg[static_cast<Eigen::Index>(j)] += wj * (gj_fg - F[j] * G[i]);
        gf[static_cast<Eigen::Index>(j)] += wj * (gj_gf - G[j] * F[i]);
        if (j != last) {
          pairs += 2;
          last = j;
        }
      });
      fg[static_cast<Eigen::Index>(i)] += acc_fg;
      gf[static_cast<Eigen::Index>(i)] += acc_gf;
    }
    std::lock_guard<std::mutex> lock(merge);
    parts.push_back({b, std::move(fg), std::move(gf), pairs});
  });
  std::sort(parts.begin(), parts.end(), [](const Part& a, const Part& b) { return a.begin < b.begin; });
  for (const auto& part : parts) {
    out.fg += part.fg;
    out.gf += part.gf;
    out.pairs += part.pairs;
  }
  return out;
}

void fill_report(CollisionReport* report, const Distribution& q, const Distribution& f, const Distribution& g,
                 std::size_t pairs, double bound) {
  if (!report) return;
  report->pairs = pairs;
  report->conservation_defect = conservation_defect(q, l1_norm(f) * l1_norm(g));
  report->grid_too_coarse = report->conservation_defect > bound;
}

}  // namespace

Distribution collision_Q(const Distribution& f, const Distribution& g, const CollisionQuad& quad,
                         CollisionReport* report) {
  QPair q = collision_kernel(f, g, quad);
  Distribution out{f.grid, std::move(q.fg)};
  if (report) {
    // only mass is invariant for an unsymmetrized pair
    const Moments m = raw_moments(out);
    report->pairs = q.pairs;
    const double scale = l1_norm(f) * l1_norm(g);
    report->conservation_defect = std::abs(m.rho) / (scale > 0.0 ? scale : 1.0);
    report->grid_too_coarse = report->conservation_defect > quad.defect_bound;
  }
  return out;
}

Distribution collision_Q_sym(const Distribution& f, const Distribution& g, const CollisionQuad& quad,
                             CollisionReport* report) {
  QPair q = collision_kernel(f, g, quad);
  Distribution out{f.grid, 0.5 * (q.fg + q.gf)};
  fill_report(report, out, f, g, q.pairs, quad.defect_bound);
  return out;
}

LinearizedOperators assemble_linearized(GridPtr gp, const MaxwellParams& p, const CollisionQuad& quad_in) {
  const VelocityGrid& grid = *gp;
  require_box(grid);
  CollisionQuad quad = quad_in;
  quad.has_reference = true;
  quad.reference = p;
  const BoxMap box(grid, quad.interpolation);
  const Angles ang = make_angles(quad.n_phi, quad.n_mu);
  const Distribution M = maxwellian(p, gp);
  const Weighting wt = make_weighting(grid, quad, M.values, M.values);
  const Field rm = make_field(grid, M.values.cwiseQuotient(wt.Wf), quad.interpolation);
  const Eigen::VectorXd invW = wt.Wf.cwiseInverse();
  // Every row keeps its loss term nu(xi) g(xi); only partners with negligible
  // M(xi*) are dropped, which bounds every dropped entry of the operator in
  // M-weighted coordinates by prune * max M.
  PairSet ps;
  ps.r2_node.assign(grid.size(), 0.0);
  const double mmax = M.values.maxCoeff();
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (M.values[static_cast<Eigen::Index>(j)] >= quad.prune * mmax) ps.order.push_back(j);
  ps.r2.assign(ps.order.size(), 0.0);
  const auto n = static_cast<Eigen::Index>(grid.size());

  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat L = RowMat::Zero(n, n);
  RowMat N = RowMat::Zero(n, n);
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      double* lrow = L.row(ii).data();
      double* nrow = N.row(ii).data();
      visit_row(grid, box, ang, ps, quad, i, false, [&](const Hit& h) {
        const auto jj = static_cast<Eigen::Index>(h.j);
        const double w2 = 2.0 * h.w * grid.weight(h.j);
        // 2 Q(M, g): gain M(xi') g(xi*'), loss M(xi) g(xi*)
        // 2 Q(g, M): gain g(xi') M(xi*'), loss g(xi) M(xi*)
        if (h.ok) {
          const double pair = wt.Wf[ii] * wt.Wf[jj];
          const double a2 = w2 * pair * interp(rm, h.s1);
          const double a1 = w2 * pair * interp(rm, h.s2);
          interp_weights(grid, h.s2, quad.interpolation, [&](std::size_t c, double k) {
            lrow[c] += a2 * k * invW[static_cast<Eigen::Index>(c)];
          });
          interp_weights(grid, h.s1, quad.interpolation, [&](std::size_t c, double k) {
            const double v = a1 * k * invW[static_cast<Eigen::Index>(c)];
            lrow[c] += v;
            nrow[c] += v;
          });
        }
        lrow[jj] -= w2 * M.values[ii];
        lrow[ii] -= w2 * M.values[jj];
        nrow[ii] -= w2 * M.values[jj];
      });
    }
  });
  LinearizedOperators ops;
  ops.grid = gp;
  ops.params = p;
  ops.L = L;
  ops.N = N;
  ops.cache = std::make_shared<InverseCache>();
  return ops;
}

Distribution linearized_LM(const Distribution& g, const MaxwellParams& p, const CollisionQuad& quad_in) {
  CollisionQuad quad = quad_in;
  quad.has_reference = true;
  quad.reference = p;
  const Distribution M = maxwellian(p, g.grid);
  QPair q = collision_kernel(M, g, quad);
  return Distribution{g.grid, 2.0 * (q.fg + q.gf)};
}

Distribution linearized_NM(const Distribution& h, const MaxwellParams& p, const CollisionQuad& quad_in) {
  CollisionQuad quad = quad_in;
  quad.has_reference = true;
  quad.reference = p;
  const Distribution M = maxwellian(p, h.grid);
  return 2.0 * collision_Q(h, M, quad);
}

}  // namespace vpb::kinetic
