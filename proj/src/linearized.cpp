#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpbwave/errors.hpp"
#include "vpbwave/kinetic.hpp"
#include "inverse_cache.hpp"

namespace vpb::kinetic {

MaxwellParams GlobalMaxwellianStar::params() const {
  if (!(v_star > 0.0)) throw DomainError("v_star must be positive");
  MaxwellParams p;
  p.rho = 1.0 / v_star;
  p.u = u_star;
  p.theta = theta_star;
  return p;
}

GlobalMaxwellianStar choose_global_maxwellian(const std::vector<MaxwellParams>& states) {
  if (states.empty()) throw DomainError("no states to choose M* from");
  double tmin = states[0].theta, tmax = states[0].theta;
  double vmin = 1.0 / states[0].rho, vmax = vmin;
  Vec3 umin = states[0].u, umax = states[0].u;
  for (const auto& s : states) {
    if (!(s.rho > 0.0 && s.theta > 0.0)) throw DomainError("states must have rho > 0 and theta > 0");
    tmin = std::min(tmin, s.theta);
    tmax = std::max(tmax, s.theta);
    vmin = std::min(vmin, 1.0 / s.rho);
    vmax = std::max(vmax, 1.0 / s.rho);
    for (int k = 0; k < 3; ++k) {
      umin[k] = std::min(umin[k], s.u[k]);
      umax[k] = std::max(umax[k], s.u[k]);
    }
  }
  if (!(0.5 * tmax < tmin)) {
    std::ostringstream os;
    os << "no theta_* with max theta / 2 < theta_* < min theta (range " << tmin << " .. " << tmax << ")";
    throw DomainError(os.str());
  }
  GlobalMaxwellianStar m;
  // stay nearer the top of the window; the bottom end loses the weight bound
  m.theta_star = tmin - 0.25 * (tmin - 0.5 * tmax);
  m.v_star = 0.5 * (vmin + vmax);
  for (int k = 0; k < 3; ++k) m.u_star[k] = 0.5 * (umin[k] + umax[k]);
  return m;
}

namespace {

// Orthogonal projector complement in the coordinates x = g sqrt(w / M), where
// the M-weighted inner product is Euclidean.
struct HatSpace {
  Eigen::VectorXd D;     // sqrt(w / M)
  Eigen::MatrixXd Qb;    // orthonormal basis of the excluded span
  Eigen::VectorXd remove(const Eigen::VectorXd& x) const { return x - Qb * (Qb.transpose() * x); }
};

HatSpace make_space(const LinearizedOperators& ops, bool macroscopic) {
  const auto& g = *ops.grid;
  const Distribution M = maxwellian(ops.params, ops.grid);
  HatSpace s;
  const auto n = static_cast<Eigen::Index>(g.size());
  s.D.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.D[i] = std::sqrt(g.weight(static_cast<std::size_t>(i)) / M.values[i]);
  Eigen::MatrixXd B;
  if (macroscopic) {
    const auto chi = chi_basis(ops.params, ops.grid);
    B.resize(n, 5);
    for (int k = 0; k < 5; ++k) B.col(k) = s.D.cwiseProduct(chi[k].values);
  } else {
    B = s.D.cwiseProduct(M.values);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  s.Qb = qr.householderQ() * Eigen::MatrixXd::Identity(n, B.cols());
  return s;
}


}  // namespace

struct InverseFactor {
  HatSpace sp;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

namespace {

using Factor = InverseFactor;

// R D A D^{-1} R + Qb Qb^T with R = I - Qb Qb^T: the projected operator on the
// complement, identity on the excluded span.
std::shared_ptr<const Factor> factorize(const LinearizedOperators& ops, const Eigen::MatrixXd& A, bool macroscopic) {
  auto f = std::make_shared<Factor>();
  f->sp = make_space(ops, macroscopic);
  const Eigen::VectorXd& D = f->sp.D;
  const Eigen::MatrixXd& Q = f->sp.Qb;
  Eigen::MatrixXd B = D.asDiagonal() * A * D.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd QtB = Q.transpose() * B;
  B -= Q * QtB;
  const Eigen::MatrixXd BQ = B * Q;
  B -= BQ * Q.transpose();
  B += Q * Q.transpose();
  f->lu.compute(B);
  return f;
}


std::shared_ptr<const Factor> factor_for(const LinearizedOperators& ops, bool macroscopic) {
  const Eigen::MatrixXd& A = macroscopic ? ops.L : ops.N;
  if (!ops.cache) return factorize(ops, A, macroscopic);
  std::lock_guard<std::mutex> g(ops.cache->lock);
  auto& slot = macroscopic ? ops.cache->L : ops.cache->N;
  if (!slot) slot = factorize(ops, A, macroscopic);
  return slot;
}

InverseResult direct_invert(const LinearizedOperators& ops, const Distribution& h, double tol, int max_iterations,
                            bool macroscopic) {
  if (h.grid != ops.grid) throw DomainError("right-hand side lives on a different grid than the operator");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const std::shared_ptr<const Factor> f = factor_for(ops, macroscopic);
  const HatSpace& sp = f->sp;
  const Eigen::MatrixXd& A = macroscopic ? ops.L : ops.N;
  const Eigen::VectorXd b = sp.D.cwiseProduct(h.values);
  InverseResult res;
  res.g = Distribution::zeros(ops.grid);
  const double bn = b.norm();
  if (bn == 0.0) return res;
  const double off = (b - sp.remove(b)).norm();
  if (off > tol * bn) {
    std::ostringstream os;
    os << "right-hand side is not in the solvable subspace: |P h| / |h| = " << off / bn;
    throw NotMicroscopic(os.str());
  }
  const Eigen::VectorXd invD = sp.D.cwiseInverse();
  auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd gx = invD.cwiseProduct(sp.remove(x));
    return sp.remove(sp.D.cwiseProduct(A * gx));
  };
  const Eigen::VectorXd bp = sp.remove(b);
  Eigen::VectorXd x = sp.remove(f->lu.solve(bp));
  Eigen::VectorXd r = bp - apply(x);
  int it = 0;
  while (r.norm() > tol * bn && it < max_iterations) {
    x += sp.remove(f->lu.solve(r));
    r = bp - apply(x);
    ++it;
  }
  res.iterations = it;
  res.residual = r.norm() / bn;
  if (!(res.residual <= tol)) {
    std::ostringstream os;
    os << "refinement stalled after " << it << " sweeps at relative residual " << res.residual;
    throw ConvergenceFailure(os.str(), res.residual);
  }
  res.g.values = invD.cwiseProduct(x);
  return res;
}

}  // namespace

InverseResult invert_LM_on_microspace(const LinearizedOperators& ops, const Distribution& h, double tol,
                                      int max_iterations) {
  return direct_invert(ops, h, tol, max_iterations, true);
}

InverseResult invert_NM_on_meanfree(const LinearizedOperators& ops, const Distribution& h, double tol,
                                    int max_iterations) {
  return direct_invert(ops, h, tol, max_iterations, false);
}

Distribution gbar(const LinearizedOperators& ops, double v, double theta_bar_x, double u1_bar_x, double tol) {
  if (!(v > 0.0)) throw DomainError("v must be positive");
  const MaxwellParams& p = ops.params;
  const Distribution M = maxwellian(p, ops.grid);
  Distribution src = Distribution::zeros(ops.grid);
  for (std::size_t i = 0; i < ops.grid->size(); ++i) {
    const Vec3& x = ops.grid->node(i);
    const double d0 = x[0] - p.u[0], d1 = x[1] - p.u[1], d2 = x[2] - p.u[2];
    const double c2 = d0 * d0 + d1 * d1 + d2 * d2;
    src.values[static_cast<Eigen::Index>(i)] =
        x[0] * (c2 / (2.0 * p.theta) * theta_bar_x + x[0] * u1_bar_x) * M.values[static_cast<Eigen::Index>(i)];
  }
  const Distribution h = project_P1(src, p);
  const InverseResult r = invert_LM_on_microspace(ops, h, tol);
  return (3.0 / (2.0 * v * p.theta)) * r.g;
}

}  // namespace vpb::kinetic
