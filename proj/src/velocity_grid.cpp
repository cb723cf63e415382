#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "quadrature.hpp"
#include "vpbwave/errors.hpp"
#include "vpbwave/kinetic.hpp"

namespace vpb {
namespace detail {

namespace {

std::vector<double> jacobi_nodes(const Eigen::VectorXd& offdiag, int n, Eigen::MatrixXd* vecs) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (vecs) *vecs = es.eigenvectors();
  return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw DomainError("quadrature order must be positive");
  Eigen::VectorXd off(std::max(n - 1, 1));
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::MatrixXd V;
  auto x = jacobi_nodes(off, n, &V);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 2.0 * V(0, i) * V(0, i);
  // symmetrize against rounding
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (x[n - 1 - i] - x[i]);
    const double b = 0.5 * (w[i] + w[n - 1 - i]);
    x[i] = -a; x[n - 1 - i] = a;
    w[i] = w[n - 1 - i] = b;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {x, w};
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite_scaled(int n) {
  if (n < 1) throw DomainError("quadrature order must be positive");
  Eigen::VectorXd off(std::max(n - 1, 1));
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k / 2.0);
  auto z = jacobi_nodes(off, n, nullptr);
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (z[n - 1 - i] - z[i]);
    z[i] = -a; z[n - 1 - i] = a;
  }
  if (n % 2 == 1) z[n / 2] = 0.0;
  // w e^{z^2} = 1 / sum_j psi_j(z)^2 with Hermite functions psi_j.
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double pm = 0.0;
    double p = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * z[i] * z[i]);
    double sum = p * p;
    for (int j = 0; j + 1 < n; ++j) {
      const double next = std::sqrt(2.0 / (j + 1)) * z[i] * p - std::sqrt(static_cast<double>(j) / (j + 1)) * pm;
      pm = p;
      p = next;
      sum += p * p;
    }
    w[i] = 1.0 / sum;
  }
  return {z, w};
}

}  // namespace detail

namespace kinetic {

std::shared_ptr<const VelocityGrid> VelocityGrid::gauss_hermite(int n, const MaxwellParams& c) {
  if (n < 2) throw DomainError("Gauss-Hermite grid needs at least 2 points per axis");
  if (!(c.theta > 0.0)) throw DomainError("grid temperature must be positive");
  auto g = std::make_shared<VelocityGrid>();
  g->kind_ = GridKind::gauss_hermite;
  g->n_ = n;
  g->center_ = c.u;
  const auto [z, w] = detail::gauss_hermite_scaled(n);
  const double s = std::sqrt(2.0 * kR * c.theta);
  g->axis_ = z;
  for (double& a : g->axis_) a *= s;
  g->nodes_.reserve(static_cast<std::size_t>(n) * n * n);
  g->weights_.reserve(g->nodes_.capacity());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        g->nodes_.push_back({c.u[0] + s * z[i], c.u[1] + s * z[j], c.u[2] + s * z[k]});
        g->weights_.push_back(s * s * s * w[i] * w[j] * w[k]);
      }
  return g;
}

std::shared_ptr<const VelocityGrid> VelocityGrid::uniform_box(int n, double half_width, const Vec3& center) {
  if (n < 2) throw DomainError("box grid needs at least 2 points per axis");
  if (!(half_width > 0.0)) throw DomainError("box half-width must be positive");
  auto g = std::make_shared<VelocityGrid>();
  g->kind_ = GridKind::uniform_box;
  g->n_ = n;
  g->half_ = half_width;
  g->center_ = center;
  g->h_ = 2.0 * half_width / n;
  g->axis_.resize(n);
  for (int i = 0; i < n; ++i) g->axis_[i] = -half_width + (i + 0.5) * g->h_;
  const double w = g->h_ * g->h_ * g->h_;
  g->nodes_.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        g->nodes_.push_back({center[0] + g->axis_[i], center[1] + g->axis_[j], center[2] + g->axis_[k]});
  g->weights_.assign(g->nodes_.size(), w);
  return g;
}

std::string VelocityGrid::describe() const {
  std::ostringstream os;
  if (kind_ == GridKind::gauss_hermite) {
    os << "gauss_hermite n=" << n_;
  } else {
    os << "uniform_box n=" << n_ << " half_width=" << half_ << " h=" << h_;
  }
  return os.str();
}

}  // namespace kinetic
}  // namespace vpb
