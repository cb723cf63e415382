#pragma once

// Discrete-velocity kinetic objects: grids, Maxwellians, moments, the
// orthonormal macroscopic basis and projections, the hard-sphere collision
// operator and its linearizations.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vpb::kinetic {

using Vec3 = std::array<double, 3>;

inline constexpr double kR = 2.0 / 3.0;

struct MaxwellParams {
  double rho = 1.0;
  Vec3 u{0.0, 0.0, 0.0};
  double theta = 1.0;
};

enum class GridKind { gauss_hermite, uniform_box };

class VelocityGrid {
 public:
  /// Tensor Gauss-Hermite grid adapted to `center`: xi = u + sqrt(2 R theta) z.
  /// Weights carry the e^{z^2} factor so sum(w f) approximates the integral of f.
  static std::shared_ptr<const VelocityGrid> gauss_hermite(int n_per_axis, const MaxwellParams& center);
  /// n^3 midpoint nodes on [c - W, c + W]^3.
  static std::shared_ptr<const VelocityGrid> uniform_box(int n_per_axis, double half_width, const Vec3& center = {0, 0, 0});

  GridKind kind() const { return kind_; }
  int n() const { return n_; }
  std::size_t size() const { return nodes_.size(); }
  const Vec3& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& axis() const { return axis_; }
  const Vec3& center() const { return center_; }
  double spacing() const { return h_; }          // box only
  double half_width() const { return half_; }    // box only
  std::size_t index(int i, int j, int k) const { return (static_cast<std::size_t>(i) * n_ + j) * n_ + k; }
  std::string describe() const;

 private:
  GridKind kind_ = GridKind::uniform_box;
  int n_ = 0;
  double h_ = 0.0;
  double half_ = 0.0;
  Vec3 center_{0, 0, 0};
  std::vector<double> axis_;
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const VelocityGrid>;

struct Distribution {
  GridPtr grid;
  Eigen::VectorXd values;

  Distribution() = default;
  Distribution(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {}
  static Distribution zeros(GridPtr g);
};

Distribution operator+(const Distribution& a, const Distribution& b);
Distribution operator-(const Distribution& a, const Distribution& b);
Distribution operator*(double s, const Distribution& a);

/// Max |a - b| over nodes.
double max_abs_diff(const Distribution& a, const Distribution& b);
double max_abs(const Distribution& a);
double l1_norm(const Distribution& a);

/// Nodal values rho (2 pi R theta)^{-3/2} exp(-|xi - u|^2 / (2 R theta)).
Distribution maxwellian(const MaxwellParams& p, GridPtr grid);
double maxwellian_value(const MaxwellParams& p, const Vec3& xi);

struct Moments {
  double rho = 0.0;
  Vec3 momentum{0, 0, 0};
  double energy = 0.0;  // rho (theta + |u|^2 / 2)
  MaxwellParams params() const;
};

/// Raw moments by quadrature; no positivity check.
Moments raw_moments(const Distribution& f);
/// Throws NonphysicalMoments if rho <= 0 or theta <= 0.
Moments moments(const Distribution& f);

/// Maxwellian whose discrete moments on f's grid equal those of f.
MaxwellParams discrete_maxwellian_fit(const Distribution& f);

/// sum w g1 g2 / ref
double inner_product(const Distribution& g1, const Distribution& g2, const Distribution& ref);

/// chi_0 .. chi_4 for the Maxwellian `p` on `grid`.
std::array<Distribution, 5> chi_basis(const MaxwellParams& p, GridPtr grid);
Eigen::Matrix<double, 5, 5> gram_matrix(const std::array<Distribution, 5>& chi, const Distribution& ref);

/// Macroscopic projection. Uses the discrete Gram matrix so the result is an
/// exact projector for the discrete inner product; on Gauss-Hermite grids the
/// Gram matrix is the identity to rounding.
Distribution project_P0(const Distribution& g, const MaxwellParams& p);
Distribution project_P1(const Distribution& g, const MaxwellParams& p);
Distribution project_Pc(const Distribution& g, const MaxwellParams& p);

/// F = M + G with M from the moments of F.
struct Split {
  MaxwellParams params;
  Distribution maxwellian;
  Distribution micro;
};
Split micro_macro_split(const Distribution& F);

// ------------------------------------------------------------- collisions

enum class Interpolation { trilinear, corrected, cubic };

struct CollisionQuad {
  int n_phi = 8;
  int n_mu = 8;
  /// Pairs whose envelope bound falls below prune * max|f| max|g| are skipped.
  double prune = 1e-10;
  /// Post-collision interpolation. `corrected` is trilinear minus the
  /// interpolated second differences (exact on quadratics, same 8 nodes).
  Interpolation interpolation = Interpolation::corrected;
  /// Interpolate f / W instead of f, W the reference Maxwellian below.
  bool weighted = true;
  bool has_reference = false;
  MaxwellParams reference;  // default: moment fit of each argument separately
  /// Fraction of partner velocities kept (1 = all); fixed-seed sampling.
  double subsample = 1.0;
  std::uint64_t seed = 12345;
  double defect_bound = 1e-3;
};

struct CollisionReport {
  double conservation_defect = 0.0;  // max_i |sum w phi_i Q| / (|f|_1 |g|_1)
  bool grid_too_coarse = false;
  std::size_t pairs = 0;
};

/// Hard-sphere Q(f, g) = 1/2 int int (f' g*' - f g*) ((xi - xi*) . Omega)_+ dxi* dOmega.
Distribution collision_Q(const Distribution& f, const Distribution& g, const CollisionQuad& quad = {},
                         CollisionReport* report = nullptr);

/// (Q(f, g) + Q(g, f)) / 2, both from one sweep over unordered node pairs.
/// Its report covers all five invariants; collision_Q's report covers mass
/// only, the one invariant of an unsymmetrized pair.
Distribution collision_Q_sym(const Distribution& f, const Distribution& g, const CollisionQuad& quad = {},
                             CollisionReport* report = nullptr);

/// max_i |sum w phi_i Q| / (|f|_1 |g|_1) with phi = 1, xi_1..3, |xi|^2 / 2.
double conservation_defect(const Distribution& q, double scale);

/// pi int M(xi*) |xi - xi*| dxi*, in closed form.
double nu_freq(const Vec3& xi, const MaxwellParams& p);
Eigen::VectorXd nu_on_grid(const VelocityGrid& grid, const MaxwellParams& p);

/// L_M g = 2 Q(M, g) + 2 Q(g, M);  N_M h = 2 Q(h, M).
Distribution linearized_LM(const Distribution& g, const MaxwellParams& p, const CollisionQuad& quad = {});
Distribution linearized_NM(const Distribution& h, const MaxwellParams& p, const CollisionQuad& quad = {});

/// Dense matrices of L_M and N_M on a box grid (same kernel as collision_Q).
struct InverseCache;  // factorizations reused across right-hand sides

struct LinearizedOperators {
  GridPtr grid;
  MaxwellParams params;
  Eigen::MatrixXd L;
  Eigen::MatrixXd N;
  std::shared_ptr<InverseCache> cache;  // filled lazily; may be null
};
LinearizedOperators assemble_linearized(GridPtr grid, const MaxwellParams& p, const CollisionQuad& quad = {});

struct GlobalMaxwellianStar {
  double v_star = 1.0;
  Vec3 u_star{0, 0, 0};
  double theta_star = 1.0;
  MaxwellParams params() const;
};

/// Picks theta_* strictly inside (max theta / 2, min theta) and v_*, u_* at the
/// mean of the range. Throws DomainError if the interval is empty.
GlobalMaxwellianStar choose_global_maxwellian(const std::vector<MaxwellParams>& states);

struct InverseResult {
  Distribution g;
  double residual = 0.0;  // |P1 L g - h| / |h| in the M-weighted norm
  int iterations = 0;
};

/// Solves P1 L_M g = h for microscopic g: dense LU of the projected operator
/// in M-weighted coordinates, bordered by the excluded span so it is square
/// and nonsingular, then iterative refinement (at most max_iterations sweeps).
/// Throws NotMicroscopic if |P0 h| > tol |h|.
InverseResult invert_LM_on_microspace(const LinearizedOperators& ops, const Distribution& h, double tol,
                                      int max_iterations = 10);
InverseResult invert_NM_on_meanfree(const LinearizedOperators& ops, const Distribution& h, double tol,
                                    int max_iterations = 10);

/// (3 / (2 v theta)) L_M^{-1} P1[ xi_1 (|xi - u|^2 / (2 theta) theta_x + xi_1 u1_x) M ].
Distribution gbar(const LinearizedOperators& ops, double v, double theta_bar_x, double u1_bar_x, double tol = 1e-10);

/// <nu g, g>_{M*} and <nu^{-1} h, h>_{M*}.
double nu_weighted_norm2(const Distribution& g, const Eigen::VectorXd& nu, const Distribution& mstar, bool inverse);

void write_distribution_csv(const Distribution& f, const std::string& path);

}  // namespace vpb::kinetic
