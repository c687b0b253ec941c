// SPDX-License-Identifier: Apache-2.0
//
// Boundary integral solver for flexural waves around supported cavities.
//
// The scattered field is represented as
//
//   u^s(x) = \int [d_ny^3 + a1 d_ny d_ty^2 + a2 kappa d_ny^2 + a3 kappa' d_ty] Phi(x,y) phi1(y) ds_y
//          + \int d_ny Phi(x,y) phi2(y) ds_y
//
// and the supported-plate conditions u = 0, M[u] = nu Lap u + (1-nu) d_n^2 u = 0
// give the second-kind system
//
//   [ -1/2 I + K11        K12       ] [phi1]     [ u^i    ]
//   [ c0 kappa^2 I + K21  -1/2 I + K22] [phi2] = - [ M[u^i] ].
//
// Nystrom discretization on the uniform parameter grid of each boundary.
// Near the diagonal the trapezoidal rule is replaced by hybrid
// Gauss-trapezoidal corrections whose off-grid densities are interpolated
// trigonometrically from the grid values.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "platewave/geometry.hpp"
#include "platewave/kernels.hpp"
#include "platewave/quadrature.hpp"

namespace platewave {

/// Wavenumber and Poisson ratio with the derived representation coefficients.
struct PlateParams {
  double k = 0.0;
  double nu = 0.0;

  /// Throws std::invalid_argument unless k > 0 and nu in (-1, 0.5].
  PlateParams(double wavenumber, double poisson);

  double alpha1() const { return 2.0 - nu; }
  double alpha2() const { return (-1.0 + nu) * (7.0 + nu) / (3.0 - nu); }
  double alpha3() const { return (1.0 - nu) * (3.0 + nu) / (1.0 + nu); }
  double c0() const { return (nu - 1.0) * (nu + 3.0) * (2.0 * nu - 1.0) / (2.0 * (3.0 - nu)); }
};

/// Dirichlet and bending-moment traces of an incident field at every node
/// of every boundary, concatenated in boundary order.
struct IncidentTrace {
  std::vector<cplx> u;
  std::vector<cplx> m;
};

struct DensityPair {
  Eigen::VectorXcd phi1;
  Eigen::VectorXcd phi2;
};

enum class KernelBlock { k11, k12, k21, k22 };

/// Per-node differential operators. Built once per node and shared by the
/// assembly, the field evaluators and the far-field map.
struct NodeOperators {
  DiffOperator source;    // d_ny^3 + a1 d_ny d_ty^2 + a2 kappa d_ny^2 + a3 kappa' d_ty (in y)
  DiffOperator normal_y;  // d_ny
  DiffOperator moment_x;  // d_nx^2 + nu d_tx^2 (in x)
};

NodeOperators node_operators(const BoundaryNode& node, const PlateParams& params);

/// K_block(x, y) for distinct nodes x and y.
cplx kernel_eval(KernelBlock block, const BoundaryNode& x, const BoundaryNode& y,
                 const PlateParams& params);

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

struct SolveReport {
  DensityPair density;
  double relative_residual = 0.0;
};

/// Assembled and factorized Nystrom matrix. Immutable after construction;
/// concurrent solves against one instance are safe.
class SystemMatrix {
 public:
  SystemMatrix(Eigen::MatrixXcd matrix, std::vector<std::size_t> offsets);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::size_t unknowns_per_density() const { return static_cast<std::size_t>(matrix_.rows() / 2); }
  /// Start index of each boundary inside a density vector.
  const std::vector<std::size_t>& offsets() const { return offsets_; }
  double rcond() const { return rcond_; }

  /// Solves Q x = rhs for stacked right-hand sides (2N x columns).
  Eigen::MatrixXcd solve_raw(const Eigen::MatrixXcd& rhs) const;

 private:
  Eigen::MatrixXcd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  std::vector<std::size_t> offsets_;
  double rcond_ = 0.0;
};

struct AssemblyOptions {
  int quadrature_order = 10;
  /// Factorizations with a reciprocal condition estimate below this fail.
  double min_rcond = 1e-14;
};

SystemMatrix assemble(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                      const AssemblyOptions& options = {});

std::size_t total_nodes(std::span<const BoundaryMesh> meshes);

/// u = e^{ik x.d}, M[u] = -k^2 (nu + (1-nu)(n.d)^2) e^{ik x.d}.
IncidentTrace plane_wave_trace(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                               Vec2 direction);

/// u = Phi(x, x0), M[u] = nu Lap_x Phi + (1-nu) d_nx^2 Phi, with x0 strictly
/// inside one of the boundaries.
IncidentTrace point_source_trace(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                                 Vec2 source);

/// Solves for the densities with right-hand side -(u; M[u]).
SolveReport solve(const SystemMatrix& system, const IncidentTrace& incident);

/// Trapezoidal evaluation of the representation; x must be outside every
/// boundary and farther than three node spacings from it.
cplx eval_scattered(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                    const DensityPair& density, Vec2 x);

/// Far-field pattern of the represented field, normalized so that
/// u^s(x) ~ e^{ik|x|}/sqrt|x| u_inf(xhat).
cplx eval_farfield(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                   const DensityPair& density, Vec2 xhat);

/// Far-field map as a dense (receivers x 2N) matrix acting on [phi1; phi2].
Eigen::MatrixXcd farfield_map(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                              std::span<const Vec2> receivers);

/// Point-source accuracy check: sources at each boundary centroid, exact
/// scattered field -sum Phi(x, x0) at points on a circle of three scene
/// diameters. Error is max |computed - exact| over the points divided by
/// h sum (|phi1| + |phi2|) |gamma'|.
struct AnalyticTestReport {
  std::size_t nodes = 0;
  double relative_error = 0.0;
  double max_abs_error = 0.0;
  double density_l1 = 0.0;
  double solve_residual = 0.0;
  double rcond = 0.0;
  double seconds = 0.0;
  std::vector<Vec2> sources;
  std::vector<Vec2> points;
};

struct AnalyticTestOptions {
  std::size_t point_count = 10;
  double radius_in_diameters = 3.0;
  AssemblyOptions assembly{};
};

AnalyticTestReport analytic_point_source_test(std::span<const BoundaryMesh> meshes,
                                              const PlateParams& params,
                                              const AnalyticTestOptions& options = {});

/// Largest distance between two nodes of the scene.
double scene_diameter(std::span<const BoundaryMesh> meshes);
/// Area-weighted centroid of all boundaries.
Vec2 scene_centroid(std::span<const BoundaryMesh> meshes);

}  // namespace platewave
