// SPDX-License-Identifier: Apache-2.0
//
// Qualitative reconstruction from far-field data on rectangular grids.
//
//   LSM:  (alpha I + F^* F) g_z = F^* phi_z,   indicator 1/||g_z||
//   DSM1: |<phi_z, F phi_z>|^{rho/2}
//   DSM2: ||F phi_z||^rho
//
// with F = (2*pi/N_d) U. Norms and inner products over directions carry the
// trapezoid weight 2*pi/N.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "platewave/geometry.hpp"
#include "platewave/operator.hpp"

namespace platewave {

/// Uniform grid over [x0, x1] x [y0, y1]; point index iy * nx + ix.
struct SamplingGrid {
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
  std::size_t nx = 2, ny = 2;

  /// Throws std::invalid_argument unless nx, ny >= 2 and the box is proper.
  void validate() const;
  std::size_t size() const { return nx * ny; }
  double dx() const { return (x1 - x0) / static_cast<double>(nx - 1); }
  double dy() const { return (y1 - y0) / static_cast<double>(ny - 1); }
  Vec2 point(std::size_t ix, std::size_t iy) const;
  Vec2 point(std::size_t index) const { return point(index % nx, index / nx); }
};

enum class IndicatorMethod { lsm, dsm1, dsm2 };

std::string to_string(IndicatorMethod method);

struct IndicatorField {
  SamplingGrid grid;
  std::vector<double> values;
  IndicatorMethod method = IndicatorMethod::dsm1;
  /// alpha for LSM, rho for DSM.
  double parameter = 0.0;
  bool rescaled = false;

  /// Copy divided by its maximum. Throws std::domain_error for a field
  /// without a positive finite maximum.
  IndicatorField rescale() const;
};

/// Far-field phi_z over a direction set: scaled (LSM) C_ff e^{-ik xhat.z},
/// unscaled (DSM) e^{-ik z.d}.
Eigen::VectorXcd rhs_vector(Vec2 z, const DirectionSet& dirs, double k, bool scaled);

/// Thin SVD of (2*pi/N_d) U, computed once and reused for every z.
class TikhonovSolver {
 public:
  explicit TikhonovSolver(const FarFieldMatrix& f);

  const Eigen::VectorXd& singular_values() const { return sigma_; }
  const Eigen::MatrixXcd& left() const { return u_; }
  const Eigen::MatrixXcd& right() const { return v_; }
  /// Frobenius norm of A - U S V^H relative to sigma_max.
  double reconstruction_error() const;
  /// Weight 2*pi/N_d of the density norm.
  double density_weight() const { return density_weight_; }

 private:
  Eigen::MatrixXcd a_;
  Eigen::VectorXd sigma_;
  Eigen::MatrixXcd u_, v_;
  double density_weight_;
};

/// g = sum_i sigma_i/(sigma_i^2 + alpha) <u_i, phi> v_i. Requires alpha > 0.
Eigen::VectorXcd lsm_solve(const TikhonovSolver& solver, const Eigen::VectorXcd& phi,
                           double alpha);

/// ||g_z^alpha|| with weight 2*pi/N_d for each alpha, from one projection.
std::vector<double> lsm_norms(const TikhonovSolver& solver, const Eigen::VectorXcd& phi,
                              std::span<const double> alphas);

/// value(z) = 1/||g_z^alpha||, unscaled.
IndicatorField lsm_indicator(const SamplingGrid& grid, const FarFieldMatrix& f,
                             const TikhonovSolver& solver, double alpha);
IndicatorField lsm_indicator(const SamplingGrid& grid, const FarFieldMatrix& f, double alpha);

struct DsmFields {
  IndicatorField dsm1;
  IndicatorField dsm2;
};

/// Unscaled DSM1 and DSM2 fields. Requires rho > 0.
DsmFields dsm_indicators(const SamplingGrid& grid, const FarFieldMatrix& f, double rho1 = 2.0,
                         double rho2 = 1.0);

/// DSM values at a single point.
struct DsmPoint {
  double inner = 0.0;  // |<phi_z, F phi_z>|
  double norm = 0.0;   // ||F phi_z||
};
DsmPoint dsm_point(const FarFieldMatrix& f, Vec2 z);

struct LocalizationMetrics {
  bool degenerate = false;
  /// Fraction of points with value >= 0.9 max that lie inside the truth.
  double containment = 0.0;
  std::size_t top_count = 0;
  /// Value-weighted centroid of the top-decile points.
  Vec2 centroid{};
  Vec2 true_centroid{};
  double centroid_error = 0.0;
  /// Clusters of the top-decile set: points closer than the merge radius
  /// (grid neighbours at least) belong to one peak.
  std::size_t peak_count = 0;
  /// Truth curves containing the maximum of at least one component.
  std::size_t obstacles_detected = 0;
  std::size_t obstacle_count = 0;
  std::vector<Vec2> peaks;
};

inline constexpr double top_decile_level = 0.9;

/// merge_radius is normally one wavelength 2*pi/k, the scale below which
/// maxima are not resolved.
LocalizationMetrics localization_metrics(const IndicatorField& field,
                                         std::span<const SmoothClosedCurve> truth,
                                         double merge_radius = 0.0);

/// Plotting transform: LSM log then min-max to [0, 1], DSM divided by max.
std::vector<double> display_values(const IndicatorField& field);
/// "x,y,value" rows of the display values.
std::string indicator_csv(const IndicatorField& field);
/// Binary PGM (P5), grid row-major from (x0, y0), round(255 * display value).
std::vector<unsigned char> indicator_pgm(const IndicatorField& field);

}  // namespace platewave
