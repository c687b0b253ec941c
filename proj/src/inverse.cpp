// SPDX-License-Identifier: Apache-2.0
//
#include "platewave/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "platewave/parallel.hpp"

namespace platewave {

namespace {

// Grid points are processed in fixed blocks so every block sees the same
// matrix shapes whatever the worker count.
constexpr std::size_t block_size = 256;

template <class Body>
void for_each_block(std::size_t n, Body&& body) {
  const std::size_t blocks = (n + block_size - 1) / block_size;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    body(begin, std::min(n, begin + block_size));
  });
}

// Columns e^{-ik z.d} for the grid points [begin, end).
Eigen::MatrixXcd plane_block(const SamplingGrid& grid, const DirectionSet& dirs, double k,
                             std::size_t begin, std::size_t end) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(dirs.size()),
                     static_cast<Eigen::Index>(end - begin));
  for (std::size_t p = begin; p < end; ++p) {
    const Vec2 z = grid.point(p);
    for (std::size_t j = 0; j < dirs.size(); ++j)
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p - begin)) =
          std::polar(1.0, -k * dot(z, dirs[j]));
  }
  return m;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("regularization parameter must be > 0");
}

double filtered_norm(const Eigen::VectorXd& sigma, const Eigen::Ref<const Eigen::VectorXcd>& c,
                     double alpha, double weight) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double f = sigma(i) / (sigma(i) * sigma(i) + alpha);
    s += f * f * std::norm(c(i));
  }
  return std::sqrt(weight * s);
}

}  // namespace

void SamplingGrid::validate() const {
  if (nx < 2 || ny < 2) throw std::invalid_argument("sampling grid needs nx, ny >= 2");
  if (!(x1 > x0) || !(y1 > y0) || !std::isfinite(x0) || !std::isfinite(x1) ||
      !std::isfinite(y0) || !std::isfinite(y1))
    throw std::invalid_argument("sampling grid box must satisfy x0 < x1 and y0 < y1");
}

Vec2 SamplingGrid::point(std::size_t ix, std::size_t iy) const {
  return {x0 + static_cast<double>(ix) * dx(), y0 + static_cast<double>(iy) * dy()};
}

std::string to_string(IndicatorMethod method) {
  switch (method) {
    case IndicatorMethod::lsm: return "lsm";
    case IndicatorMethod::dsm1: return "dsm1";
    case IndicatorMethod::dsm2: return "dsm2";
  }
  return "unknown";
}

IndicatorField IndicatorField::rescale() const {
  double mx = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw std::domain_error("indicator field has non-finite values");
    mx = std::max(mx, v);
  }
  if (!(mx > 0.0)) throw std::domain_error("indicator field has no positive maximum");
  IndicatorField out = *this;
  for (double& v : out.values) v /= mx;
  out.rescaled = true;
  return out;
}

Eigen::VectorXcd rhs_vector(Vec2 z, const DirectionSet& dirs, double k, bool scaled) {
  const cplx c = scaled ? farfield_constant(k) : cplx(1.0);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t j = 0; j < dirs.size(); ++j)
    v(static_cast<Eigen::Index>(j)) = c * std::polar(1.0, -k * dot(dirs[j], z));
  return v;
}

TikhonovSolver::TikhonovSolver(const FarFieldMatrix& f)
    : a_(f.incident().weight() * f.samples()), density_weight_(f.incident().weight()) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  sigma_ = svd.singularValues();
  u_ = svd.matrixU();
  v_ = svd.matrixV();
}

double TikhonovSolver::reconstruction_error() const {
  const Eigen::MatrixXcd r = u_ * sigma_.asDiagonal() * v_.adjoint();
  const double smax = sigma_.size() ? sigma_(0) : 0.0;
  return smax > 0.0 ? (a_ - r).norm() / smax : 0.0;
}

Eigen::VectorXcd lsm_solve(const TikhonovSolver& solver, const Eigen::VectorXcd& phi,
                           double alpha) {
  check_alpha(alpha);
  if (phi.size() != solver.left().rows())
    throw std::invalid_argument("right-hand side length does not match the receivers");
  const auto& s = solver.singular_values();
  Eigen::VectorXcd c = solver.left().adjoint() * phi;
  for (Eigen::Index i = 0; i < s.size(); ++i) c(i) *= s(i) / (s(i) * s(i) + alpha);
  return solver.right() * c;
}

std::vector<double> lsm_norms(const TikhonovSolver& solver, const Eigen::VectorXcd& phi,
                              std::span<const double> alphas) {
  if (phi.size() != solver.left().rows())
    throw std::invalid_argument("right-hand side length does not match the receivers");
  const Eigen::VectorXcd c = solver.left().adjoint() * phi;
  std::vector<double> out;
  for (double a : alphas) {
    check_alpha(a);
    out.push_back(filtered_norm(solver.singular_values(), c, a, solver.density_weight()));
  }
  return out;
}

IndicatorField lsm_indicator(const SamplingGrid& grid, const FarFieldMatrix& f,
                             const TikhonovSolver& solver, double alpha) {
  grid.validate();
  check_alpha(alpha);
  IndicatorField field{grid, std::vector<double>(grid.size()), IndicatorMethod::lsm, alpha, false};
  const cplx cff = farfield_constant(f.k());
  for_each_block(grid.size(), [&](std::size_t begin, std::size_t end) {
    const Eigen::MatrixXcd rhs = cff * plane_block(grid, f.receivers(), f.k(), begin, end);
    const Eigen::MatrixXcd c = solver.left().adjoint() * rhs;
    for (std::size_t p = begin; p < end; ++p)
      field.values[p] = 1.0 / filtered_norm(solver.singular_values(),
                                            c.col(static_cast<Eigen::Index>(p - begin)), alpha,
                                            solver.density_weight());
  });
  return field;
}

IndicatorField lsm_indicator(const SamplingGrid& grid, const FarFieldMatrix& f, double alpha) {
  return lsm_indicator(grid, f, TikhonovSolver(f), alpha);
}

DsmFields dsm_indicators(const SamplingGrid& grid, const FarFieldMatrix& f, double rho1,
                         double rho2) {
  grid.validate();
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw std::invalid_argument("DSM exponent must be > 0");
  DsmFields out{{grid, std::vector<double>(grid.size()), IndicatorMethod::dsm1, rho1, false},
                {grid, std::vector<double>(grid.size()), IndicatorMethod::dsm2, rho2, false}};
  const double wd = f.incident().weight(), wr = f.receivers().weight();
  for_each_block(grid.size(), [&](std::size_t begin, std::size_t end) {
    const Eigen::MatrixXcd fphi = wd * (f.samples() * plane_block(grid, f.incident(), f.k(), begin, end));
    const Eigen::MatrixXcd phi_r = plane_block(grid, f.receivers(), f.k(), begin, end);
    for (std::size_t p = begin; p < end; ++p) {
      const auto col = static_cast<Eigen::Index>(p - begin);
      const double inner = std::abs(wr * phi_r.col(col).dot(fphi.col(col)));
      const double nrm = std::sqrt(wr * fphi.col(col).squaredNorm());
      out.dsm1.values[p] = std::pow(inner, 0.5 * rho1);
      out.dsm2.values[p] = std::pow(nrm, rho2);
    }
  });
  return out;
}

DsmPoint dsm_point(const FarFieldMatrix& f, Vec2 z) {
  const Eigen::VectorXcd fphi = apply_operator(f, rhs_vector(z, f.incident(), f.k(), false));
  const Eigen::VectorXcd phi = rhs_vector(z, f.receivers(), f.k(), false);
  const double wr = f.receivers().weight();
  return {std::abs(weighted_inner(phi, fphi, wr)), std::sqrt(wr * fphi.squaredNorm())};
}

LocalizationMetrics localization_metrics(const IndicatorField& field,
                                         std::span<const SmoothClosedCurve> truth,
                                         double merge_radius) {
  if (truth.empty()) throw std::invalid_argument("localization needs at least one truth curve");
  const auto& g = field.grid;
  const auto& v = field.values;
  LocalizationMetrics m;
  m.obstacle_count = truth.size();
  const RegionTester all(truth);
  m.true_centroid = all.centroid();

  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::isfinite(x) ? x : 0.0);
  if (!(mx > 0.0)) {
    m.degenerate = true;
    return m;
  }

  double mass = 0.0;
  Vec2 moment{};
  std::size_t inside = 0;
  for (std::size_t p = 0; p < v.size(); ++p) {
    if (!(v[p] >= top_decile_level * mx)) continue;
    const Vec2 z = g.point(p);
    ++m.top_count;
    if (all.inside(z)) ++inside;
    mass += v[p];
    moment = moment + z * v[p];
  }
  m.containment = static_cast<double>(inside) / static_cast<double>(m.top_count);
  m.centroid = moment / mass;
  m.centroid_error = norm(m.centroid - m.true_centroid);

  // Union-find over top-decile points; grid neighbours and points within
  // the merge radius share a cluster. Roots are the smallest index, so the
  // output is deterministic.
  std::vector<std::size_t> parent(v.size());
  for (std::size_t p = 0; p < v.size(); ++p) parent[p] = p;
  auto find = [&](std::size_t p) {
    while (parent[p] != p) p = parent[p] = parent[parent[p]];
    return p;
  };
  auto in_top = [&](std::size_t p) { return v[p] >= top_decile_level * mx; };
  const auto rx = std::max<long>(1, static_cast<long>(std::floor(merge_radius / g.dx())));
  const auto ry = std::max<long>(1, static_cast<long>(std::floor(merge_radius / g.dy())));
  const double r2 = merge_radius * merge_radius;
  for (std::size_t p = 0; p < v.size(); ++p) {
    if (!in_top(p)) continue;
    const auto ix = static_cast<long>(p % g.nx), iy = static_cast<long>(p / g.nx);
    for (long jy = std::max(0L, iy - ry); jy <= std::min<long>(g.ny - 1, iy + ry); ++jy)
      for (long jx = std::max(0L, ix - rx); jx <= std::min<long>(g.nx - 1, ix + rx); ++jx) {
        const auto q = static_cast<std::size_t>(jy) * g.nx + static_cast<std::size_t>(jx);
        if (q == p || !in_top(q)) continue;
        const bool adjacent = std::abs(jx - ix) <= 1 && std::abs(jy - iy) <= 1;
        const double ex = static_cast<double>(jx - ix) * g.dx();
        const double ey = static_cast<double>(jy - iy) * g.dy();
        if (!adjacent && ex * ex + ey * ey > r2) continue;
        const std::size_t a = find(p), b = find(q);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  }
  std::vector<long> cluster(v.size(), -1);
  std::vector<std::size_t> best;
  for (std::size_t p = 0; p < v.size(); ++p) {
    if (!in_top(p)) continue;
    const std::size_t root = find(p);
    if (cluster[root] < 0) {
      cluster[root] = static_cast<long>(best.size());
      best.push_back(p);
    }
    std::size_t& b = best[static_cast<std::size_t>(cluster[root])];
    if (v[p] > v[b]) b = p;
  }
  m.peak_count = best.size();
  for (std::size_t p : best) m.peaks.push_back(g.point(p));

  // An obstacle counts as detected when a cluster maximum lies inside it
  // or within one grid-cell diagonal of its boundary.
  const double cell = std::hypot(g.dx(), g.dy());
  for (const auto& curve : truth) {
    const SmoothClosedCurve one[1] = {curve};
    const RegionTester region(one);
    for (const Vec2 peak : m.peaks)
      if (region.inside(peak) || region.distance_to_boundary(peak) <= cell) {
        ++m.obstacles_detected;
        break;
      }
  }
  return m;
}

std::vector<double> display_values(const IndicatorField& field) {
  std::vector<double> out = field.values;
  if (field.method == IndicatorMethod::lsm) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double& x : out) {
      x = std::log(x);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    for (double& x : out) x = hi > lo ? (x - lo) / (hi - lo) : 1.0;
    return out;
  }
  return field.rescale().values;
}

std::string indicator_csv(const IndicatorField& field) {
  const auto shown = display_values(field);
  std::string s = "x,y,value\n";
  char buf[96];
  for (std::size_t p = 0; p < shown.size(); ++p) {
    const Vec2 z = field.grid.point(p);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", z.x, z.y, shown[p]);
    s += buf;
  }
  return s;
}

std::vector<unsigned char> indicator_pgm(const IndicatorField& field) {
  const auto shown = display_values(field);
  const std::string header =
      "P5\n" + std::to_string(field.grid.nx) + " " + std::to_string(field.grid.ny) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  for (double x : shown)
    out.push_back(static_cast<unsigned char>(std::lround(255.0 * std::clamp(x, 0.0, 1.0))));
  return out;
}

}  // namespace platewave
