// SPDX-License-Identifier: Apache-2.0
//
#include "platewave/forward.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "platewave/parallel.hpp"

namespace platewave {

namespace {

struct FlatNode {
  const BoundaryNode* node;
  std::size_t mesh;
  std::size_t local;
  double weight;  // h |gamma'|
};

std::vector<FlatNode> flatten(std::span<const BoundaryMesh> meshes) {
  std::vector<FlatNode> out;
  out.reserve(total_nodes(meshes));
  for (std::size_t m = 0; m < meshes.size(); ++m)
    for (std::size_t j = 0; j < meshes[m].size(); ++j)
      out.push_back({&meshes[m].nodes[j], m, j, meshes[m].h * meshes[m].nodes[j].speed});
  return out;
}

bool inside_polygon(const BoundaryMesh& mesh, Vec2 z) {
  bool in = false;
  const std::size_t n = mesh.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = mesh[i].position, b = mesh[j].position;
    if ((a.y > z.y) != (b.y > z.y) && z.x < (b.x - a.x) * (z.y - a.y) / (b.y - a.y) + a.x)
      in = !in;
  }
  return in;
}

void check_density(std::span<const BoundaryMesh> meshes, const DensityPair& density) {
  const auto n = static_cast<Eigen::Index>(total_nodes(meshes));
  if (density.phi1.size() != n || density.phi2.size() != n)
    throw std::invalid_argument("density length does not match the boundary node count");
}

}  // namespace

PlateParams::PlateParams(double wavenumber, double poisson) : k(wavenumber), nu(poisson) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("wavenumber must be positive");
  // alpha3 has a pole at nu = -1.
  if (!(nu > -1.0 && nu <= 0.5))
    throw std::invalid_argument("Poisson ratio must lie in (-1, 0.5]");
}

NodeOperators node_operators(const BoundaryNode& node, const PlateParams& params) {
  const DiffOperator ny = DiffOperator::along({node.normal, Variable::y});
  const DiffOperator ty = DiffOperator::along({node.tangent, Variable::y});
  const DiffOperator nx = DiffOperator::along({node.normal, Variable::x});
  const DiffOperator tx = DiffOperator::along({node.tangent, Variable::x});
  NodeOperators ops;
  ops.source = ny.pow(3) + ny * ty.pow(2) * params.alpha1() +
               ny.pow(2) * (params.alpha2() * node.curvature) +
               ty * (params.alpha3() * node.dcurvature);
  ops.normal_y = ny;
  ops.moment_x = nx.pow(2) + tx.pow(2) * params.nu;
  return ops;
}

cplx kernel_eval(KernelBlock block, const BoundaryNode& x, const BoundaryNode& y,
                 const PlateParams& params) {
  const Vec2 w = x.position - y.position;
  const double r = norm(w);
  if (!(r > 0.0)) throw std::domain_error("kernel evaluation at coincident nodes");
  const NodeOperators ox = node_operators(x, params);
  const NodeOperators oy = node_operators(y, params);
  const PartialTable p = phi_partials(phi_derivs(r, params.k), w);
  const DiffOperator* inner = nullptr;
  switch (block) {
    case KernelBlock::k11: return oy.source.apply(p);
    case KernelBlock::k12: return oy.normal_y.apply(p);
    case KernelBlock::k21: inner = &oy.source; break;
    case KernelBlock::k22: inner = &oy.normal_y; break;
  }
  cplx v = 0.0;
  for (const auto& t : ox.moment_x.terms()) v += t.c * inner->apply_shifted(p, t.a, t.b);
  return v;
}

SystemMatrix::SystemMatrix(Eigen::MatrixXcd matrix, std::vector<std::size_t> offsets)
    : matrix_(std::move(matrix)), lu_(matrix_), offsets_(std::move(offsets)) {
  rcond_ = lu_.rcond();
}

Eigen::MatrixXcd SystemMatrix::solve_raw(const Eigen::MatrixXcd& rhs) const {
  if (rhs.rows() != matrix_.rows())
    throw std::invalid_argument("right-hand side has the wrong length");
  return lu_.solve(rhs);
}

std::size_t total_nodes(std::span<const BoundaryMesh> meshes) {
  std::size_t n = 0;
  for (const auto& m : meshes) n += m.size();
  return n;
}

SystemMatrix assemble(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                      const AssemblyOptions& options) {
  if (meshes.empty()) throw std::invalid_argument("no boundaries to assemble");
  const AlpertLogRule rule(options.quadrature_order);
  for (const auto& m : meshes) {
    if (m.size() < rule.min_nodes())
      throw std::invalid_argument("quadrature order " + std::to_string(rule.order()) +
                                  " needs at least " + std::to_string(rule.min_nodes()) +
                                  " nodes per boundary, got " + std::to_string(m.size()));
  }
  std::vector<std::size_t> offsets;
  std::size_t acc = 0;
  for (const auto& m : meshes) {
    offsets.push_back(acc);
    acc += m.size();
  }

  const auto nodes = flatten(meshes);
  const std::size_t n = nodes.size();
  std::vector<NodeOperators> ops;
  ops.reserve(n);
  for (const auto& fn : nodes) ops.push_back(node_operators(*fn.node, params));

  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
  const double c0 = params.c0();

  // Kernel values of the four blocks for target operators tx at source y.
  struct Quad {
    cplx k11, k12, k21, k22;
  };
  auto kernels = [&](const auto& p, const DiffOperator& moment_x, const NodeOperators& oy) {
    Quad v{oy.source.apply(p), oy.normal_y.apply(p), 0.0, 0.0};
    for (const auto& t : moment_x.terms()) {
      v.k21 += t.c * oy.source.apply_shifted(p, t.a, t.b);
      v.k22 += t.c * oy.normal_y.apply_shifted(p, t.a, t.b);
    }
    return v;
  };

  parallel_for(n, [&](std::size_t i) {
    const auto& xi = nodes[i];
    const BoundaryMesh& own = meshes[xi.mesh];
    const std::size_t own_n = own.size();
    const auto own_base = static_cast<Eigen::Index>(offsets[xi.mesh]);
    const auto row = static_cast<Eigen::Index>(i);
    const DiffOperator& mx = ops[i].moment_x;

    q(row, row) += -0.5;
    q(N + row, N + row) += -0.5;
    q(N + row, row) += c0 * xi.node->curvature * xi.node->curvature;

    // Plain trapezoid away from the singularity.
    for (std::size_t j = 0; j < n; ++j) {
      const auto& yj = nodes[j];
      if (yj.mesh == xi.mesh && AlpertLogRule::offset(xi.local, yj.local, own_n) < rule.skip())
        continue;
      const Vec2 w = xi.node->position - yj.node->position;
      const Quad v = kernels(phi_partials(phi_derivs(norm(w), params.k), w), mx, ops[j]);
      const auto col = static_cast<Eigen::Index>(j);
      q(row, col) += yj.weight * v.k11;
      q(row, N + col) += yj.weight * v.k12;
      q(N + row, col) += yj.weight * v.k21;
      q(N + row, N + col) += yj.weight * v.k22;
    }

    // Auxiliary nodes on both sides; densities there are interpolated.
    for (const auto& node : rule.nodes()) {
      for (const double side : {1.0, -1.0}) {
        const double s = side * node.x;
        const double t = xi.node->t + s * own.h;
        const CurveFrame f = curve_frame(own.curve, t);
        const BoundaryNode y{t, f.position, f.tangent, f.normal, f.speed, f.curvature, f.dcurvature};
        // x - y from the chord so that the near-singular cancellation is exact.
        const Vec2L chord = own.curve.chord(xi.node->t, s * own.h);
        const Quad v = kernels(phi_partials_near(params.k, {-chord.x, -chord.y}), mx,
                               node_operators(y, params));
        const double wt = own.h * node.w * f.speed;
        for (std::size_t j = 0; j < own_n; ++j) {
          const double c = wt * periodic_interp_weight(xi.local, j, own_n, s);
          const Eigen::Index col = own_base + static_cast<Eigen::Index>(j);
          q(row, col) += c * v.k11;
          q(row, N + col) += c * v.k12;
          q(N + row, col) += c * v.k21;
          q(N + row, N + col) += c * v.k22;
        }
      }
    }
  });

  SystemMatrix sys(std::move(q), std::move(offsets));
  if (!(sys.rcond() >= options.min_rcond))
    throw SingularMatrixError("system matrix is numerically singular (rcond estimate " +
                                  std::to_string(sys.rcond()) + "); k may be a resonance",
                              sys.rcond());
  return sys;
}

IncidentTrace plane_wave_trace(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                               Vec2 direction) {
  if (std::abs(norm(direction) - 1.0) > 1e-12)
    throw std::invalid_argument("plane-wave direction must be a unit vector");
  IncidentTrace tr;
  const double k2 = params.k * params.k;
  for (const auto& mesh : meshes)
    for (const auto& node : mesh.nodes) {
      const cplx e = std::polar(1.0, params.k * dot(node.position, direction));
      const double nd = dot(node.normal, direction);
      tr.u.push_back(e);
      tr.m.push_back(-k2 * (params.nu + (1.0 - params.nu) * nd * nd) * e);
    }
  return tr;
}

IncidentTrace point_source_trace(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                                 Vec2 source) {
  const bool inside = std::any_of(meshes.begin(), meshes.end(),
                                  [&](const BoundaryMesh& m) { return inside_polygon(m, source); });
  if (!inside) throw std::invalid_argument("point source must lie inside an obstacle");
  IncidentTrace tr;
  for (const auto& mesh : meshes)
    for (const auto& node : mesh.nodes) {
      const Vec2 w = node.position - source;
      const double r = norm(w);
      if (!(r > 0.0)) throw std::invalid_argument("point source lies on the boundary");
      const PartialTable p = phi_partials(phi_derivs(r, params.k, 2), w);
      const DiffOperator nx = DiffOperator::along({node.normal, Variable::x});
      const cplx lap = p(2, 0) + p(0, 2);
      tr.u.push_back(p(0, 0));
      tr.m.push_back(params.nu * lap + (1.0 - params.nu) * nx.pow(2).apply(p));
    }
  return tr;
}

SolveReport solve(const SystemMatrix& system, const IncidentTrace& incident) {
  const std::size_t n = system.unknowns_per_density();
  if (incident.u.size() != n || incident.m.size() != n)
    throw std::invalid_argument("incident trace length does not match the system");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::VectorXcd b(2 * N);
  for (Eigen::Index i = 0; i < N; ++i) {
    b(i) = -incident.u[static_cast<std::size_t>(i)];
    b(N + i) = -incident.m[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXcd x = system.solve_raw(b);
  SolveReport rep;
  const double bn = b.norm();
  rep.relative_residual = bn > 0.0 ? (system.matrix() * x - b).norm() / bn : 0.0;
  rep.density.phi1 = x.head(N);
  rep.density.phi2 = x.tail(N);
  return rep;
}

cplx eval_scattered(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                    const DensityPair& density, Vec2 x) {
  check_density(meshes, density);
  for (const auto& mesh : meshes) {
    if (inside_polygon(mesh, x))
      throw std::invalid_argument("evaluation point lies inside an obstacle");
    const double guard = 3.0 * mesh.max_spacing();
    for (const auto& node : mesh.nodes)
      if (norm(x - node.position) <= guard)
        throw std::invalid_argument(
            "evaluation point closer than three node spacings to the boundary");
  }
  cplx sum = 0.0;
  Eigen::Index idx = 0;
  for (const auto& mesh : meshes)
    for (const auto& node : mesh.nodes) {
      const Vec2 w = x - node.position;
      const NodeOperators ops = node_operators(node, params);
      const PartialTable p = phi_partials(phi_derivs(norm(w), params.k, 3), w);
      sum += mesh.h * node.speed *
             (ops.source.apply(p) * density.phi1(idx) + ops.normal_y.apply(p) * density.phi2(idx));
      ++idx;
    }
  return sum;
}

Eigen::MatrixXcd farfield_map(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                              std::span<const Vec2> receivers) {
  const auto nodes = flatten(meshes);
  const auto N = static_cast<Eigen::Index>(nodes.size());
  std::vector<NodeOperators> ops;
  ops.reserve(nodes.size());
  for (const auto& fn : nodes) ops.push_back(node_operators(*fn.node, params));
  const cplx cff = farfield_constant(params.k);
  Eigen::MatrixXcd map(static_cast<Eigen::Index>(receivers.size()), 2 * N);
  parallel_for(receivers.size(), [&](std::size_t l) {
    const Vec2 xhat = receivers[l];
    const auto row = static_cast<Eigen::Index>(l);
    for (Eigen::Index j = 0; j < N; ++j) {
      const auto& fn = nodes[static_cast<std::size_t>(j)];
      const PartialTable p = plane_wave_partials(xhat, fn.node->position, params.k, 3);
      const auto& o = ops[static_cast<std::size_t>(j)];
      map(row, j) = cff * fn.weight * o.source.apply(p);
      map(row, N + j) = cff * fn.weight * o.normal_y.apply(p);
    }
  });
  return map;
}

cplx eval_farfield(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                   const DensityPair& density, Vec2 xhat) {
  check_density(meshes, density);
  if (std::abs(norm(xhat) - 1.0) > 1e-12)
    throw std::invalid_argument("far-field direction must be a unit vector");
  const Vec2 dirs[1] = {xhat};
  const Eigen::MatrixXcd map = farfield_map(meshes, params, dirs);
  const auto N = density.phi1.size();
  return (map.leftCols(N) * density.phi1 + map.rightCols(N) * density.phi2)(0);
}

double scene_diameter(std::span<const BoundaryMesh> meshes) {
  std::vector<Vec2> pts;
  for (const auto& m : meshes)
    for (const auto& n : m.nodes) pts.push_back(n.position);
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, norm(pts[i] - pts[j]));
  return d;
}

Vec2 scene_centroid(std::span<const BoundaryMesh> meshes) {
  double area = 0.0;
  Vec2 moment{};
  for (const auto& m : meshes) {
    const double a = m.area();
    area += a;
    moment = moment + m.centroid() * a;
  }
  return moment / area;
}

AnalyticTestReport analytic_point_source_test(std::span<const BoundaryMesh> meshes,
                                              const PlateParams& params,
                                              const AnalyticTestOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  AnalyticTestReport rep;
  rep.nodes = total_nodes(meshes);

  IncidentTrace incident;
  incident.u.assign(rep.nodes, 0.0);
  incident.m.assign(rep.nodes, 0.0);
  for (const auto& mesh : meshes) {
    const Vec2 src = mesh.centroid();
    if (!inside_polygon(mesh, src))
      throw std::invalid_argument("boundary centroid is not inside its curve; "
                                  "the analytic test needs an interior source");
    rep.sources.push_back(src);
    const IncidentTrace t = point_source_trace(meshes, params, src);
    for (std::size_t i = 0; i < rep.nodes; ++i) {
      incident.u[i] += t.u[i];
      incident.m[i] += t.m[i];
    }
  }

  const SystemMatrix sys = assemble(meshes, params, options.assembly);
  rep.rcond = sys.rcond();
  const SolveReport sol = solve(sys, incident);
  rep.solve_residual = sol.relative_residual;

  Eigen::Index idx = 0;
  for (const auto& mesh : meshes)
    for (const auto& node : mesh.nodes) {
      rep.density_l1 += mesh.h * node.speed *
                        (std::abs(sol.density.phi1(idx)) + std::abs(sol.density.phi2(idx)));
      ++idx;
    }

  const Vec2 center = scene_centroid(meshes);
  const double radius = options.radius_in_diameters * scene_diameter(meshes);
  for (std::size_t l = 0; l < options.point_count; ++l) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(l) /
                             static_cast<double>(options.point_count) + 0.3;
    const Vec2 x = center + Vec2{std::cos(theta), std::sin(theta)} * radius;
    rep.points.push_back(x);
    cplx exact = 0.0;
    for (const Vec2 s : rep.sources) exact -= phi(norm(x - s), params.k);
    const cplx computed = eval_scattered(meshes, params, sol.density, x);
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(computed - exact));
  }
  rep.relative_error = rep.max_abs_error / rep.density_l1;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace platewave
