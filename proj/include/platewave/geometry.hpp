// SPDX-License-Identifier: Apache-2.0
//
// Parametric smooth closed curves and uniform-parameter boundary meshes.
//
// All curves are parametrized counterclockwise over [0, 2*pi). The unit
// normal points out of the enclosed region, so convex curves have positive
// curvature and a circle of radius r has kappa = 1/r.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace platewave {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

enum class CurveKind { star, cavity, circle };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& name);

/// Extended-precision vector for chords between nearby curve points.
struct Vec2L {
  long double x = 0.0L, y = 0.0L;
};

/// Position and first three parameter derivatives of a curve at one t.
struct CurveJet {
  Vec2 p, d1, d2, d3;
};

/// Differential-geometric frame at one parameter value.
struct CurveFrame {
  Vec2 position;
  Vec2 tangent;     // unit, counterclockwise
  Vec2 normal;      // unit, outward
  double speed;     // |gamma'(t)|
  double curvature; // 1/length
  double dcurvature; // d(kappa)/ds, 1/length^2
};

/// A smooth, simple, closed, 2*pi-periodic curve.
///
/// star:   gamma(t) = c + R (1 + a cos(m t)) (cos t, sin t)
/// circle: star with a = 0
/// cavity: kite-shaped stand-in with a concave side,
///         c + s (cos t + 0.65 cos 2t - 0.65, 1.5 sin t) with s chosen so the
///         curve has unit diameter (times R).
class SmoothClosedCurve {
 public:
  static SmoothClosedCurve star(double amplitude, int arms, double radius = 1.0,
                                Vec2 center = {});
  static SmoothClosedCurve circle(double radius, Vec2 center = {});
  static SmoothClosedCurve cavity(double scale = 1.0, Vec2 center = {});

  CurveKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  int arms() const { return arms_; }
  double radius() const { return radius_; }
  Vec2 center() const { return center_; }

  /// Copy of this curve moved by `offset`.
  SmoothClosedCurve translated(Vec2 offset) const;

  Vec2 position(double t) const { return jet(t).p; }
  CurveJet jet(double t) const;
  /// gamma(t + sigma) - gamma(t) to full relative precision in long double,
  /// also for |sigma| far below the spacing of representable t.
  Vec2L chord(double t, double sigma) const;

 private:
  SmoothClosedCurve(CurveKind kind, double amplitude, int arms, double radius,
                    Vec2 center)
      : kind_(kind), amplitude_(amplitude), arms_(arms), radius_(radius),
        center_(center) {}

  CurveKind kind_;
  double amplitude_;
  int arms_;
  double radius_;
  Vec2 center_;
};

/// gamma(t) = (1 + a cos(m t)) (cos t, sin t). Rejects |a| >= 1 and m < 0.
SmoothClosedCurve star_curve(double amplitude, int arms);

CurveFrame curve_frame(const SmoothClosedCurve& curve, double t);

/// Scale factor that gives the raw kite polygon unit diameter.
double cavity_unit_diameter_scale();

struct BoundaryNode {
  double t;
  Vec2 position;
  Vec2 tangent;
  Vec2 normal;
  double speed;
  double curvature;
  double dcurvature;
};

/// Nodes t_j = 2*pi*j/N with trapezoid weight h = 2*pi/N.
struct BoundaryMesh {
  SmoothClosedCurve curve;
  std::vector<BoundaryNode> nodes;
  double h = 0.0;

  std::size_t size() const { return nodes.size(); }
  const BoundaryNode& operator[](std::size_t i) const { return nodes[i]; }

  double perimeter() const;
  /// Largest distance between neighbouring quadrature points, h * max speed.
  double max_spacing() const;
  /// Area and area centroid by the divergence theorem on the mesh.
  double area() const;
  Vec2 centroid() const;
};

/// Requires even N >= 16.
BoundaryMesh discretize(const SmoothClosedCurve& curve, std::size_t n);

/// Dense polygon approximation used for point-in-region queries.
class RegionTester {
 public:
  explicit RegionTester(std::span<const SmoothClosedCurve> curves,
                        std::size_t samples_per_curve = 2048);

  bool inside(Vec2 z) const;
  /// Distance from z to the nearest polygon edge (any curve).
  double distance_to_boundary(Vec2 z) const;
  double total_area() const;
  Vec2 centroid() const;
  std::size_t curve_count() const { return polygons_.size(); }
  /// Index of the curve enclosing z, or -1.
  int enclosing_curve(Vec2 z) const;

 private:
  std::vector<std::vector<Vec2>> polygons_;
};

}  // namespace platewave
