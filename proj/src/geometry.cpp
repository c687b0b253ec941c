// SPDX-License-Identifier: Apache-2.0
//
#include "platewave/geometry.hpp"

#include <algorithm>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace platewave {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// The raw kite (cos t + 0.65 cos 2t - 0.65, 1.5 sin t) has diameter exactly 3,
// attained between t = pi/2 and t = 3*pi/2.
constexpr double kite_diameter = 3.0;

Vec2 to_vec(std::complex<double> z) { return {z.real(), z.imag()}; }

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::star: return "star";
    case CurveKind::cavity: return "cavity";
    case CurveKind::circle: return "circle";
  }
  return "unknown";
}

CurveKind curve_kind_from_string(const std::string& name) {
  if (name == "star") return CurveKind::star;
  if (name == "cavity") return CurveKind::cavity;
  if (name == "circle") return CurveKind::circle;
  throw std::invalid_argument("unknown curve kind '" + name + "'");
}

double cavity_unit_diameter_scale() { return 1.0 / kite_diameter; }

SmoothClosedCurve SmoothClosedCurve::star(double amplitude, int arms,
                                          double radius, Vec2 center) {
  if (!(std::abs(amplitude) < 1.0))
    throw std::invalid_argument("star curve requires |a| < 1");
  if (arms < 0) throw std::invalid_argument("star curve requires m >= 0");
  if (!(radius > 0.0)) throw std::invalid_argument("curve radius must be > 0");
  return SmoothClosedCurve(CurveKind::star, amplitude, arms, radius, center);
}

SmoothClosedCurve SmoothClosedCurve::circle(double radius, Vec2 center) {
  if (!(radius > 0.0)) throw std::invalid_argument("curve radius must be > 0");
  return SmoothClosedCurve(CurveKind::circle, 0.0, 0, radius, center);
}

SmoothClosedCurve SmoothClosedCurve::cavity(double scale, Vec2 center) {
  if (!(scale > 0.0)) throw std::invalid_argument("curve scale must be > 0");
  return SmoothClosedCurve(CurveKind::cavity, 0.0, 0, scale, center);
}

SmoothClosedCurve SmoothClosedCurve::translated(Vec2 offset) const {
  SmoothClosedCurve c = *this;
  c.center_ = center_ + offset;
  return c;
}

CurveJet SmoothClosedCurve::jet(double t) const {
  using cplx = std::complex<double>;
  CurveJet j;
  if (kind_ == CurveKind::cavity) {
    const double s = radius_ * cavity_unit_diameter_scale();
    const double c1 = std::cos(t), s1 = std::sin(t);
    const double c2 = std::cos(2 * t), s2 = std::sin(2 * t);
    j.p = Vec2{c1 + 0.65 * c2 - 0.65, 1.5 * s1} * s + center_;
    j.d1 = Vec2{-s1 - 1.3 * s2, 1.5 * c1} * s;
    j.d2 = Vec2{-c1 - 2.6 * c2, -1.5 * s1} * s;
    j.d3 = Vec2{s1 + 5.2 * s2, -1.5 * c1} * s;
    return j;
  }

  // Polar form gamma = rho(t) e^{it}; Leibniz rule on the product.
  const double a = amplitude_;
  const double m = arms_;
  const double cm = std::cos(m * t), sm = std::sin(m * t);
  const double rho[4] = {radius_ * (1.0 + a * cm), -radius_ * a * m * sm,
                         -radius_ * a * m * m * cm, radius_ * a * m * m * m * sm};
  const cplx e = std::polar(1.0, t);
  const cplx i{0.0, 1.0};
  const cplx g0 = rho[0] * e;
  const cplx g1 = (rho[1] + i * rho[0]) * e;
  const cplx g2 = (rho[2] + 2.0 * i * rho[1] - rho[0]) * e;
  const cplx g3 = (rho[3] + 3.0 * i * rho[2] - 3.0 * rho[1] - i * rho[0]) * e;
  j.p = to_vec(g0) + center_;
  j.d1 = to_vec(g1);
  j.d2 = to_vec(g2);
  j.d3 = to_vec(g3);
  return j;
}

Vec2L SmoothClosedCurve::chord(double t, double sigma) const {
  // Differences of trigonometric terms via product formulas, e.g.
  // cos(b) - cos(a) = -2 sin((a + b)/2) sin((b - a)/2), so no O(1)
  // positions are ever subtracted.
  using ld = long double;
  const ld tt = t, sg = sigma;
  const ld mid = tt + 0.5L * sg;
  const ld hs = std::sin(0.5L * sg);
  if (kind_ == CurveKind::cavity) {
    const ld s = static_cast<ld>(radius_) * static_cast<ld>(cavity_unit_diameter_scale());
    const ld dcos1 = -2.0L * std::sin(mid) * hs;
    const ld dcos2 = -2.0L * std::sin(2.0L * mid) * std::sin(sg);
    const ld dsin1 = 2.0L * std::cos(mid) * hs;
    return {s * (dcos1 + 0.65L * dcos2), s * 1.5L * dsin1};
  }
  // rho(t) e^{it}: e^{it} [(rho(t+s) - rho(t)) e^{is} + rho(t) (e^{is} - 1)].
  const ld a = amplitude_, m = arms_, R = radius_;
  const ld rho = R * (1.0L + a * std::cos(m * tt));
  const ld drho = -2.0L * R * a * std::sin(m * mid) * std::sin(0.5L * m * sg);
  // e^{is} - 1 = 2i sin(s/2) e^{is/2}
  const std::complex<ld> e_t = std::polar(1.0L, tt);
  const std::complex<ld> e_s = std::polar(1.0L, sg);
  const std::complex<ld> em1 = std::complex<ld>(0.0L, 2.0L * hs) * std::polar(1.0L, 0.5L * sg);
  const std::complex<ld> d = e_t * (drho * e_s + rho * em1);
  return {d.real(), d.imag()};
}

SmoothClosedCurve star_curve(double amplitude, int arms) {
  return SmoothClosedCurve::star(amplitude, arms);
}

CurveFrame curve_frame(const SmoothClosedCurve& curve, double t) {
  const CurveJet j = curve.jet(t);
  const double speed2 = dot(j.d1, j.d1);
  const double speed = std::sqrt(speed2);
  const double c12 = cross(j.d1, j.d2);
  const double c13 = cross(j.d1, j.d3);

  CurveFrame f;
  f.position = j.p;
  f.speed = speed;
  f.tangent = j.d1 / speed;
  f.normal = {f.tangent.y, -f.tangent.x};
  f.curvature = c12 / (speed2 * speed);
  // d/dt of cross(g', g'') / |g'|^3, then divide by |g'| for arc length.
  const double dkappa_dt =
      (c13 * speed2 - 3.0 * c12 * dot(j.d1, j.d2)) / (speed2 * speed2 * speed);
  f.dcurvature = dkappa_dt / speed;
  return f;
}

double BoundaryMesh::perimeter() const {
  double s = 0.0;
  for (const auto& n : nodes) s += n.speed;
  return s * h;
}

double BoundaryMesh::max_spacing() const {
  double s = 0.0;
  for (const auto& n : nodes) s = std::max(s, n.speed);
  return s * h;
}

double BoundaryMesh::area() const {
  // A = 1/2 \oint x dy - y dx
  double a = 0.0;
  for (const auto& n : nodes) a += cross(n.position, n.tangent) * n.speed;
  return 0.5 * a * h;
}

Vec2 BoundaryMesh::centroid() const {
  // Cx = 1/(2A) \oint x^2 dy,  Cy = -1/(2A) \oint y^2 dx
  double cx = 0.0, cy = 0.0;
  for (const auto& n : nodes) {
    const Vec2 d = n.tangent * n.speed;
    cx += n.position.x * n.position.x * d.y;
    cy -= n.position.y * n.position.y * d.x;
  }
  const double a2 = 2.0 * area();
  return {cx * h / a2, cy * h / a2};
}

BoundaryMesh discretize(const SmoothClosedCurve& curve, std::size_t n) {
  if (n < 16 || n % 2 != 0)
    throw std::invalid_argument("boundary mesh needs an even node count >= 16, got " +
                                std::to_string(n));
  BoundaryMesh mesh{curve, {}, two_pi / static_cast<double>(n)};
  mesh.nodes.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = mesh.h * static_cast<double>(j);
    const CurveFrame f = curve_frame(curve, t);
    mesh.nodes.push_back(
        {t, f.position, f.tangent, f.normal, f.speed, f.curvature, f.dcurvature});
  }
  return mesh;
}

RegionTester::RegionTester(std::span<const SmoothClosedCurve> curves,
                           std::size_t samples_per_curve) {
  for (const auto& c : curves) {
    std::vector<Vec2> poly(samples_per_curve);
    for (std::size_t j = 0; j < samples_per_curve; ++j)
      poly[j] = c.position(two_pi * static_cast<double>(j) /
                           static_cast<double>(samples_per_curve));
    polygons_.push_back(std::move(poly));
  }
}

int RegionTester::enclosing_curve(Vec2 z) const {
  for (std::size_t c = 0; c < polygons_.size(); ++c) {
    const auto& poly = polygons_[c];
    bool in = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = poly[i], b = poly[j];
      if ((a.y > z.y) != (b.y > z.y) &&
          z.x < (b.x - a.x) * (z.y - a.y) / (b.y - a.y) + a.x)
        in = !in;
    }
    if (in) return static_cast<int>(c);
  }
  return -1;
}

bool RegionTester::inside(Vec2 z) const { return enclosing_curve(z) >= 0; }

double RegionTester::distance_to_boundary(Vec2 z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& poly : polygons_) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = poly[j], b = poly[i];
      const Vec2 ab = b - a;
      const double s = std::clamp(dot(z - a, ab) / dot(ab, ab), 0.0, 1.0);
      best = std::min(best, norm(z - (a + ab * s)));
    }
  }
  return best;
}

double RegionTester::total_area() const {
  double total = 0.0;
  for (const auto& poly : polygons_) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) a += cross(poly[j], poly[i]);
    total += 0.5 * a;
  }
  return total;
}

Vec2 RegionTester::centroid() const {
  double area = 0.0;
  Vec2 moment{};
  for (const auto& poly : polygons_) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const double c = cross(poly[j], poly[i]);
      area += 0.5 * c;
      moment = moment + (poly[j] + poly[i]) * (c / 6.0);
    }
  }
  return moment / area;
}

}  // namespace platewave
