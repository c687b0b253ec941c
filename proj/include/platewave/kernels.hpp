// SPDX-License-Identifier: Apache-2.0
//
// Special functions and the radiating fundamental solution of the
// biharmonic wave operator (Delta^2 - k^4) in the plane:
//
//   Phi(x, y) = i/(8 k^2) (H0(k r) - H0(i k r)),   r = |x - y|,
//
// with H0(i z) = (2/(pi i)) K0(z). Derivatives up to total order five are
// formed from radial derivatives by an exact chain rule.

#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

#include "platewave/geometry.hpp"

namespace platewave {

using cplx = std::complex<double>;

inline constexpr int max_derivative_order = 5;

struct BesselValues {
  double j0, j1, y0, y1, k0, k1;
};

double bessel_j0(double x);
double bessel_j1(double x);
/// J0, J1, Y0, Y1, K0, K1 at x > 0. Throws std::domain_error for x <= 0.
BesselValues bessel_suite(double x);

/// Phi as a function of distance. Returns the finite limit i/(8k^2) at r = 0.
cplx phi(double r, double k);

/// Radial derivatives of Phi(r) and the "ladder" values ((1/r) d/dr)^m Phi.
///
/// The ladder values are what the Cartesian chain rule consumes; they are
/// evaluated without cancellation for small k r from the ascending series,
/// where the logarithms of H0 and K0 cancel term by term.
struct RadialDerivTable {
  double r = 0.0;
  double k = 0.0;
  int max_order = 0;
  std::array<cplx, 6> values{};  // d^j Phi / dr^j
  std::array<cplx, 6> ladder{};  // ((1/r) d/dr)^m Phi
};

/// Requires r > 0 (domain_error otherwise) and max_order <= 5.
RadialDerivTable phi_derivs(double r, double k, int max_order = max_derivative_order);

/// Cartesian partial derivatives d^a/dw1^a d^b/dw2^b of a function of w,
/// a + b <= 5.
template <class T>
struct BasicPartialTable {
  std::array<std::array<std::complex<T>, 6>, 6> d{};
  const std::complex<T>& operator()(int a, int b) const { return d[a][b]; }
  std::complex<T>& operator()(int a, int b) { return d[a][b]; }
};
using PartialTable = BasicPartialTable<double>;
using PartialTableLD = BasicPartialTable<long double>;

/// Partials of w -> Phi(|w|) at w = x - y.
PartialTable phi_partials(const RadialDerivTable& table, Vec2 w);

/// Same partials in long double for nearly coincident points. The fifth
/// derivatives grow like |w|^-3 and cancel to O(1) in the layer kernels, so
/// w must be known to full relative precision (see SmoothClosedCurve::chord).
PartialTableLD phi_partials_near(double k, Vec2L w, int max_order = max_derivative_order);

/// Partials in w = x - y of the plane wave y -> e^{-ik xhat.y} (the
/// far-field factor of Phi), i.e. (ik xhat_1)^a (ik xhat_2)^b e^{-ik xhat.y}.
PartialTable plane_wave_partials(Vec2 xhat, Vec2 y, double k, int max_order);

enum class Variable { x, y };

struct Direction {
  Vec2 e;
  Variable var;
};

/// Linear constant-coefficient differential operator in w = x - y,
/// stored as sparse monomials c * d1^a d2^b. A derivative along e in y is
/// -(e . grad_w), along e in x it is +(e . grad_w).
class DiffOperator {
 public:
  struct Term {
    int a, b;
    double c;
  };

  DiffOperator() = default;
  static DiffOperator identity();
  static DiffOperator along(Direction d);

  DiffOperator operator*(const DiffOperator& o) const;
  DiffOperator operator+(const DiffOperator& o) const;
  DiffOperator operator*(double s) const;
  DiffOperator pow(int n) const;

  int order() const;
  std::span<const Term> terms() const { return terms_; }

  /// Value of the operator applied to the function whose partials are given.
  cplx apply(const PartialTable& p) const;
  cplx apply(const PartialTableLD& p) const;
  /// d1^a d2^b of (this operator applied to the function).
  cplx apply_shifted(const PartialTable& p, int a, int b) const;
  cplx apply_shifted(const PartialTableLD& p, int a, int b) const;

 private:
  void add(int a, int b, double c);
  std::vector<Term> terms_;
};

/// Mixed directional derivative of Phi(x, y) at x - y = w, each direction
/// tagged as a derivative in x or in y. At most five directions.
cplx directional_derivative(const RadialDerivTable& table, Vec2 w,
                            std::span<const Direction> directions);
cplx directional_derivative(const RadialDerivTable& table, Vec2 w,
                            std::initializer_list<Direction> directions);

/// C_ff in Phi(x, y) ~ e^{ik|x|}/sqrt|x| * C_ff e^{-ik xhat.y}.
struct FarFieldKernel {
  double k;
  cplx constant;
  explicit FarFieldKernel(double wavenumber);
};

cplx farfield_constant(double k);
cplx phi_farfield(Vec2 xhat, Vec2 y, double k);

}  // namespace platewave
