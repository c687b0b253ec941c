// SPDX-License-Identifier: Apache-2.0
//
#include "platewave/kernels.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace platewave {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// Below this k r the ladder values come from the ascending series.
constexpr double series_crossover = 2.0;
// Enough for long double precision at x = 2.
constexpr int series_terms = 24;

// f_m(x) = ((1/x) d/dx)^m [H0(x) + (2i/pi) K0(x)], m = 0..5, by the series
//
//   H0(x) - H0(ix) = J0(x) + (4i/pi) sum_{p odd} (x^2/4)^p/(p!)^2 (H_p - gamma - ln(x/2)).
template <class T>
std::array<std::complex<T>, 6> ladder_series(T x) {
  std::array<T, 6> re{}, im{};
  const T lnx = std::log(x);
  const T inv_x2 = 1 / (x * x);
  const T four_over_pi = 4 / std::numbers::pi_v<T>;
  T cp = 1;  // (1/4)^p / (p!)^2
  T x2p = 1;
  T harmonic = 0;
  for (int p = 0; p < series_terms; ++p) {
    if (p > 0) {
      cp /= T(4 * p * p);
      x2p *= x * x;
      harmonic += T(1) / T(p);
    }
    // J0 part: (-1)^p cp x^{2p}; ((1/x)d/dx) x^q = q x^{q-2}.
    {
      T coef = ((p % 2 == 0) ? cp : -cp) * x2p;
      int q = 2 * p;
      for (int m = 0; m < 6 && coef != 0; ++m) {
        re[m] += coef;
        coef *= T(q) * inv_x2;
        q -= 2;
      }
    }
    if (p % 2 == 1) {
      // (4/pi) cp x^q (a ln x + b) with a = -1, b = H_p - gamma + ln 2.
      T a = -1;
      T b = harmonic - std::numbers::egamma_v<T> + std::numbers::ln2_v<T>;
      int q = 2 * p;
      T xq = four_over_pi * cp * x2p;
      for (int m = 0; m < 6; ++m) {
        im[m] += xq * (a * lnx + b);
        const T na = T(q) * a;
        const T nb = T(q) * b + a;
        a = na;
        b = nb;
        q -= 2;
        xq *= inv_x2;
      }
    }
  }
  std::array<std::complex<T>, 6> f;
  for (int m = 0; m < 6; ++m) f[m] = {re[m], im[m]};
  return f;
}

// Same quantity from f_m = (-1)^m x^{-m} (H_m(x) + (2i/pi) K_m(x)).
std::array<cplx, 6> ladder_bessel(double x) {
  const BesselValues b = bessel_suite(x);
  std::array<cplx, 6> h{}, kk{};
  h[0] = {b.j0, b.y0};
  h[1] = {b.j1, b.y1};
  kk[0] = b.k0;
  kk[1] = b.k1;
  // Forward recurrence is stable for Y (which dominates H) and for K.
  for (int m = 1; m < 5; ++m) {
    h[m + 1] = (2.0 * m / x) * h[m] - h[m - 1];
    kk[m + 1] = (2.0 * m / x) * kk[m] + kk[m - 1];
  }
  std::array<cplx, 6> f;
  double s = 1.0;
  for (int m = 0; m < 6; ++m) {
    f[m] = s * (h[m] + (2.0 / pi) * I * kk[m]);
    s *= -1.0 / x;
  }
  return f;
}

void check_wavenumber(double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("wavenumber must be positive, got " + std::to_string(k));
}

}  // namespace

double bessel_j0(double x) { return boost::math::cyl_bessel_j(0, x); }
double bessel_j1(double x) { return boost::math::cyl_bessel_j(1, x); }

BesselValues bessel_suite(double x) {
  if (!(x > 0.0))
    throw std::domain_error("Y and K Bessel functions need x > 0, got " + std::to_string(x));
  namespace bm = boost::math;
  return {bm::cyl_bessel_j(0, x), bm::cyl_bessel_j(1, x), bm::cyl_neumann(0, x),
          bm::cyl_neumann(1, x),  bm::cyl_bessel_k(0, x), bm::cyl_bessel_k(1, x)};
}

cplx phi(double r, double k) {
  check_wavenumber(k);
  if (!(r >= 0.0)) throw std::invalid_argument("distance must be >= 0");
  const cplx pre = I / (8.0 * k * k);
  if (r == 0.0) return pre;
  const double x = k * r;
  if (x <= series_crossover) return pre * ladder_series<double>(x)[0];
  const BesselValues b = bessel_suite(x);
  return pre * (cplx{b.j0, b.y0} + (2.0 / pi) * I * b.k0);
}

RadialDerivTable phi_derivs(double r, double k, int max_order) {
  check_wavenumber(k);
  if (max_order < 0 || max_order > max_derivative_order)
    throw std::invalid_argument("derivative order must be in [0, 5]");
  if (!(r > 0.0))
    throw std::domain_error("radial derivatives of Phi are singular at r = 0");

  RadialDerivTable t;
  t.r = r;
  t.k = k;
  t.max_order = max_order;
  const double x = k * r;
  const auto f = x <= series_crossover ? ladder_series<double>(x) : ladder_bessel(x);
  const cplx pre = I / (8.0 * k * k);
  double k2m = 1.0;
  for (int m = 0; m <= 5; ++m) {
    t.ladder[m] = pre * k2m * f[m];
    k2m *= k * k;
  }

  // d^j/dr^j Phi = sum c r^a L_m, with d/dr (r^a L_m) = a r^{a-1} L_m + r^{a+1} L_{m+1}.
  // coef[a][m] holds c for r^a L_m; a never exceeds j.
  std::array<std::array<double, 7>, 7> coef{};
  coef[0][0] = 1.0;
  for (int j = 0; j <= max_order; ++j) {
    cplx v = 0.0;
    for (int a = 0; a <= j; ++a)
      for (int m = 0; m <= j; ++m)
        if (coef[a][m] != 0.0) v += coef[a][m] * std::pow(r, a) * t.ladder[m];
    t.values[j] = v;
    std::array<std::array<double, 7>, 7> next{};
    for (int a = 0; a <= j; ++a)
      for (int m = 0; m <= j; ++m) {
        const double c = coef[a][m];
        if (c == 0.0) continue;
        if (a > 0) next[a - 1][m] += c * a;
        next[a + 1][m + 1] += c;
      }
    coef = next;
  }
  return t;
}

namespace {

// d1^a d2^b phi(|w|) = sum_{i,j} C(a,i) C(b,j) w1^{a-2i} w2^{b-2j} L_{a+b-i-j},
// C(n,i) = n!/(2^i i! (n-2i)!) counts pairings within one coordinate.
template <class T>
BasicPartialTable<T> partials_from_ladder(const std::array<std::complex<T>, 6>& ladder, T w1,
                                          T w2, int max_order) {
  static constexpr double pairings[6][3] = {
      {1, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 3, 0}, {1, 6, 3}, {1, 10, 15}};
  std::array<T, 6> p1{}, p2{};
  p1[0] = p2[0] = 1;
  for (int i = 1; i < 6; ++i) {
    p1[i] = p1[i - 1] * w1;
    p2[i] = p2[i - 1] * w2;
  }
  BasicPartialTable<T> p;
  for (int a = 0; a <= max_order; ++a)
    for (int b = 0; a + b <= max_order; ++b) {
      std::complex<T> v = 0;
      for (int i = 0; 2 * i <= a; ++i)
        for (int j = 0; 2 * j <= b; ++j)
          v += T(pairings[a][i] * pairings[b][j]) * p1[a - 2 * i] * p2[b - 2 * j] *
               ladder[a + b - i - j];
      p(a, b) = v;
    }
  return p;
}

template <class T>
cplx apply_terms(std::span<const DiffOperator::Term> terms, const BasicPartialTable<T>& p, int a,
                 int b) {
  std::complex<T> v = 0;
  for (const auto& t : terms) v += T(t.c) * p(t.a + a, t.b + b);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

}  // namespace

PartialTable phi_partials(const RadialDerivTable& table, Vec2 w) {
  std::array<cplx, 6> ladder = table.ladder;
  return partials_from_ladder<double>(ladder, w.x, w.y, table.max_order);
}

PartialTableLD phi_partials_near(double k, Vec2L w, int max_order) {
  check_wavenumber(k);
  if (max_order < 0 || max_order > max_derivative_order)
    throw std::invalid_argument("derivative order must be in [0, 5]");
  using ld = long double;
  const ld r = std::hypot(w.x, w.y);
  if (!(r > 0)) throw std::domain_error("radial derivatives of Phi are singular at r = 0");
  const ld kk = k;
  const ld x = kk * r;
  std::array<std::complex<ld>, 6> f;
  if (x <= series_crossover) {
    f = ladder_series<ld>(x);
  } else {
    const auto fd = ladder_bessel(static_cast<double>(x));
    for (int m = 0; m < 6; ++m) f[m] = {fd[m].real(), fd[m].imag()};
  }
  const std::complex<ld> pre{0, 1 / (8 * kk * kk)};
  std::array<std::complex<ld>, 6> ladder;
  ld k2m = 1;
  for (int m = 0; m < 6; ++m) {
    ladder[m] = pre * k2m * f[m];
    k2m *= kk * kk;
  }
  return partials_from_ladder<ld>(ladder, w.x, w.y, max_order);
}

PartialTable plane_wave_partials(Vec2 xhat, Vec2 y, double k, int max_order) {
  const cplx e = std::polar(1.0, -k * dot(xhat, y));
  const cplx s1 = I * k * xhat.x, s2 = I * k * xhat.y;
  PartialTable p;
  cplx pa = 1.0;
  for (int a = 0; a <= max_order; ++a) {
    cplx pb = 1.0;
    for (int b = 0; a + b <= max_order; ++b) {
      p(a, b) = pa * pb * e;
      pb *= s2;
    }
    pa *= s1;
  }
  return p;
}

DiffOperator DiffOperator::identity() {
  DiffOperator op;
  op.terms_.push_back({0, 0, 1.0});
  return op;
}

DiffOperator DiffOperator::along(Direction d) {
  const double s = d.var == Variable::x ? 1.0 : -1.0;
  DiffOperator op;
  op.add(1, 0, s * d.e.x);
  op.add(0, 1, s * d.e.y);
  return op;
}

void DiffOperator::add(int a, int b, double c) {
  if (c == 0.0) return;
  for (auto& t : terms_)
    if (t.a == a && t.b == b) {
      t.c += c;
      return;
    }
  terms_.push_back({a, b, c});
}

DiffOperator DiffOperator::operator*(const DiffOperator& o) const {
  DiffOperator r;
  for (const auto& s : terms_)
    for (const auto& t : o.terms_) r.add(s.a + t.a, s.b + t.b, s.c * t.c);
  if (r.order() > max_derivative_order)
    throw std::invalid_argument("derivative order above 5 is not supported");
  return r;
}

DiffOperator DiffOperator::operator+(const DiffOperator& o) const {
  DiffOperator r = *this;
  for (const auto& t : o.terms_) r.add(t.a, t.b, t.c);
  return r;
}

DiffOperator DiffOperator::operator*(double s) const {
  DiffOperator r;
  for (const auto& t : terms_) r.add(t.a, t.b, t.c * s);
  return r;
}

DiffOperator DiffOperator::pow(int n) const {
  DiffOperator r = identity();
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

int DiffOperator::order() const {
  int o = 0;
  for (const auto& t : terms_) o = std::max(o, t.a + t.b);
  return o;
}

cplx DiffOperator::apply(const PartialTable& p) const { return apply_terms(terms(), p, 0, 0); }

cplx DiffOperator::apply(const PartialTableLD& p) const { return apply_terms(terms(), p, 0, 0); }

cplx DiffOperator::apply_shifted(const PartialTable& p, int a, int b) const {
  return apply_terms(terms(), p, a, b);
}

cplx DiffOperator::apply_shifted(const PartialTableLD& p, int a, int b) const {
  return apply_terms(terms(), p, a, b);
}

cplx directional_derivative(const RadialDerivTable& table, Vec2 w,
                            std::span<const Direction> directions) {
  if (directions.size() > static_cast<std::size_t>(max_derivative_order))
    throw std::invalid_argument("at most five directional derivatives are supported");
  if (static_cast<int>(directions.size()) > table.max_order)
    throw std::invalid_argument("derivative table was built for a lower order");
  if (!(norm(w) > 0.0))
    throw std::domain_error("directional derivatives of Phi need x != y");
  DiffOperator op = DiffOperator::identity();
  for (const auto& d : directions) op = op * DiffOperator::along(d);
  return op.apply(phi_partials(table, w));
}

cplx directional_derivative(const RadialDerivTable& table, Vec2 w,
                            std::initializer_list<Direction> directions) {
  return directional_derivative(table, w,
                                std::span<const Direction>(directions.begin(), directions.size()));
}

FarFieldKernel::FarFieldKernel(double wavenumber)
    : k(wavenumber), constant(farfield_constant(wavenumber)) {}

cplx farfield_constant(double k) {
  check_wavenumber(k);
  // H0(z) ~ sqrt(2/(pi z)) e^{i(z - pi/4)}, so i/(8k^2) H0(k|x - y|) gives
  // e^{i pi/4} / (2 k^2 sqrt(8 pi k)) in front of e^{ik|x|}/sqrt|x| e^{-ik xhat.y}.
  return std::polar(1.0, pi / 4.0) / (2.0 * k * k * std::sqrt(8.0 * pi * k));
}

cplx phi_farfield(Vec2 xhat, Vec2 y, double k) {
  return farfield_constant(k) * std::polar(1.0, -k * dot(xhat, y));
}

}  // namespace platewave
