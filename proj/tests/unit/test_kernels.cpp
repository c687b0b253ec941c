// SPDX-License-Identifier: Apache-2.0
//
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "platewave/kernels.hpp"
#include "support.hpp"

using namespace platewave;
using test::cnum;
using test::num;
using test::rel;

TEST_SUITE("kernels") {
  TEST_CASE("Bessel functions match the high-precision reference") {
    const auto ref = test::reference();
    for (const auto& row : ref["bessel"]) {
      const double x = num(row["x"]);
      const BesselValues b = bessel_suite(x);
      const double ex = std::exp(-x);
      auto close = [](double got, double want) {
        return std::abs(got - want) <= 1e-13 * std::max(1.0, std::abs(want));
      };
      INFO("x = " << x);
      CHECK(close(b.j0, num(row["j0"])));
      CHECK(close(b.j1, num(row["j1"])));
      CHECK(close(b.y0, num(row["y0"])));
      CHECK(close(b.y1, num(row["y1"])));
      // K decays like e^{-x}; compare relative to its own size.
      CHECK(b.k0 == doctest::Approx(num(row["k0_scaled"]) * ex).epsilon(1e-13));
      CHECK(b.k1 == doctest::Approx(num(row["k1_scaled"]) * ex).epsilon(1e-13));
      CHECK(bessel_j0(x) == b.j0);
      CHECK(bessel_j1(x) == b.j1);
    }
  }

  TEST_CASE("Wronskian identities") {
    for (double x : {0.01, 0.3, 1.0, 7.5, 42.0, 900.0}) {
      const BesselValues b = bessel_suite(x);
      const double wy = b.j1 * b.y0 - b.j0 * b.y1;
      CHECK(std::abs(wy * std::numbers::pi * x / 2.0 - 1.0) < 1e-13);
      if (x < 600) {
        const double ik = (b.k0 * std::cyl_bessel_i(1.0, x) + b.k1 * std::cyl_bessel_i(0.0, x)) * x;
        CHECK(std::abs(ik - 1.0) < 1e-12);
      }
    }
    CHECK_THROWS_AS(bessel_suite(0.0), std::domain_error);
  }

  TEST_CASE("Phi and its radial derivatives match the reference") {
    const auto ref = test::reference();
    for (const auto& c : ref["phi"]) {
      const double k = num(c["k"]), r = num(c["r"]);
      const RadialDerivTable t = phi_derivs(r, k);
      INFO("k = " << k << ", r = " << r);
      CHECK(rel(phi(r, k), cnum(c["derivs"][0])) < 1e-13);
      for (int j = 0; j <= max_derivative_order; ++j) {
        INFO("order " << j);
        CHECK(rel(t.values[j], cnum(c["derivs"][j])) < 1e-11);
      }
    }
    CHECK(rel(phi(0.0, 1.0), cnum(ref["phi_at_zero_k1"])) < 1e-15);
    CHECK(rel(phi(0.0, 2.0), cplx(0.0, 1.0 / 32.0)) < 1e-15);
  }

  TEST_CASE("radial derivatives agree with central differences of the previous order") {
    const double k = test::two_pi, h = 1e-6;
    for (double r : {0.05, 0.4, 2.2}) {
      const RadialDerivTable t = phi_derivs(r, k);
      for (int j = 1; j <= max_derivative_order; ++j) {
        const cplx fd = (phi_derivs(r + h, k).values[j - 1] - phi_derivs(r - h, k).values[j - 1]) /
                        (2.0 * h);
        INFO("r = " << r << ", order " << j);
        CHECK(rel(fd, t.values[j]) < 1e-6);
      }
    }
  }

  TEST_CASE("Phi solves the biharmonic wave equation away from the source") {
    const double k = 3.0;
    for (Vec2 w : {Vec2{0.3, -0.2}, Vec2{1.1, 0.7}, Vec2{-2.0, 4.0}}) {
      const PartialTable p = phi_partials(phi_derivs(norm(w), k), w);
      const cplx bilap = p(4, 0) + 2.0 * p(2, 2) + p(0, 4);
      const cplx rhs = std::pow(k, 4) * p(0, 0);
      CHECK(std::abs(bilap - rhs) < 1e-9 * std::abs(p(4, 0)));
    }
  }

  TEST_CASE("Cartesian partials match finite differences") {
    const double k = test::two_pi, h = 1e-6;
    const Vec2 w{0.37, -0.21};
    const PartialTable p = phi_partials(phi_derivs(norm(w), k), w);
    for (int a = 0; a < 5; ++a)
      for (int b = 0; a + b < 5; ++b) {
        const Vec2 dx{h, 0.0}, dy{0.0, h};
        const cplx fx = (phi_partials(phi_derivs(norm(w + dx), k), w + dx)(a, b) -
                         phi_partials(phi_derivs(norm(w - dx), k), w - dx)(a, b)) / (2 * h);
        const cplx fy = (phi_partials(phi_derivs(norm(w + dy), k), w + dy)(a, b) -
                         phi_partials(phi_derivs(norm(w - dy), k), w - dy)(a, b)) / (2 * h);
        INFO("a = " << a << ", b = " << b);
        CHECK(std::abs(fx - p(a + 1, b)) < 1e-6 * std::max(1.0, std::abs(p(a + 1, b))));
        CHECK(std::abs(fy - p(a, b + 1)) < 1e-6 * std::max(1.0, std::abs(p(a, b + 1))));
      }
  }

  TEST_CASE("near-field long double partials agree with the double path") {
    const double k = test::two_pi;
    for (Vec2 w : {Vec2{0.05, 0.01}, Vec2{-0.003, 0.002}, Vec2{0.2, -0.3}}) {
      const PartialTable p = phi_partials(phi_derivs(norm(w), k), w);
      const PartialTableLD q = phi_partials_near(k, Vec2L{w.x, w.y});
      for (int a = 0; a <= 5; ++a)
        for (int b = 0; a + b <= 5; ++b) {
          const std::complex<double> qd(static_cast<double>(q(a, b).real()),
                                        static_cast<double>(q(a, b).imag()));
          const double scale = std::max(1.0, std::abs(p(a, b)));
          INFO("a = " << a << ", b = " << b);
          CHECK(std::abs(qd - p(a, b)) < 1e-10 * scale);
        }
    }
  }

  TEST_CASE("directional derivatives: x and y derivatives differ by sign") {
    const double k = 2.0;
    const Vec2 w{0.6, 0.8};
    const RadialDerivTable t = phi_derivs(norm(w), k);
    const Vec2 e{0.0, 1.0};
    const cplx dx = directional_derivative(t, w, {{e, Variable::x}});
    const cplx dy = directional_derivative(t, w, {{e, Variable::y}});
    CHECK(std::abs(dx + dy) < 1e-15);
    // Radial direction gives Phi'(r).
    const cplx dr = directional_derivative(t, w, {{w / norm(w), Variable::x}});
    CHECK(rel(dr, t.values[1]) < 1e-14);
    // Operator algebra agrees with the direct form.
    const DiffOperator op = DiffOperator::along({e, Variable::y}).pow(2) * DiffOperator::along({w, Variable::x});
    const cplx direct = directional_derivative(
        t, w, {{e, Variable::y}, {e, Variable::y}, {w, Variable::x}});
    CHECK(rel(op.apply(phi_partials(t, w)), direct) < 1e-13);
    CHECK(op.order() == 3);
    CHECK_THROWS_AS(phi_derivs(0.0, k), std::domain_error);
  }

  TEST_CASE("far-field constant matches the large-distance asymptotics of Phi") {
    // Phi(r) ~ C_ff e^{ikr} / sqrt(r) with relative error O(1/(kr)).
    for (double k : {1.0, test::two_pi}) {
      const double r = 2000.0;
      const cplx ratio = phi(r, k) * std::sqrt(r) * std::exp(cplx(0.0, -k * r));
      const cplx c = farfield_constant(k);
      CHECK(rel(ratio, c) < 1.0 / (k * r));
      CHECK(rel(ratio, -c) > 1.0);
      const cplx closed = std::exp(cplx(0.0, std::numbers::pi / 4)) /
                          (2.0 * k * k * std::sqrt(8.0 * std::numbers::pi * k));
      CHECK(rel(c, closed) < 1e-15);
      CHECK(FarFieldKernel(k).constant == c);
    }
    // phi_farfield carries the plane-wave factor.
    const Vec2 xhat{0.6, 0.8}, y{0.3, -0.5};
    const double k = 2.5;
    CHECK(rel(phi_farfield(xhat, y, k), farfield_constant(k) * std::exp(cplx(0.0, -k * dot(xhat, y)))) <
          1e-15);
  }

  TEST_CASE("plane-wave partials") {
    const double k = 1.7;
    const Vec2 xhat{0.28, 0.96}, y{0.4, 0.1};
    const PartialTable p = plane_wave_partials(xhat, y, k, 5);
    const cplx base = std::exp(cplx(0.0, -k * dot(xhat, y)));
    const cplx ik(0.0, k);
    CHECK(rel(p(0, 0), base) < 1e-15);
    CHECK(rel(p(2, 3), std::pow(ik * xhat.x, 2) * std::pow(ik * xhat.y, 3) * base) < 1e-14);
  }
}
