// SPDX-License-Identifier: Apache-2.0
//
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "platewave/inverse.hpp"
#include "platewave/parallel.hpp"
#include "support.hpp"

using namespace platewave;
using test::rel;
using test::two_pi;

namespace {

const FarFieldMatrix& star_matrix() {
  static const FarFieldMatrix f = [] {
    const std::vector<BoundaryMesh> m{discretize(test::five_arms(), 192)};
    return synthesize(m, PlateParams(two_pi, 0.3), DirectionSet(48), DirectionSet(48));
  }();
  return f;
}

// F = (2 pi / N) U = I.
FarFieldMatrix identity_matrix(std::size_t n) {
  return FarFieldMatrix(Eigen::MatrixXcd::Identity(n, n) * (n / (2 * std::numbers::pi)), 1.0, 0.3);
}

IndicatorField field_of(const SamplingGrid& g, std::vector<double> v,
                        IndicatorMethod method = IndicatorMethod::dsm1) {
  IndicatorField f;
  f.grid = g;
  f.values = std::move(v);
  f.method = method;
  return f;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_SUITE("inverse") {
  TEST_CASE("sampling grids") {
    const SamplingGrid g{-1.0, 1.0, 0.0, 3.0, 5, 4};
    CHECK_NOTHROW(g.validate());
    CHECK(g.size() == 20);
    CHECK(g.dx() == doctest::Approx(0.5));
    CHECK(g.dy() == doctest::Approx(1.0));
    CHECK(g.point(0) == Vec2{-1.0, 0.0});
    CHECK(g.point(7) == g.point(2, 1));
    CHECK(g.point(19) == Vec2{1.0, 3.0});
    CHECK_THROWS_AS((SamplingGrid{0.0, 0.0, 0.0, 1.0, 3, 3}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SamplingGrid{0.0, 1.0, 0.0, 1.0, 1, 3}.validate()), std::invalid_argument);
  }

  TEST_CASE("right-hand sides") {
    const DirectionSet d(16);
    const double k = 2.0;
    const Vec2 z{0.3, -0.4};
    const auto plain = rhs_vector(z, d, k, false);
    const auto scaled = rhs_vector(z, d, k, true);
    for (Eigen::Index j = 0; j < 16; ++j) {
      CHECK(std::abs(plain(j)) == doctest::Approx(1.0));
      CHECK(rel(plain(j), std::exp(cplx(0.0, -k * dot(z, d[static_cast<std::size_t>(j)])))) < 1e-15);
      CHECK(rel(scaled(j), farfield_constant(k) * plain(j)) < 1e-15);
    }
    CHECK(rhs_vector({0.0, 0.0}, d, k, false) == Eigen::VectorXcd::Ones(16));
  }

  TEST_CASE("Tikhonov solution for the identity operator") {
    const auto f = identity_matrix(12);
    const TikhonovSolver s(f);
    CHECK((s.singular_values().array() - 1.0).abs().maxCoeff() < 1e-14);
    const auto phi = rhs_vector({0.2, 0.1}, f.incident(), 1.0, true);
    const auto g = lsm_solve(s, phi, 0.25);
    CHECK((g - phi / 1.25).norm() < 1e-14 * phi.norm());
    const double a[1] = {0.25};
    const double expect = std::sqrt(s.density_weight()) * phi.norm() / 1.25;
    CHECK(lsm_norms(s, phi, a)[0] == doctest::Approx(expect).epsilon(1e-14));
    CHECK_THROWS_AS(lsm_solve(s, phi, 0.0), std::invalid_argument);
  }

  TEST_CASE("Tikhonov solution satisfies the normal equation") {
    const FarFieldMatrix& f = star_matrix();
    const TikhonovSolver s(f);
    CHECK(s.reconstruction_error() < 1e-10);
    const Eigen::MatrixXcd a = f.samples() * (two_pi / 48.0);
    for (double alpha : {1e-6, 1e-3, 1e-1}) {
      const auto phi = rhs_vector({0.1, 0.2}, f.receivers(), f.k(), true);
      const auto g = lsm_solve(s, phi, alpha);
      const Eigen::VectorXcd res = alpha * g + a.adjoint() * (a * g) - a.adjoint() * phi;
      CHECK(res.norm() < 1e-10 * (a.adjoint() * phi).norm());
      // Norms from the projection agree with the explicit solution.
      const double al[1] = {alpha};
      CHECK(lsm_norms(s, phi, al)[0] ==
            doctest::Approx(std::sqrt(s.density_weight()) * g.norm()).epsilon(1e-12));
    }
  }

  TEST_CASE("density norm decreases with the regularization parameter") {
    const FarFieldMatrix& f = star_matrix();
    const TikhonovSolver s(f);
    const std::vector<double> alphas{1e-8, 1e-6, 1e-4, 1e-2, 1.0};
    for (Vec2 z : {Vec2{0.0, 0.0}, Vec2{2.5, 0.0}}) {
      const auto n = lsm_norms(s, rhs_vector(z, f.receivers(), f.k(), true), alphas);
      for (std::size_t i = 1; i < n.size(); ++i) CHECK(n[i] < n[i - 1]);
    }
    // Outside points need larger densities.
    const auto in = lsm_norms(s, rhs_vector({0.0, 0.0}, f.receivers(), f.k(), true), alphas);
    const auto out = lsm_norms(s, rhs_vector({2.5, 0.0}, f.receivers(), f.k(), true), alphas);
    CHECK(out[1] > 10.0 * in[1]);
  }

  TEST_CASE("DSM values obey Cauchy-Schwarz and match the point evaluator") {
    const FarFieldMatrix& f = star_matrix();
    const SamplingGrid g{-2.0, 2.0, -2.0, 2.0, 9, 9};
    const DsmFields d = dsm_indicators(g, f, 2.0, 1.0);
    const DsmFields e = dsm_indicators(g, f, 3.0, 0.5);
    for (std::size_t p = 0; p < g.size(); ++p) {
      const DsmPoint q = dsm_point(f, g.point(p));
      // ||phi_z|| = sqrt(2 pi).
      CHECK(q.inner <= std::sqrt(two_pi) * q.norm * (1 + 1e-12));
      CHECK(d.dsm1.values[p] == doctest::Approx(q.inner).epsilon(1e-12));
      CHECK(d.dsm2.values[p] == doctest::Approx(q.norm).epsilon(1e-12));
      CHECK(e.dsm1.values[p] == doctest::Approx(std::pow(q.inner, 1.5)).epsilon(1e-12));
      CHECK(e.dsm2.values[p] == doctest::Approx(std::sqrt(q.norm)).epsilon(1e-12));
    }
    CHECK(d.dsm1.method == IndicatorMethod::dsm1);
    CHECK(d.dsm2.parameter == 1.0);
    CHECK_THROWS_AS(dsm_indicators(g, f, 0.0, 1.0), std::invalid_argument);
  }

  TEST_CASE("DSM maximum is invariant under scaling of the data") {
    const FarFieldMatrix& f = star_matrix();
    const FarFieldMatrix f3(f.samples() * 3.0, f.k(), f.nu());
    const SamplingGrid g{-2.0, 2.0, -2.0, 2.0, 21, 21};
    const DsmFields a = dsm_indicators(g, f), b = dsm_indicators(g, f3);
    CHECK(argmax(a.dsm1.values) == argmax(b.dsm1.values));
    CHECK(argmax(a.dsm2.values) == argmax(b.dsm2.values));
    const auto ra = a.dsm1.rescale(), rb = b.dsm1.rescale();
    for (std::size_t p = 0; p < g.size(); ++p) CHECK(ra.values[p] == doctest::Approx(rb.values[p]));
    CHECK(ra.rescaled);
  }

  TEST_CASE("clean data: indicator maxima lie in or next to the obstacle") {
    const FarFieldMatrix& f = star_matrix();
    const SamplingGrid g{-3.0, 3.0, -3.0, 3.0, 61, 61};
    const SmoothClosedCurve truth[1] = {test::five_arms()};
    const RegionTester region(truth);
    const double cell = std::hypot(g.dx(), g.dy());
    const DsmFields d = dsm_indicators(g, f);
    const IndicatorField l = lsm_indicator(g, f, 1e-4);
    for (const IndicatorField* field : {&d.dsm1, &d.dsm2, &l}) {
      const Vec2 z = g.point(argmax(field->values));
      CHECK((region.inside(z) || region.distance_to_boundary(z) <= cell));
    }
    const auto m = localization_metrics(l, truth, two_pi / f.k());
    CHECK(m.containment >= 0.9);
    CHECK(m.centroid_error <= 0.2);
  }

  TEST_CASE("indicator fields do not depend on the worker count") {
    const FarFieldMatrix& f = star_matrix();
    const SamplingGrid g{-3.0, 3.0, -3.0, 3.0, 37, 29};
    set_worker_count(1);
    const DsmFields a = dsm_indicators(g, f);
    const IndicatorField la = lsm_indicator(g, f, 1e-3);
    set_worker_count(3);
    const DsmFields b = dsm_indicators(g, f);
    const IndicatorField lb = lsm_indicator(g, f, 1e-3);
    set_worker_count(1);
    CHECK(a.dsm1.values == b.dsm1.values);
    CHECK(a.dsm2.values == b.dsm2.values);
    CHECK(la.values == lb.values);
  }

  TEST_CASE("localization metrics on synthetic fields") {
    const SamplingGrid g{-3.0, 3.0, -3.0, 3.0, 61, 61};
    const SmoothClosedCurve truth[1] = {test::five_arms()};
    const RegionTester region(truth);

    // Exact indicator of the obstacle.
    std::vector<double> exact(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) exact[p] = region.inside(g.point(p)) ? 1.0 : 0.0;
    const auto m = localization_metrics(field_of(g, exact), truth);
    CHECK_FALSE(m.degenerate);
    CHECK(m.containment == 1.0);
    CHECK(m.centroid_error < 0.02);
    CHECK(m.peak_count == 1);
    CHECK(m.obstacles_detected == 1);
    CHECK(m.top_count == static_cast<std::size_t>(std::count(exact.begin(), exact.end(), 1.0)));

    // Uniform field: containment is the area fraction.
    const auto u = localization_metrics(field_of(g, std::vector<double>(g.size(), 2.0)), truth);
    CHECK(u.top_count == g.size());
    CHECK(u.containment == doctest::Approx(region.total_area() / 36.0).epsilon(0.03));
    CHECK(u.peak_count == 1);

    // Two separated bumps: merged only when the radius covers the gap.
    std::vector<double> two(g.size(), 0.0);
    two[30 * 61 + 10] = 1.0;
    two[30 * 61 + 50] = 1.0;
    CHECK(localization_metrics(field_of(g, two), truth).peak_count == 2);
    CHECK(localization_metrics(field_of(g, two), truth, 4.1).peak_count == 1);
    CHECK(localization_metrics(field_of(g, two), truth).obstacles_detected == 0);

    // Degenerate fields.
    CHECK(localization_metrics(field_of(g, std::vector<double>(g.size(), 0.0)), truth).degenerate);
    CHECK_THROWS_AS(field_of(g, std::vector<double>(g.size(), 0.0)).rescale(), std::domain_error);
    CHECK_THROWS_AS(localization_metrics(field_of(g, exact), {}), std::invalid_argument);
  }

  TEST_CASE("display transforms and exports") {
    const SamplingGrid g{0.0, 1.0, 0.0, 2.0, 2, 3};
    const auto lsm = field_of(g, {1.0, 10.0, 100.0, 1.0, 1.0, 1.0}, IndicatorMethod::lsm);
    const auto shown = display_values(lsm);
    CHECK(shown[0] == 0.0);
    CHECK(shown[1] == doctest::Approx(0.5));
    CHECK(shown[2] == 1.0);
    const auto dsm = field_of(g, {1.0, 2.0, 4.0, 0.0, 0.0, 0.0});
    CHECK(display_values(dsm)[1] == 0.5);

    const auto pgm = indicator_pgm(dsm);
    const std::string header = "P5\n2 3\n255\n";
    CHECK(std::string(pgm.begin(), pgm.begin() + header.size()) == header);
    CHECK(pgm.size() == header.size() + 6);
    // Row 0 is y = y0.
    CHECK(pgm[header.size() + 0] == 64);
    CHECK(pgm[header.size() + 1] == 128);
    CHECK(pgm[header.size() + 2] == 255);

    const std::string csv = indicator_csv(dsm);
    CHECK(csv.rfind("x,y,value\n0,0,0.25\n1,0,0.5\n0,1,1\n", 0) == 0);
    CHECK(to_string(IndicatorMethod::dsm2) == "dsm2");
  }
}
