// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit tests.

#pragma once

#include <json.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <string>

#include "platewave/geometry.hpp"

namespace platewave::test {

inline nlohmann::json reference() {
  std::ifstream in(std::string(PLATEWAVE_FIXTURES) + "/reference.json");
  return nlohmann::json::parse(in);
}

inline double num(const nlohmann::json& j) { return std::stod(j.get<std::string>()); }

inline std::complex<double> cnum(const nlohmann::json& j) { return {num(j[0]), num(j[1])}; }

inline double rel(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::abs(b);
}

inline SmoothClosedCurve five_arms() { return star_curve(0.3, 5); }

inline constexpr double two_pi = 6.283185307179586;

}  // namespace platewave::test
