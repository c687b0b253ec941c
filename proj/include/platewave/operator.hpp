// SPDX-License-Identifier: Apache-2.0
//
// Discrete far-field operator: synthesis of u_inf(xhat_l, d_j) over
// uniform direction sets, weighted application, noise injection and the
// reciprocity check u_inf(xhat, d) = u_inf(-d, -xhat).
//
// Raw samples are stored; the trapezoid weight 2*pi/N_d is applied only
// when the operator acts on a density.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "platewave/forward.hpp"

namespace platewave {

/// Angles theta_j = 2*pi*j/N and unit vectors d_j.
class DirectionSet {
 public:
  /// Requires N >= 1.
  explicit DirectionSet(std::size_t count);

  std::size_t size() const { return dirs_.size(); }
  double angle(std::size_t j) const;
  Vec2 operator[](std::size_t j) const { return dirs_[j]; }
  std::span<const Vec2> vectors() const { return dirs_; }
  /// Index of -d_j; only meaningful when the set is negation closed.
  std::size_t opposite(std::size_t j) const { return (j + size() / 2) % size(); }
  bool negation_closed() const { return size() % 2 == 0; }
  /// Trapezoid weight 2*pi/N.
  double weight() const;

  bool operator==(const DirectionSet& o) const { return size() == o.size(); }

 private:
  std::vector<Vec2> dirs_;
};

/// Noise formulas, named as in the source publication: "additive" scales the
/// perturbation by |u|, "multiplicative" adds a perturbation of fixed size.
enum class NoiseKind : std::uint32_t { additive = 1, multiplicative = 2 };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct Provenance {
  bool noisy = false;
  NoiseKind kind = NoiseKind::additive;
  double level = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const Provenance&) const = default;
};

/// U(l, j) = u_inf(xhat_l, d_j), N_r x N_d. Immutable after creation.
class FarFieldMatrix {
 public:
  FarFieldMatrix(Eigen::MatrixXcd samples, double k, double nu, Provenance provenance = {});

  const Eigen::MatrixXcd& samples() const { return samples_; }
  double k() const { return k_; }
  double nu() const { return nu_; }
  const Provenance& provenance() const { return provenance_; }
  const DirectionSet& incident() const { return incident_; }
  const DirectionSet& receivers() const { return receivers_; }
  std::size_t receiver_count() const { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t incident_count() const { return static_cast<std::size_t>(samples_.cols()); }

 private:
  Eigen::MatrixXcd samples_;
  double k_;
  double nu_;
  Provenance provenance_;
  DirectionSet incident_;
  DirectionSet receivers_;
};

struct SynthesisOptions {
  AssemblyOptions assembly{};
};

/// One factorization, one solve per incident direction (parallel over
/// directions). Solver failures are rethrown as std::runtime_error naming
/// the direction index.
FarFieldMatrix synthesize(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                          const DirectionSet& incident, const DirectionSet& receivers,
                          const SynthesisOptions& options = {});

/// max_{l,j} |U(l,j) - U(j + N/2, l + N/2)| / max |U|. Requires equal,
/// even-sized direction sets.
double reciprocity_residual(const FarFieldMatrix& f);

/// Per entry delta = a + ib with a, b standard normal from a seeded
/// mt19937_64 stream (Box-Muller, entries in row-major order), then
///   additive:       u + c (delta/|delta|) |u|
///   multiplicative: u + c (delta/|delta|).
/// Requires c >= 0 and a clean input matrix.
FarFieldMatrix add_noise(const FarFieldMatrix& f, NoiseKind kind, double level,
                         std::uint64_t seed);

/// (2*pi/N_d) U g.
Eigen::VectorXcd apply_operator(const FarFieldMatrix& f, const Eigen::VectorXcd& g);
/// (2*pi/N_r) U^H h, the adjoint for the weighted inner products.
Eigen::VectorXcd apply_adjoint(const FarFieldMatrix& f, const Eigen::VectorXcd& h);

/// Trapezoid-weighted inner product sum w a_j conj(b_j).
cplx weighted_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double weight);

/// Binary far-field file, little-endian:
///   "BHFF", u32 version = 1, u32 N_r, u32 N_d, f64 k, f64 nu,
///   u32 provenance (0 clean, 1 noisy) [+ u32 kind, f64 level, u64 seed],
///   then N_r * N_d row-major (re, im) f64 pairs.
inline constexpr std::uint32_t bhff_version = 1;

std::vector<unsigned char> encode_bhff(const FarFieldMatrix& f);
FarFieldMatrix decode_bhff(std::span<const unsigned char> bytes);
void write_bhff(const std::filesystem::path& path, const FarFieldMatrix& f);
FarFieldMatrix read_bhff(const std::filesystem::path& path);

/// CSV rows "l,j,re,im" with a header line.
std::string farfield_csv(const FarFieldMatrix& f);

}  // namespace platewave
