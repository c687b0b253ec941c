// SPDX-License-Identifier: Apache-2.0
//
#include "platewave/operator.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <stdexcept>

#include "platewave/parallel.hpp"

namespace platewave {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double angle_of(std::size_t j, std::size_t n) {
  return two_pi * static_cast<double>(j) / static_cast<double>(n);
}

void check_finite(const Eigen::MatrixXcd& m) {
  if (!m.allFinite()) throw std::invalid_argument("far-field matrix has non-finite entries");
}

// Standard normal pairs by Box-Muller from raw 64-bit draws, so the stream
// is fixed by the seed on every platform (std::normal_distribution is not).
class NormalPairs {
 public:
  explicit NormalPairs(std::uint64_t seed) : gen_(seed) {}
  std::pair<double, double> next() {
    constexpr double scale = 0x1.0p-53;
    const double u1 = static_cast<double>((gen_() >> 11) + 1) * scale;  // (0, 1]
    const double u2 = static_cast<double>(gen_() >> 11) * scale;        // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
  }

 private:
  std::mt19937_64 gen_;
};

class ByteWriter {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* s, std::size_t n) { bytes.insert(bytes.end(), s, s + n); }
  std::vector<unsigned char> bytes;

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const unsigned char> b) : b_(b) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  void expect(const char* s, std::size_t n) {
    need(n);
    if (std::memcmp(b_.data() + pos_, s, n) != 0)
      throw std::runtime_error("bad magic, not a far-field matrix file");
    pos_ += n;
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw std::runtime_error("truncated far-field matrix file");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const unsigned char> b_;
  std::size_t pos_ = 0;
};

}  // namespace

DirectionSet::DirectionSet(std::size_t count) {
  if (count == 0) throw std::invalid_argument("direction set needs at least one direction");
  dirs_.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = angle_of(j, count);
    dirs_.push_back({std::cos(t), std::sin(t)});
  }
}

double DirectionSet::angle(std::size_t j) const { return angle_of(j, size()); }

double DirectionSet::weight() const { return two_pi / static_cast<double>(size()); }

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::additive ? "additive" : "multiplicative";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "additive") return NoiseKind::additive;
  if (name == "multiplicative") return NoiseKind::multiplicative;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

FarFieldMatrix::FarFieldMatrix(Eigen::MatrixXcd samples, double k, double nu,
                               Provenance provenance)
    : samples_(std::move(samples)), k_(k), nu_(nu), provenance_(provenance),
      incident_(static_cast<std::size_t>(std::max<Eigen::Index>(samples_.cols(), 1))),
      receivers_(static_cast<std::size_t>(std::max<Eigen::Index>(samples_.rows(), 1))) {
  if (samples_.rows() == 0 || samples_.cols() == 0)
    throw std::invalid_argument("far-field matrix must be non-empty");
  check_finite(samples_);
}

FarFieldMatrix synthesize(std::span<const BoundaryMesh> meshes, const PlateParams& params,
                          const DirectionSet& incident, const DirectionSet& receivers,
                          const SynthesisOptions& options) {
  const SystemMatrix system = assemble(meshes, params, options.assembly);
  const Eigen::MatrixXcd map = farfield_map(meshes, params, receivers.vectors());
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(receivers.size()),
                     static_cast<Eigen::Index>(incident.size()));
  parallel_for(incident.size(), [&](std::size_t j) {
    try {
      const SolveReport rep = solve(system, plane_wave_trace(meshes, params, incident[j]));
      if (!rep.density.phi1.allFinite() || !rep.density.phi2.allFinite())
        throw std::runtime_error("non-finite density");
      const auto n = rep.density.phi1.size();
      u.col(static_cast<Eigen::Index>(j)) =
          map.leftCols(n) * rep.density.phi1 + map.rightCols(n) * rep.density.phi2;
    } catch (const std::exception& e) {
      throw std::runtime_error("incident direction " + std::to_string(j) + ": " + e.what());
    }
  });
  return FarFieldMatrix(std::move(u), params.k, params.nu);
}

double reciprocity_residual(const FarFieldMatrix& f) {
  const auto& dirs = f.incident();
  if (!(dirs == f.receivers()))
    throw std::invalid_argument("reciprocity check needs equal incident and receiver sets");
  if (!dirs.negation_closed())
    throw std::invalid_argument("reciprocity check needs an even direction count");
  const auto& u = f.samples();
  const double scale = u.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t l = 0; l < dirs.size(); ++l)
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const auto a = u(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
      const auto b = u(static_cast<Eigen::Index>(dirs.opposite(j)),
                       static_cast<Eigen::Index>(dirs.opposite(l)));
      worst = std::max(worst, std::abs(a - b));
    }
  return worst / scale;
}

FarFieldMatrix add_noise(const FarFieldMatrix& f, NoiseKind kind, double level,
                         std::uint64_t seed) {
  if (!(level >= 0.0) || !std::isfinite(level))
    throw std::invalid_argument("noise level must be finite and >= 0");
  if (f.provenance().noisy)
    throw std::invalid_argument("noise can only be added to a clean matrix");
  Eigen::MatrixXcd u = f.samples();
  if (level > 0.0) {
    NormalPairs normal(seed);
    for (Eigen::Index l = 0; l < u.rows(); ++l)
      for (Eigen::Index j = 0; j < u.cols(); ++j) {
        const auto [a, b] = normal.next();
        const cplx unit = cplx(a, b) / std::hypot(a, b);
        const double size = kind == NoiseKind::additive ? level * std::abs(u(l, j)) : level;
        u(l, j) += size * unit;
      }
  }
  return FarFieldMatrix(std::move(u), f.k(), f.nu(), Provenance{true, kind, level, seed});
}

Eigen::VectorXcd apply_operator(const FarFieldMatrix& f, const Eigen::VectorXcd& g) {
  if (static_cast<std::size_t>(g.size()) != f.incident_count())
    throw std::invalid_argument("density length does not match the incident directions");
  return f.incident().weight() * (f.samples() * g);
}

Eigen::VectorXcd apply_adjoint(const FarFieldMatrix& f, const Eigen::VectorXcd& h) {
  if (static_cast<std::size_t>(h.size()) != f.receiver_count())
    throw std::invalid_argument("vector length does not match the receiver directions");
  return f.receivers().weight() * (f.samples().adjoint() * h);
}

cplx weighted_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double weight) {
  if (a.size() != b.size()) throw std::invalid_argument("inner product length mismatch");
  // b.dot(a) = sum conj(b_j) a_j
  return weight * b.dot(a);
}

std::vector<unsigned char> encode_bhff(const FarFieldMatrix& f) {
  ByteWriter w;
  w.raw("BHFF", 4);
  w.u32(bhff_version);
  w.u32(static_cast<std::uint32_t>(f.receiver_count()));
  w.u32(static_cast<std::uint32_t>(f.incident_count()));
  w.f64(f.k());
  w.f64(f.nu());
  const auto& p = f.provenance();
  w.u32(p.noisy ? 1u : 0u);
  if (p.noisy) {
    w.u32(static_cast<std::uint32_t>(p.kind));
    w.f64(p.level);
    w.u64(p.seed);
  }
  const auto& u = f.samples();
  for (Eigen::Index l = 0; l < u.rows(); ++l)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      w.f64(u(l, j).real());
      w.f64(u(l, j).imag());
    }
  return std::move(w.bytes);
}

FarFieldMatrix decode_bhff(std::span<const unsigned char> bytes) {
  ByteReader r(bytes);
  r.expect("BHFF", 4);
  const std::uint32_t version = r.u32();
  if (version != bhff_version)
    throw std::runtime_error("unsupported far-field file version " + std::to_string(version));
  const std::uint32_t nr = r.u32(), nd = r.u32();
  const double k = r.f64(), nu = r.f64();
  Provenance p;
  const std::uint32_t tag = r.u32();
  if (tag > 1) throw std::runtime_error("bad provenance tag " + std::to_string(tag));
  if (tag == 1) {
    p.noisy = true;
    const std::uint32_t kind = r.u32();
    if (kind != 1 && kind != 2) throw std::runtime_error("bad noise kind " + std::to_string(kind));
    p.kind = static_cast<NoiseKind>(kind);
    p.level = r.f64();
    p.seed = r.u64();
  }
  if (nr == 0 || nd == 0) throw std::runtime_error("empty far-field matrix");
  if (r.remaining() != 16ull * nr * nd)
    throw std::runtime_error("far-field payload size does not match its header");
  Eigen::MatrixXcd u(nr, nd);
  for (Eigen::Index l = 0; l < u.rows(); ++l)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const double re = r.f64();
      u(l, j) = cplx(re, r.f64());
    }
  return FarFieldMatrix(std::move(u), k, nu, p);
}

void write_bhff(const std::filesystem::path& path, const FarFieldMatrix& f) {
  const auto bytes = encode_bhff(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

FarFieldMatrix read_bhff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  try {
    return decode_bhff(bytes);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::string farfield_csv(const FarFieldMatrix& f) {
  std::string s = "l,j,re,im\n";
  char buf[96];
  const auto& u = f.samples();
  for (Eigen::Index l = 0; l < u.rows(); ++l)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", static_cast<long>(l),
                    static_cast<long>(j), u(l, j).real(), u(l, j).imag());
      s += buf;
    }
  return s;
}

}  // namespace platewave
