// SPDX-License-Identifier: Apache-2.0
#include "irsjam/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace irsjam {

SteeringSpec bearing_angles(const Vec3& from, const Vec3& to) {
  const Vec3 diff = to - from;
  const double norm = diff.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("bearing_angles: coincident points");
  const Vec3 u = diff / norm;
  SteeringSpec spec;
  spec.polar = std::acos(std::clamp(u.z(), -1.0, 1.0));
  spec.azimuth = std::atan2(u.x(), u.y());
  return spec;
}

double ula_angle(const Vec3& from, const Vec3& to) {
  const Vec3 diff = to - from;
  const double norm = diff.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("ula_angle: coincident points");
  return std::asin(std::clamp(diff.x() / norm, -1.0, 1.0));
}

CVector steering_vector_ula_cosine(int n, double cosine) {
  if (n < 1) throw std::invalid_argument("steering vector needs n >= 1");
  CVector v(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    const double phase = -kPi * k * cosine;
    v(k) = Complex(scale * std::cos(phase), scale * std::sin(phase));
  }
  return v;
}

CVector steering_vector_ula(int n, double angle) {
  return steering_vector_ula_cosine(n, std::sin(angle));
}

CVector steering_vector_upa(std::pair<int, int> dims, const SteeringSpec& spec) {
  const auto [rows, cols] = dims;
  const double cos_z = std::cos(spec.polar);
  const double cos_x = std::sin(spec.polar) * std::sin(spec.azimuth);
  const CVector along_z = steering_vector_ula_cosine(rows, cos_z);
  const CVector along_x = steering_vector_ula_cosine(cols, cos_x);
  CVector v(rows * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) v(i * cols + j) = along_z(i) * along_x(j);
  return v;
}

CMatrix near_field_los_ad(const GeometryLayout& geometry) {
  const auto rows = geometry.pair_dist.rows();
  const auto cols = geometry.pair_dist.cols();
  CMatrix los(rows, cols);
  const double wavenumber = 2.0 * kPi / geometry.wavelength_m;
  for (Eigen::Index n = 0; n < cols; ++n) {
    const double ref = geometry.ref_dist(n);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double phase = -wavenumber * (geometry.pair_dist(r, n) - ref);
      los(r, n) = Complex(std::cos(phase), std::sin(phase));
    }
  }
  return los;
}

CMatrix draw_rayleigh(int rows, int cols, RngStream& rng) {
  CMatrix h(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) h(r, c) = rng.complex_normal();
  return h;
}

CMatrix assemble_rician(const CMatrix& los, const CMatrix& nlos, double rician_factor,
                        double pathloss_linear) {
  if (los.rows() != nlos.rows() || los.cols() != nlos.cols())
    throw std::invalid_argument("assemble_rician: shape mismatch");
  if (rician_factor < 0.0) throw std::invalid_argument("assemble_rician: negative Rician factor");
  if (!(pathloss_linear > 0.0))
    throw std::invalid_argument("assemble_rician: pathloss must be positive");
  const double los_weight = std::sqrt(rician_factor / (1.0 + rician_factor));
  const double nlos_weight = std::sqrt(1.0 / (1.0 + rician_factor));
  const double scale = std::sqrt(pathloss_linear);
  return scale * (los_weight * los + nlos_weight * nlos);
}

ChannelSet draw_channel_set(const ScenarioConfig& config, const GeometryLayout& geometry,
                            RngStream& rng) {
  config.validate();
  ChannelSet channels;

  channels.l_ad = db_to_linear(-pathloss_db(PathlossKind::kLosLike, geometry.d_ad));
  channels.l_ai = db_to_linear(-pathloss_db(PathlossKind::kLosLike, geometry.d_ai));
  const int k_users = config.n_users;
  channels.l_iu.resize(k_users);
  channels.l_au.resize(k_users);
  channels.l_du.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    channels.l_iu(k) = db_to_linear(-pathloss_db(PathlossKind::kLosLike, geometry.d_iu(k)));
    channels.l_au(k) = db_to_linear(-pathloss_db(PathlossKind::kNlosLike, geometry.d_au(k)));
    channels.l_du(k) = db_to_linear(-pathloss_db(PathlossKind::kNlosLike, geometry.d_du(k)));
  }

  RngStream rng_ad = rng.fork(0);
  RngStream rng_ai = rng.fork(1);
  RngStream rng_iu = rng.fork(2);
  RngStream rng_au = rng.fork(3);
  RngStream rng_du = rng.fork(4);

  // AP-DIRS: near-field LOS mixed with Rayleigh.
  channels.h_ad = assemble_rician(near_field_los_ad(geometry),
                                  draw_rayleigh(config.n_dirs, config.n_antennas, rng_ad),
                                  config.rician_ad, channels.l_ad);

  // AP-IRS: rank-1 planar/linear array-response LOS mixed with Rayleigh.
  const SteeringSpec irs_to_ap = bearing_angles(config.irs_center, config.ap_center);
  const double ap_to_irs = ula_angle(config.ap_center, config.irs_center);
  const CVector alpha_irs = steering_vector_upa(planar_dims(config.n_irs), irs_to_ap);
  const CVector alpha_ap = steering_vector_ula(config.n_antennas, ap_to_irs);
  const double gain = std::sqrt(static_cast<double>(config.n_irs) *
                                static_cast<double>(config.n_antennas));
  const CMatrix los_ai = gain * (alpha_irs * alpha_ap.adjoint());
  channels.h_ai = assemble_rician(los_ai,
                                  draw_rayleigh(config.n_irs, config.n_antennas, rng_ai),
                                  config.rician_ai, channels.l_ai);

  // IRS-LU columns: per-user array-response LOS mixed with Rayleigh.
  channels.h_iu.resize(config.n_irs, k_users);
  const CMatrix nlos_iu = draw_rayleigh(config.n_irs, k_users, rng_iu);
  for (int k = 0; k < k_users; ++k) {
    const SteeringSpec spec =
        bearing_angles(config.irs_center, geometry.user_positions.col(k));
    const CVector los = std::sqrt(static_cast<double>(config.n_irs)) *
                        steering_vector_upa(planar_dims(config.n_irs), spec);
    channels.h_iu.col(k) =
        assemble_rician(los, nlos_iu.col(k), config.rician_iu, channels.l_iu(k));
  }

  // AP-LU and DIRS-LU: pure Rayleigh with per-user pathloss.
  channels.h_au = draw_rayleigh(config.n_antennas, k_users, rng_au);
  channels.h_du = draw_rayleigh(config.n_dirs, k_users, rng_du);
  for (int k = 0; k < k_users; ++k) {
    channels.h_au.col(k) *= std::sqrt(channels.l_au(k));
    channels.h_du.col(k) *= std::sqrt(channels.l_du(k));
  }
  return channels;
}

// ---------------------------------------------------------------------------
// Binary channel dump
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'I', 'R', 'S', 'J', 'C', 'H', 'N', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_matrix(std::ostream& out, const CMatrix& m) {
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = m(r, c).real();
      const double im = m(r, c).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
}

CMatrix read_matrix(std::istream& in) {
  const std::uint32_t rows = read_u32(in);
  const std::uint32_t cols = read_u32(in);
  CMatrix m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      double re = 0.0;
      double im = 0.0;
      in.read(reinterpret_cast<char*>(&re), sizeof(re));
      in.read(reinterpret_cast<char*>(&im), sizeof(im));
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

void write_real_vector(std::ostream& out, const RVector& v) {
  write_u32(out, static_cast<std::uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double value = v(i);
    out.write(reinterpret_cast<const char*>(&value), sizeof(value));
  }
}

RVector read_real_vector(std::istream& in) {
  const std::uint32_t n = read_u32(in);
  RVector v(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    double value = 0.0;
    in.read(reinterpret_cast<char*>(&value), sizeof(value));
    v(i) = value;
  }
  return v;
}

}  // namespace

void write_channel_set(const ChannelSet& channels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_channel_set: cannot open '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  write_matrix(out, channels.h_ai);
  write_matrix(out, channels.h_iu);
  write_matrix(out, channels.h_au);
  write_matrix(out, channels.h_ad);
  write_matrix(out, channels.h_du);
  const double l_ai = channels.l_ai;
  const double l_ad = channels.l_ad;
  out.write(reinterpret_cast<const char*>(&l_ai), sizeof(l_ai));
  out.write(reinterpret_cast<const char*>(&l_ad), sizeof(l_ad));
  write_real_vector(out, channels.l_iu);
  write_real_vector(out, channels.l_au);
  write_real_vector(out, channels.l_du);
  if (!out) throw std::runtime_error("write_channel_set: write failed for '" + path + "'");
}

ChannelSet read_channel_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_channel_set: cannot open '" + path + "'");
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_channel_set: bad magic in '" + path + "'");
  ChannelSet channels;
  channels.h_ai = read_matrix(in);
  channels.h_iu = read_matrix(in);
  channels.h_au = read_matrix(in);
  channels.h_ad = read_matrix(in);
  channels.h_du = read_matrix(in);
  in.read(reinterpret_cast<char*>(&channels.l_ai), sizeof(channels.l_ai));
  in.read(reinterpret_cast<char*>(&channels.l_ad), sizeof(channels.l_ad));
  channels.l_iu = read_real_vector(in);
  channels.l_au = read_real_vector(in);
  channels.l_du = read_real_vector(in);
  if (!in) throw std::runtime_error("read_channel_set: truncated file '" + path + "'");
  return channels;
}

}  // namespace irsjam
