// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "irsjam/channels.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

using namespace irsjam;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig config = ScenarioConfig::desk_defaults();
  config.n_antennas = 4;
  config.n_irs = 8;
  config.n_dirs = 16;
  config.n_users = 2;
  return config;
}

}  // namespace

TEST_CASE("near-field response phases") {
  ScenarioConfig config = ScenarioConfig::paper_defaults();
  RngStream rng(1);
  const GeometryLayout geometry = build_geometry(config, rng);
  const CMatrix los = near_field_los_ad(geometry);

  // Every entry is unit modulus by construction.
  for (int n = 0; n < 4; ++n)
    for (int r = 0; r < 8; ++r) CHECK(std::abs(los(r * 97 % los.rows(), n)) == doctest::Approx(1.0).epsilon(1e-15));

  // Independent recomputation of entry (0,0) from first principles: antenna 0
  // of the 32-element ULA and element (0,0) of the 64x32 aperture.
  const double d = config.element_spacing_m;
  const Vec3 antenna(2.0 + d * (0 - 31.0 / 2.0), 0.0, 5.0);
  const Vec3 element(2.0 + d * (0 - 31.0 / 2.0), 0.0, 2.0 + d * (0 - 63.0 / 2.0));
  const double pair = (antenna - element).norm();
  const double ref = (antenna - config.dirs_center).norm();
  const double phase = -2.0 * kPi / config.carrier_wavelength_m * (pair - ref);
  CHECK(los(0, 0).real() == doctest::Approx(std::cos(phase)).epsilon(1e-12));
  CHECK(los(0, 0).imag() == doctest::Approx(std::sin(phase)).epsilon(1e-12));
  // Frozen value from an independent calculator pass.
  CHECK(los(0, 0).real() == doctest::Approx(0.5727421847694819).epsilon(1e-9));
  CHECK(los(0, 0).imag() == doctest::Approx(-0.819735560888681).epsilon(1e-9));
}

TEST_CASE("near-field limit cases") {
  // Equal pair and reference distance: zero phase. Half wavelength extra: -1.
  GeometryLayout geometry;
  geometry.wavelength_m = 0.06;
  geometry.pair_dist.resize(2, 1);
  geometry.ref_dist.resize(1);
  geometry.pair_dist(0, 0) = 5.0;
  geometry.pair_dist(1, 0) = 5.0 + 0.03;
  geometry.ref_dist(0) = 5.0;
  const CMatrix los = near_field_los_ad(geometry);
  CHECK(los(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(los(0, 0).imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(los(1, 0).real() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("ULA steering vector") {
  const CVector broadside = steering_vector_ula(5, 0.0);
  for (int k = 0; k < 5; ++k)
    CHECK(broadside(k) == std::complex<double>(1.0 / std::sqrt(5.0), 0.0));
  CHECK(broadside.norm() == doctest::Approx(1.0).epsilon(1e-14));

  const CVector endfire = steering_vector_ula(2, kPi / 2);
  CHECK(endfire(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(endfire(1).real() == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(endfire(1).imag()) < 1e-12);
}

TEST_CASE("UPA steering vector is unit norm with unit-magnitude entries") {
  SteeringSpec spec{0.7, 1.1};
  const CVector v = steering_vector_upa({4, 3}, spec);
  CHECK(v.size() == 12);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i < v.size(); ++i)
    CHECK(std::abs(v(i)) == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-12));
}

TEST_CASE("LOS outer product is rank one") {
  ScenarioConfig config = small_config();
  config.rician_ai = 1e12;
  RngStream rng(2);
  const GeometryLayout geometry = build_geometry(config, rng);
  RngStream rng2(3);
  const ChannelSet channels = draw_channel_set(config, geometry, rng2);
  const Eigen::JacobiSVD<CMatrix> svd(channels.h_ai);
  CHECK(svd.singularValues()(1) / svd.singularValues()(0) < 1e-5);
}

TEST_CASE("rayleigh draw moments") {
  RngStream rng(4);
  const CMatrix h = draw_rayleigh(1000, 1000, rng);
  const double n = static_cast<double>(h.size());
  CHECK(h.cwiseAbs2().sum() / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(h.sum()) / n < 0.005);
  // real/imag independence via sample correlation
  double cross = 0.0;
  for (int c = 0; c < h.cols(); ++c)
    for (int r = 0; r < h.rows(); ++r) cross += h(r, c).real() * h(r, c).imag();
  CHECK(std::abs(cross / n) / 0.5 < 0.01);
}

TEST_CASE("rician assembly") {
  RngStream rng(5);
  const CMatrix los = CMatrix::Constant(40, 40, Complex(1.0, 0.0));
  const CMatrix nlos = draw_rayleigh(40, 40, rng);

  // Rician factor zero degenerates to scaled Rayleigh.
  const CMatrix pure = assemble_rician(los, nlos, 0.0, 0.25);
  CHECK((pure - 0.5 * nlos).cwiseAbs().maxCoeff() < 1e-15);

  // Huge factor recovers the LOS part.
  const CMatrix locked = assemble_rician(los, nlos, 1e12, 4.0);
  CHECK((locked - 2.0 * los).cwiseAbs().maxCoeff() / 2.0 < 1e-5);

  CHECK_THROWS_AS(assemble_rician(los, nlos.topRows(3), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("rician mixing keeps unit small-scale power") {
  RngStream rng(6);
  for (double factor : {0.0, 1.0, 3.0, 10.0, 1e12}) {
    RngStream phases = rng.fork(static_cast<std::uint64_t>(factor));
    CMatrix los(500, 500);
    for (int c = 0; c < 500; ++c)
      for (int r = 0; r < 500; ++r) {
        const double phi = 2.0 * kPi * phases.uniform();
        los(r, c) = Complex(std::cos(phi), std::sin(phi));
      }
    RngStream fades = rng.fork(1000 + static_cast<std::uint64_t>(factor));
    const CMatrix mixed = assemble_rician(los, draw_rayleigh(500, 500, fades), factor, 1.0);
    CHECK(mixed.cwiseAbs2().sum() / mixed.size() == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("channel set dimensions, finiteness and determinism") {
  const ScenarioConfig config = small_config();
  RngStream rng(7);
  const GeometryLayout geometry = build_geometry(config, rng);
  RngStream draw_a(8);
  RngStream draw_b(8);
  const ChannelSet a = draw_channel_set(config, geometry, draw_a);
  const ChannelSet b = draw_channel_set(config, geometry, draw_b);

  CHECK(a.h_ai.rows() == config.n_irs);
  CHECK(a.h_ai.cols() == config.n_antennas);
  CHECK(a.h_iu.rows() == config.n_irs);
  CHECK(a.h_iu.cols() == config.n_users);
  CHECK(a.h_au.rows() == config.n_antennas);
  CHECK(a.h_ad.rows() == config.n_dirs);
  CHECK(a.h_du.rows() == config.n_dirs);
  CHECK(a.h_ai.allFinite());
  CHECK(a.h_iu.allFinite());
  CHECK(a.h_au.allFinite());
  CHECK(a.h_ad.allFinite());
  CHECK(a.h_du.allFinite());
  CHECK((a.h_ad - b.h_ad).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.h_iu - b.h_iu).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("power bookkeeping: every channel matches its large-scale gain") {
  ScenarioConfig config = small_config();
  config.n_dirs = 8;
  config.n_irs = 4;
  RngStream rng(9);
  const GeometryLayout geometry = build_geometry(config, rng);
  double power_ad = 0.0, power_ai = 0.0, power_au = 0.0, power_du = 0.0, power_iu = 0.0;
  double l_au = 0.0, l_du = 0.0, l_iu = 0.0;
  const int draws = 20000;
  RngStream stream(10);
  ChannelSet last;
  for (int i = 0; i < draws; ++i) {
    RngStream draw = stream.fork(i);
    last = draw_channel_set(config, geometry, draw);
    power_ad += last.h_ad.cwiseAbs2().mean();
    power_ai += last.h_ai.cwiseAbs2().mean();
    power_au += last.h_au.col(0).cwiseAbs2().mean();
    power_du += last.h_du.col(0).cwiseAbs2().mean();
    power_iu += last.h_iu.col(0).cwiseAbs2().mean();
  }
  l_au = last.l_au(0);
  l_du = last.l_du(0);
  l_iu = last.l_iu(0);
  CHECK(power_ad / draws == doctest::Approx(last.l_ad).epsilon(0.02));
  CHECK(power_ai / draws == doctest::Approx(last.l_ai).epsilon(0.02));
  CHECK(power_au / draws == doctest::Approx(l_au).epsilon(0.02));
  CHECK(power_du / draws == doctest::Approx(l_du).epsilon(0.02));
  CHECK(power_iu / draws == doctest::Approx(l_iu).epsilon(0.02));
}

TEST_CASE("direct channel energy at one meter") {
  // nlos-like pathloss at 1 m is 32.6 dB, so E||h_AU||^2 = N_A * 10^-3.26.
  ScenarioConfig config = small_config();
  config.n_users = 1;
  config.user_region_center = config.ap_center + Vec3(0.0, 1.0, 0.0);
  config.user_region_radius_m = 1e-9;
  RngStream rng(11);
  const GeometryLayout geometry = build_geometry(config, rng);
  double energy = 0.0;
  const int draws = 10000;
  RngStream stream(12);
  for (int i = 0; i < draws; ++i) {
    RngStream draw = stream.fork(i);
    energy += draw_channel_set(config, geometry, draw).h_au.col(0).squaredNorm();
  }
  const double expected = config.n_antennas * std::pow(10.0, -3.26);
  CHECK(energy / draws == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("channel dump round-trip") {
  const ScenarioConfig config = small_config();
  RngStream rng(13);
  const GeometryLayout geometry = build_geometry(config, rng);
  RngStream draw(14);
  const ChannelSet original = draw_channel_set(config, geometry, draw);

  const std::string path =
      (std::filesystem::temp_directory_path() / "irsjam_channels_test.bin").string();
  write_channel_set(original, path);
  const ChannelSet loaded = read_channel_set(path);
  std::filesystem::remove(path);

  CHECK((original.h_ai - loaded.h_ai).cwiseAbs().maxCoeff() == 0.0);
  CHECK((original.h_iu - loaded.h_iu).cwiseAbs().maxCoeff() == 0.0);
  CHECK((original.h_au - loaded.h_au).cwiseAbs().maxCoeff() == 0.0);
  CHECK((original.h_ad - loaded.h_ad).cwiseAbs().maxCoeff() == 0.0);
  CHECK((original.h_du - loaded.h_du).cwiseAbs().maxCoeff() == 0.0);
  CHECK(original.l_ad == loaded.l_ad);
  CHECK((original.l_du - loaded.l_du).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(read_channel_set("/nonexistent/irsjam.bin"), std::runtime_error);
}
