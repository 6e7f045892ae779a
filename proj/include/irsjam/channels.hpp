// SPDX-License-Identifier: Apache-2.0
#ifndef IRSJAM_CHANNELS_HPP
#define IRSJAM_CHANNELS_HPP

#include "irsjam/rng.hpp"
#include "irsjam/scenario.hpp"
#include "irsjam/types.hpp"

#include <string>
#include <utility>

namespace irsjam {

// One coherence-interval realization of the five channel matrices plus the
// large-scale gains (linear) they were scaled with. Small-scale parts are
// unit power: E[|entry|^2] of each channel equals its large-scale gain.
struct ChannelSet {
  CMatrix h_ai;  // N_I x N_A, AP -> IRS
  CMatrix h_iu;  // N_I x K, columns h_IU,k
  CMatrix h_au;  // N_A x K, columns h_AU,k
  CMatrix h_ad;  // N_D x N_A, AP -> DIRS
  CMatrix h_du;  // N_D x K, columns h_DU,k

  double l_ai = 1.0;
  double l_ad = 1.0;
  RVector l_iu;  // K
  RVector l_au;  // K
  RVector l_du;  // K
};

// Direction of a planar-array steering vector: azimuth is measured from the
// +y broadside axis toward +x, polar from the +z axis. The x/z direction
// cosines used by the array are sin(polar)*sin(azimuth) and cos(polar).
struct SteeringSpec {
  double azimuth = 0.0;  // radians, in [-pi, pi]
  double polar = 0.0;    // radians, in [0, pi]
};

// Angles of the unit bearing vector from `from` toward `to`.
SteeringSpec bearing_angles(const Vec3& from, const Vec3& to);
// Departure/arrival angle seen by the x-axis ULA at `from` toward `to`.
double ula_angle(const Vec3& from, const Vec3& to);

// Unit-norm half-wavelength array responses. The ULA entry k is
// exp(-j*pi*k*sin(angle))/sqrt(n); the UPA is the Kronecker composition of
// two such factors over the (z, x) direction cosines, matching the planar
// element ordering of GeometryLayout.
CVector steering_vector_ula(int n, double angle);
CVector steering_vector_ula_cosine(int n, double cosine);
CVector steering_vector_upa(std::pair<int, int> dims, const SteeringSpec& spec);

// Near-field LOS response of the AP-DIRS link: entry (r, n) is
// exp(-j*2*pi/lambda*(D_n^r - D_n)); every entry has unit modulus.
CMatrix near_field_los_ad(const GeometryLayout& geometry);

// i.i.d. CN(0,1) entries, filled in column-major order.
CMatrix draw_rayleigh(int rows, int cols, RngStream& rng);

// sqrt(L) * ( sqrt(e/(1+e)) * los + sqrt(1/(1+e)) * nlos ).
CMatrix assemble_rician(const CMatrix& los, const CMatrix& nlos, double rician_factor,
                        double pathloss_linear);

ChannelSet draw_channel_set(const ScenarioConfig& config, const GeometryLayout& geometry,
                            RngStream& rng);

// Binary channel container for cross-implementation regression; layout is
// documented in the README (little-endian, dimension header, row-major
// interleaved re/im doubles).
void write_channel_set(const ChannelSet& channels, const std::string& path);
ChannelSet read_channel_set(const std::string& path);

}  // namespace irsjam

#endif  // IRSJAM_CHANNELS_HPP
