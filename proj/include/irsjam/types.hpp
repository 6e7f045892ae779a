// SPDX-License-Identifier: Apache-2.0
#ifndef IRSJAM_TYPES_HPP
#define IRSJAM_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace irsjam {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline constexpr const char* kVersion = "irsjam 0.1.0";

// dB / dBm conversions happen at the configuration boundary; all internal
// math runs in linear scale (watts).
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

}  // namespace irsjam

#endif  // IRSJAM_TYPES_HPP
