// SPDX-License-Identifier: Apache-2.0
#ifndef IRSJAM_RNG_HPP
#define IRSJAM_RNG_HPP

#include <complex>
#include <cstdint>

namespace irsjam {

// Deterministic, splittable random stream (xoshiro256** core seeded through
// splitmix64). fork(id) derives a child stream from the parent's key and the
// id only, never from how much the parent has already consumed, so per-trial
// substreams reproduce bit-identically under any scheduling or worker count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream fork(std::uint64_t id) const;

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Uniform integer on [0, bound); bound must be nonzero.
  std::uint64_t uniform_int(std::uint64_t bound);
  // Standard normal via Box-Muller (second value of each pair is cached).
  double normal();
  // Circularly-symmetric CN(0,1): real/imag parts independent N(0, 1/2).
  std::complex<double> complex_normal();

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t state_[4] = {};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace irsjam

#endif  // IRSJAM_RNG_HPP
