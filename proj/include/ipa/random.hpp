#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace ipa {

// Seedable source of variates that is bit-reproducible across platforms.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions are implemented here rather than taken from
// <random>, whose distribution algorithms are implementation-defined:
//   uniform  u = (x >> 11) * 2^-53                        in [0, 1)
//   normal   Box-Muller, z = sqrt(-2 ln(1 - u1)) cos(2 pi u2)
// Only the cosine branch is used, so every normal costs two engine draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  // Uniform integer in [0, n) by rejection, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

  // k distinct indices drawn uniformly from [0, n), returned sorted.
  std::vector<Eigen::Index> subset(Eigen::Index n, Eigen::Index k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ipa
