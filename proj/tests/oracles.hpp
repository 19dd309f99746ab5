#pragma once

// Test-only reference computations. Everything here is deliberately built on
// LAPACK and plain loops rather than on the library's own Eigen code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <lapacke.h>

#include <Eigen/Core>

#include "ipa/random.hpp"

namespace oracle {

using Eigen::Index;

// Ascending eigenvalues of a symmetric matrix via LAPACK dsyev.
inline std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<double> buf(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) buf[static_cast<std::size_t>(i * a.cols() + j)] = a(i, j);
  std::vector<double> w(static_cast<std::size_t>(n));
  if (LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', n, buf.data(), n, w.data()) != 0)
    throw std::runtime_error("dsyev failed");
  return w;
}

struct Svd {
  Eigen::MatrixXd u;
  std::vector<double> s;
  Eigen::MatrixXd vt;
};

// Full SVD via LAPACK dgesvd.
inline Svd svd(const Eigen::MatrixXd& a) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  std::vector<double> buf(static_cast<std::size_t>(m * n));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) buf[static_cast<std::size_t>(i * n + j)] = a(i, j);
  std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
  std::vector<double> u(static_cast<std::size_t>(m * m));
  std::vector<double> vt(static_cast<std::size_t>(n * n));
  std::vector<double> superb(static_cast<std::size_t>(std::max(1, std::min(m, n) - 1)));
  if (LAPACKE_dgesvd(LAPACK_ROW_MAJOR, 'A', 'A', m, n, buf.data(), n, s.data(), u.data(), m,
                     vt.data(), n, superb.data()) != 0)
    throw std::runtime_error("dgesvd failed");
  Svd out{Eigen::MatrixXd(m, m), s, Eigen::MatrixXd(n, n)};
  for (lapack_int i = 0; i < m; ++i)
    for (lapack_int j = 0; j < m; ++j) out.u(i, j) = u[static_cast<std::size_t>(i * m + j)];
  for (lapack_int i = 0; i < n; ++i)
    for (lapack_int j = 0; j < n; ++j) out.vt(i, j) = vt[static_cast<std::size_t>(i * n + j)];
  return out;
}

// Best rank-r approximation (Eckart-Young) from the LAPACK SVD.
inline Eigen::MatrixXd best_rank_r(const Eigen::MatrixXd& a, Index r) {
  const Svd d = svd(a);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Index k = 0; k < r; ++k)
    out += d.s[static_cast<std::size_t>(k)] * d.u.col(k) * d.vt.row(k);
  return out;
}

// Recursive enumeration of k-subsets of [0, n).
inline void subsets(Index n, Index k, const std::function<void(const std::vector<Index>&)>& visit) {
  std::vector<Index> cur;
  std::function<void(Index)> rec = [&](Index start) {
    if (static_cast<Index>(cur.size()) == k) {
      visit(cur);
      return;
    }
    for (Index i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

inline std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

struct Constants {
  double alpha;
  double beta;
  std::size_t count;
};

// Extreme Gram eigenvalues over all column supports of size `width`.
inline Constants sparse_constants(const Eigen::MatrixXd& t, Index width) {
  Constants c{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
  subsets(t.cols(), width, [&](const std::vector<Index>& s) {
    Eigen::MatrixXd cols(t.rows(), width);
    for (Index j = 0; j < width; ++j) cols.col(j) = t.col(s[static_cast<std::size_t>(j)]);
    const auto ev = symmetric_eigenvalues(cols.transpose() * cols);
    c.alpha = std::min(c.alpha, ev.front());
    c.beta = std::max(c.beta, ev.back());
    ++c.count;
  });
  return c;
}

// Smallest ||v - w||^2 over K-sparse w: for each support the best w keeps v
// on the support, so the distance is the energy off the support.
inline double best_ksparse_distance_sq(const Eigen::VectorXd& v, Index k) {
  double best = std::numeric_limits<double>::infinity();
  subsets(v.size(), k, [&](const std::vector<Index>& s) {
    double off = 0.0;
    for (Index i = 0; i < v.size(); ++i)
      if (std::find(s.begin(), s.end(), i) == s.end()) off += v[i] * v[i];
    best = std::min(best, off);
  });
  return best;
}

// Gaussian M x N matrix from the library's documented generator, optionally
// column-normalised.
inline Eigen::MatrixXd seeded_gaussian(Index m, Index n, std::uint64_t seed, bool normalise) {
  ipa::Rng rng(seed);
  Eigen::MatrixXd t = rng.normal_matrix(m, n);
  if (normalise)
    for (Index j = 0; j < n; ++j) t.col(j) /= t.col(j).norm();
  return t;
}

// Random N x d matrix with orthonormal columns (Gram-Schmidt on Gaussians).
inline Eigen::MatrixXd random_orthonormal(Index n, Index d, ipa::Rng& rng) {
  Eigen::MatrixXd q(n, d);
  for (Index j = 0; j < d; ++j) {
    Eigen::VectorXd v = rng.normal_vector(n);
    for (int pass = 0; pass < 2; ++pass)
      for (Index i = 0; i < j; ++i) v -= q.col(i).dot(v) * q.col(i);
    q.col(j) = v / v.norm();
  }
  return q;
}

}  // namespace oracle
