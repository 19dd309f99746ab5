#pragma once

#include <cmath>
#include <initializer_list>

#include <Eigen/Core>

#include "ipa/errors.hpp"

namespace ipa {

using Index = Eigen::Index;

// Element of a finite-dimensional real Hilbert space. The tag keeps domain
// (signal) and codomain (measurement) elements from being mixed up.
// Length is positive and every entry is finite; both are checked on
// construction and the value is immutable afterwards.
template <class Tag>
class HilbertVector {
 public:
  explicit HilbertVector(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() <= 0) throw InputError("vector must have positive length");
    if (!values_.allFinite()) throw InputError("vector entries must be finite");
  }

  HilbertVector(std::initializer_list<double> entries)
      : HilbertVector(from_list(entries)) {}

  static HilbertVector zeros(Index n) { return HilbertVector(Eigen::VectorXd::Zero(n)); }

  Index size() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](Index i) const { return values_[i]; }
  double norm() const { return values_.norm(); }
  double squared_norm() const { return values_.squaredNorm(); }

  friend bool operator==(const HilbertVector& a, const HilbertVector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  static Eigen::VectorXd from_list(std::initializer_list<double> entries) {
    Eigen::VectorXd v(static_cast<Index>(entries.size()));
    Index i = 0;
    for (double x : entries) v[i++] = x;
    return v;
  }

  Eigen::VectorXd values_;
};

struct SignalTag;
struct MeasurementTag;

/// Element f of the domain H = R^N.
using SignalVector = HilbertVector<SignalTag>;
/// Element g of the codomain L = R^M.
using MeasurementVector = HilbertVector<MeasurementTag>;

template <class Tag>
double inner(const HilbertVector<Tag>& a, const HilbertVector<Tag>& b) {
  if (a.size() != b.size()) throw InputError("inner product of vectors with different lengths");
  return a.values().dot(b.values());
}

template <class Tag>
double distance(const HilbertVector<Tag>& a, const HilbertVector<Tag>& b) {
  if (a.size() != b.size()) throw InputError("distance between vectors with different lengths");
  return (a.values() - b.values()).norm();
}

}  // namespace ipa
