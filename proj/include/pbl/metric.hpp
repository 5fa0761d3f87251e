#pragma once

// Linear algebra of the pseudo-Euclidean space E^{k,l}: the indefinite
// scalar product, direction types, hyperplane reflection and the pseudo
// vector product of E^{2,1}.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "pbl/error.hpp"

namespace pbl {

using Vector = Eigen::VectorXd;

/// Default relative threshold below which |<v,v>| / |v|^2 counts as zero.
inline constexpr double kLightLikeTol = 1e-10;

class Signature {
 public:
  Signature(int k, int l) : k_(k), l_(l) {
    if (k < 1 || l < 1)
      throw Error(ErrorCode::InvalidArgument,
                  "signature needs k >= 1 and l >= 1, got (" + std::to_string(k) + "," +
                      std::to_string(l) + ")");
  }

  int k() const { return k_; }
  int l() const { return l_; }
  int dim() const { return k_ + l_; }

  /// +1 on the first k axes, -1 on the last l.
  double eps(int i) const { return i < k_ ? 1.0 : -1.0; }

  bool operator==(const Signature&) const = default;

 private:
  int k_;
  int l_;
};

enum class LineType { SpaceLike, TimeLike, LightLike };

inline const char* to_string(LineType t) {
  switch (t) {
    case LineType::SpaceLike: return "space-like";
    case LineType::TimeLike: return "time-like";
    case LineType::LightLike: return "light-like";
  }
  return "?";
}

/// Pseudo-Euclidean distance: either a real value or i times a real value.
struct MDistance {
  double magnitude = 0.0;
  bool imaginary = false;
};

namespace detail {

inline void require_dim(const Vector& x, const Signature& sig, const char* what) {
  if (x.size() != sig.dim())
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " has length " + std::to_string(x.size()) +
                    ", signature dimension is " + std::to_string(sig.dim()));
}

}  // namespace detail

inline double dot(const Vector& x, const Vector& y, const Signature& sig) {
  detail::require_dim(x, sig, "x");
  detail::require_dim(y, sig, "y");
  const int k = sig.k();
  return x.head(k).dot(y.head(k)) - x.tail(sig.l()).dot(y.tail(sig.l()));
}

/// E_{k,l} w: flips the sign of the last l components.
inline Vector apply_metric(const Vector& w, const Signature& sig) {
  detail::require_dim(w, sig, "w");
  Vector r = w;
  r.tail(sig.l()) *= -1.0;
  return r;
}

/// Pseudo-normal of the hyperplane {y : w . y = 0}, w its Euclidean normal.
inline Vector pseudo_normal(const Vector& w, const Signature& sig) { return apply_metric(w, sig); }

inline LineType line_type(const Vector& v, const Signature& sig, double tol = kLightLikeTol) {
  const double n2 = v.squaredNorm();
  if (n2 == 0.0) throw Error(ErrorCode::ZeroVector, "direction vector is zero");
  const double s = dot(v, v, sig);
  if (s > tol * n2) return LineType::SpaceLike;
  if (s < -tol * n2) return LineType::TimeLike;
  return LineType::LightLike;
}

/// Billiard reflection of v in the hyperplane with pseudo-normal n:
/// v = a + n_a  ->  v' = a - n_a.
inline Vector reflect_direction(const Vector& v, const Vector& n, const Signature& sig,
                                double tol = kLightLikeTol) {
  const double nn = dot(n, n, sig);
  if (std::abs(nn) <= tol * n.squaredNorm())
    throw Error(ErrorCode::LightLikeNormal, "normal is light-like, reflection undefined");
  return v - (2.0 * dot(v, n, sig) / nn) * n;
}

/// x ^ y = E_{2,1}(x × y); orthogonal to both x and y in E^{2,1}.
inline Vector pseudo_cross(const Vector& x, const Vector& y) {
  if (x.size() != 3 || y.size() != 3)
    throw Error(ErrorCode::WrongDimension, "pseudo vector product is defined for d = 3 only");
  Vector r(3);
  r << x(1) * y(2) - x(2) * y(1), x(2) * y(0) - x(0) * y(2), -(x(0) * y(1) - x(1) * y(0));
  return r;
}

inline MDistance mdistance(const Vector& x, const Vector& y, const Signature& sig) {
  detail::require_dim(x, sig, "x");
  detail::require_dim(y, sig, "y");
  const Vector d = x - y;
  const double s = dot(d, d, sig);
  if (s >= 0.0) return {std::sqrt(s), false};
  return {std::sqrt(-s), true};
}

}  // namespace pbl
