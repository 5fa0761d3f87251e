#pragma once

// Relativistic types of quadrics, decorated Jacobi coordinates, the planar
// relativistic conics with their focal property, and the tropic surfaces
// (the two ruled surfaces through the tropic curves of a 3D family).

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pbl/confocal.hpp"

namespace pbl {

// ---------------------------------------------------------------------------
// Relativistic types

struct RelType {
  enum class Kind { E, H, Zero };
  Kind kind = Kind::E;
  int index = 0;  // i in H^i / 0^i; 0 for E

  bool operator==(const RelType&) const = default;

  static RelType E() { return {Kind::E, 0}; }
  static RelType H(int i) { return {Kind::H, i}; }
  static RelType Zero(int i) { return {Kind::Zero, i}; }
};

inline std::string to_string(const RelType& t) {
  switch (t.kind) {
    case RelType::Kind::E: return "E";
    case RelType::Kind::H: return "H^" + std::to_string(t.index);
    case RelType::Kind::Zero: return "0^" + std::to_string(t.index);
  }
  return "?";
}

/// Type of the quadric Q_{lambda0} at x, read off from where lambda0 sits
/// among the generalized Jacobi coordinates of x. For a complex pair the
/// index may be anywhere in 0..d-2.
inline RelType relativistic_type(const ConfocalFamily& fam, const Vector& x, double lambda0) {
  const GeneralizedJacobi J = jacobi_coordinates(fam, x);
  const double tie = kMultiplicityTol * fam.scale();
  if (J.real.empty())
    throw Error(ErrorCode::InvalidArgument, "point has no real Jacobi coordinate");

  std::size_t best = 0;
  for (std::size_t i = 1; i < J.real.size(); ++i)
    if (std::abs(J.real[i] - lambda0) < std::abs(J.real[best] - lambda0)) best = i;
  if (std::abs(J.real[best] - lambda0) > 1e-7 * fam.scale())
    throw Error(ErrorCode::InvalidArgument,
                "lambda0 = " + std::to_string(lambda0) + " is not a Jacobi coordinate of x");

  const double l0 = J.real[best];
  int below = 0;
  for (std::size_t i = 0; i < J.real.size(); ++i) {
    if (i == best) continue;
    if (std::abs(J.real[i] - l0) <= tie)
      throw Error(ErrorCode::MultipleRoot, "lambda0 is a repeated Jacobi coordinate");
    if (J.real[i] < l0) ++below;
  }
  if (J.complex_pair) return RelType::Zero(below);
  return below == 0 ? RelType::E() : RelType::H(below);
}

using DecoratedJacobi = std::vector<std::pair<RelType, double>>;

inline DecoratedJacobi decorated_coordinates(const ConfocalFamily& fam, const Vector& x) {
  const GeneralizedJacobi J = jacobi_coordinates(fam, x);
  if (!J.all_real())
    throw Error(ErrorCode::NotDecoratable, "Jacobi coordinates include a complex pair");
  if (J.has_repeated(kMultiplicityTol * fam.scale()))
    throw Error(ErrorCode::NotDecoratable, "Jacobi coordinates have a multiple root");
  DecoratedJacobi out;
  for (std::size_t i = 0; i < J.real.size(); ++i)
    out.emplace_back(i == 0 ? RelType::E() : RelType::H(static_cast<int>(i)), J.real[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Three-dimensional family in E^{2,1}: x^2/(a-l) + y^2/(b-l) + z^2/(c+l) = 1

enum class GeomType3 { OneSheetZ, Ellipsoid, OneSheetY, TwoSheet, DegeneratePlane };

inline const char* to_string(GeomType3 g) {
  switch (g) {
    case GeomType3::OneSheetZ: return "one-sheeted hyperboloid (z-axis)";
    case GeomType3::Ellipsoid: return "ellipsoid";
    case GeomType3::OneSheetY: return "one-sheeted hyperboloid (y-axis)";
    case GeomType3::TwoSheet: return "two-sheeted hyperboloid";
    case GeomType3::DegeneratePlane: return "degenerate plane";
  }
  return "?";
}

namespace detail {

inline void require_space_21(const ConfocalFamily& fam) {
  if (fam.dim() != 3)
    throw Error(ErrorCode::WrongDimension, "needs a three-dimensional family");
  if (!(fam.signature() == Signature(2, 1)))
    throw Error(ErrorCode::InvalidArgument, "needs signature (2,1)");
}

}  // namespace detail

inline GeomType3 geometric_type_3d(const ConfocalFamily& fam, double lambda) {
  detail::require_space_21(fam);
  const double a = fam.a(0), b = fam.a(1), c = fam.a(2);
  if (fam.is_degenerate(lambda)) return GeomType3::DegeneratePlane;
  if (lambda < -c) return GeomType3::OneSheetZ;
  if (lambda < b) return GeomType3::Ellipsoid;
  if (lambda < a) return GeomType3::OneSheetY;
  return GeomType3::TwoSheet;
}

enum class Sheet { Plus, Minus };

inline double sheet_sign(Sheet s) { return s == Sheet::Plus ? 1.0 : -1.0; }

/// Position and analytic partial derivatives of the tropic parametrization
/// r(lambda, t) on one sheet.
struct TropicPartials {
  Vector r, r_l, r_t, r_ll, r_lt, r_tt;
};

inline TropicPartials tropic_partials(const ConfocalFamily& fam, double lambda, double t, Sheet sheet) {
  detail::require_space_21(fam);
  const double a = fam.a(0), b = fam.a(1), c = fam.a(2);
  const double s = sheet_sign(sheet);
  const double ra = std::sqrt(a + c), rb = std::sqrt(b + c);
  const double ct = std::cos(t), st = std::sin(t);

  // S(t) = sqrt(cos^2 t/(a+c) + sin^2 t/(b+c)) and its t-derivatives
  const double delta = 1.0 / (b + c) - 1.0 / (a + c);
  const double g = ct * ct / (a + c) + st * st / (b + c);
  const double g1 = 2.0 * st * ct * delta;
  const double g2 = 2.0 * std::cos(2.0 * t) * delta;
  const double S = std::sqrt(g);
  const double S1 = g1 / (2.0 * S);
  const double S2 = g2 / (2.0 * S) - g1 * g1 / (4.0 * S * S * S);

  TropicPartials p;
  p.r = Vector(3);
  p.r << (a - lambda) * ct / ra, (b - lambda) * st / rb, s * (c + lambda) * S;
  p.r_l = Vector(3);
  p.r_l << -ct / ra, -st / rb, s * S;
  p.r_t = Vector(3);
  p.r_t << -(a - lambda) * st / ra, (b - lambda) * ct / rb, s * (c + lambda) * S1;
  p.r_ll = Vector::Zero(3);
  p.r_lt = Vector(3);
  p.r_lt << st / ra, -ct / rb, s * S1;
  p.r_tt = Vector(3);
  p.r_tt << -(a - lambda) * ct / ra, -(b - lambda) * st / rb, s * (c + lambda) * S2;
  return p;
}

inline Vector tropic_point(const ConfocalFamily& fam, double lambda, double t, Sheet sheet) {
  return tropic_partials(fam, lambda, t, sheet).r;
}

/// x^2/(a-l)^2 + y^2/(b-l)^2 - z^2/(c+l)^2
inline double tropic_cone_residual(const ConfocalFamily& fam, double lambda, const Vector& x) {
  detail::require_space_21(fam);
  detail::require_family_dim(fam, x, "x");
  if (fam.is_degenerate(lambda))
    throw Error(ErrorCode::DegenerateParameter,
                "lambda = " + std::to_string(lambda) + " is a degenerate parameter");
  const double a = fam.a(0), b = fam.a(1), c = fam.a(2);
  const double u = x(0) / (a - lambda), w = x(1) / (b - lambda), z = x(2) / (c + lambda);
  return u * u + w * w - z * z;
}

/// Parameter of the cuspidal edge through angle t; lies in [b, a].
inline double cusp_edge_lambda(const ConfocalFamily& fam, double t) {
  detail::require_space_21(fam);
  const double a = fam.a(0), b = fam.a(1);
  return (a + b - (a - b) * std::cos(2.0 * t)) / 2.0;
}

/// Scalar square <r_t, r_t> of the tropic curve's tangent on Q_lambda.
inline double tropic_tangent_norm_sq(const ConfocalFamily& fam, double lambda, double t) {
  detail::require_space_21(fam);
  const double a = fam.a(0), b = fam.a(1), c = fam.a(2);
  const double c2 = std::cos(2.0 * t);
  const double den = 2.0 * (a + b + 2.0 * c - (a - b) * c2);
  if (den == 0.0) throw Error(ErrorCode::DegenerateParameter, "vanishing denominator");
  const double num = a + b - 2.0 * lambda - (a - b) * c2;
  return num * num / den;
}

namespace detail {

inline void require_regular(const ConfocalFamily& fam, const TropicPartials& p) {
  const Vector ecross = p.r_l.head<3>().cross(p.r_t.head<3>());
  if (ecross.norm() <= 1e-10 * (fam.a(0) + fam.a(2)) * p.r_l.norm())
    throw Error(ErrorCode::CuspPoint, "parameter lies on a cuspidal edge");
}

}  // namespace detail

/// r_l ^ r_t: the pseudo-normal of the tropic surface; always light-like.
inline Vector tropic_surface_normal(const ConfocalFamily& fam, double lambda, double t, Sheet sheet) {
  const TropicPartials p = tropic_partials(fam, lambda, t, sheet);
  detail::require_regular(fam, p);
  return pseudo_cross(p.r_l, p.r_t);
}

/// Euclidean second fundamental form coefficients (L, M, N) against the
/// unit Euclidean normal.
struct SecondFundamental {
  double L, M, N;
};

inline SecondFundamental tropic_second_fundamental(const ConfocalFamily& fam, double lambda, double t,
                                                   Sheet sheet) {
  const TropicPartials p = tropic_partials(fam, lambda, t, sheet);
  detail::require_regular(fam, p);
  const Vector n = p.r_l.head<3>().cross(p.r_t.head<3>()).normalized();
  return {p.r_ll.dot(n), p.r_lt.dot(n), p.r_tt.dot(n)};
}

/// The four points where the cuspidal edges meet (the tetrahedron vertices).
inline std::array<Vector, 4> tetrahedron_vertices(const ConfocalFamily& fam) {
  detail::require_space_21(fam);
  const double a = fam.a(0), b = fam.a(1), c = fam.a(2);
  std::array<Vector, 4> v;
  for (auto& x : v) x = Vector(3);
  v[0] << (a - b) / std::sqrt(a + c), 0.0, (b + c) / std::sqrt(a + c);
  v[1] << -(a - b) / std::sqrt(a + c), 0.0, (b + c) / std::sqrt(a + c);
  v[2] << 0.0, (a - b) / std::sqrt(b + c), (a + c) / std::sqrt(b + c);
  v[3] << 0.0, -(a - b) / std::sqrt(b + c), (a + c) / std::sqrt(b + c);
  return v;
}

// ---------------------------------------------------------------------------
// Minkowski plane: C_lambda : x^2/(a-l) + y^2/(b+l) = 1

namespace detail {

inline void require_plane_11(const ConfocalFamily& fam) {
  if (fam.dim() != 2) throw Error(ErrorCode::WrongDimension, "needs a planar family");
}

inline std::complex<double> as_complex(const MDistance& d) {
  return d.imaginary ? std::complex<double>(0.0, d.magnitude) : std::complex<double>(d.magnitude, 0.0);
}

}  // namespace detail

enum class HostConic { Ellipse, HyperbolaXMajor, HyperbolaYMajor };

inline const char* to_string(HostConic h) {
  switch (h) {
    case HostConic::Ellipse: return "ellipse";
    case HostConic::HyperbolaXMajor: return "hyperbola (x-axis major)";
    case HostConic::HyperbolaYMajor: return "hyperbola (y-axis major)";
  }
  return "?";
}

/// Arcs of the host conic cut out by its four touching points with the
/// common tangents x +- y = +-sqrt(a+b).
struct ArcSet {
  int count = 0;
  bool finite = true;
  std::string where;
};

struct ConicClassification {
  double hostLambda = 0.0;  // a - c^2
  HostConic host = HostConic::Ellipse;
  ArcSet ellipse;           // points with dist(F1,X) + dist(F2,X) = 2c
  ArcSet hyperbola;         // points with |dist(F1,X) - dist(F2,X)| = 2c
};

inline ConicClassification relativistic_conic_classify(const ConfocalFamily& fam, const MDistance& c) {
  detail::require_plane_11(fam);
  if (c.magnitude == 0.0) throw Error(ErrorCode::InvalidArgument, "c must be nonzero");
  const double a = fam.a(0), b = fam.a(1);
  const double c2 = c.imaginary ? -c.magnitude * c.magnitude : c.magnitude * c.magnitude;
  if (std::abs(c2 - (a + b)) <= 1e-12 * (a + b))
    throw Error(ErrorCode::BoundaryCase, "c^2 = a + b: host conic degenerates");

  ConicClassification r;
  r.hostLambda = a - c2;
  if (c.imaginary) {
    r.host = HostConic::HyperbolaYMajor;
    r.ellipse = {4, false, "infinite arcs"};
    r.hyperbola = {2, true, "finite arcs"};
  } else if (c2 < a + b) {
    r.host = HostConic::Ellipse;
    r.ellipse = {2, true, "arcs meeting the y-axis"};
    r.hyperbola = {2, true, "arcs meeting the x-axis"};
  } else {
    r.host = HostConic::HyperbolaXMajor;
    r.ellipse = {2, true, "finite arcs"};
    r.hyperbola = {4, false, "infinite arcs"};
  }
  return r;
}

enum class ConicBranch { Ellipse, Hyperbola, Neither };

/// Which relativistic conic with constant c a point belongs to, decided
/// directly from its Minkowski distances to F1, F2.
inline ConicBranch relativistic_conic_branch(const ConfocalFamily& fam, const MDistance& c, const Vector& x,
                                             double tol = 1e-9) {
  detail::require_plane_11(fam);
  const Signature& sig = fam.signature();
  const double f = std::sqrt(fam.a(0) + fam.a(1));
  Vector F1(2), F2(2);
  F1 << f, 0.0;
  F2 << -f, 0.0;
  const auto d1 = detail::as_complex(mdistance(x, F1, sig));
  const auto d2 = detail::as_complex(mdistance(x, F2, sig));
  const auto target = 2.0 * detail::as_complex(c);
  const double scale = tol * (1.0 + std::abs(target));
  if (std::abs(d1 + d2 - target) <= scale) return ConicBranch::Ellipse;
  if (std::abs(d1 - d2 - target) <= scale || std::abs(d2 - d1 - target) <= scale)
    return ConicBranch::Hyperbola;
  return ConicBranch::Neither;
}

struct FocalResidual {
  double F = 0.0;  // deviation for the foci (+-sqrt(a+b), 0)
  double G = 0.0;  // deviation for the foci (0, +-sqrt(a+b))
  std::complex<double> targetF, targetG;
};

/// min over {sum, +-difference} of the Minkowski focal distances, measured
/// against the constant belonging to the range of lambda.
inline FocalResidual focal_residual(const ConfocalFamily& fam, double lambda, const Vector& x,
                                    double tol = 1e-9) {
  detail::require_plane_11(fam);
  if (std::abs(evaluate_quadric(fam, lambda, x)) > tol)
    throw Error(ErrorCode::PointNotOnConic, "point does not lie on C_lambda");
  const Signature& sig = fam.signature();
  const double a = fam.a(0), b = fam.a(1);
  const double f = std::sqrt(a + b);
  using C = std::complex<double>;

  FocalResidual r;
  if (lambda > -b && lambda < a) {
    r.targetF = C(2.0 * std::sqrt(a - lambda), 0.0);
    r.targetG = C(0.0, 2.0 * std::sqrt(b + lambda));
  } else if (lambda < -b) {
    r.targetF = C(2.0 * std::sqrt(a - lambda), 0.0);
    r.targetG = C(2.0 * std::sqrt(-b - lambda), 0.0);
  } else {
    r.targetF = C(0.0, 2.0 * std::sqrt(lambda - a));
    r.targetG = C(0.0, 2.0 * std::sqrt(b + lambda));
  }

  auto deviation = [&](const Vector& p1, const Vector& p2, C target) {
    const C d1 = detail::as_complex(mdistance(x, p1, sig));
    const C d2 = detail::as_complex(mdistance(x, p2, sig));
    return std::min({std::abs(d1 + d2 - target), std::abs(d1 - d2 - target), std::abs(d2 - d1 - target)});
  };
  Vector F1(2), F2(2), G1(2), G2(2);
  F1 << f, 0.0;
  F2 << -f, 0.0;
  G1 << 0.0, f;
  G2 << 0.0, -f;
  r.F = deviation(F1, F2, r.targetF);
  r.G = deviation(G1, G2, r.targetG);
  return r;
}

}  // namespace pbl
