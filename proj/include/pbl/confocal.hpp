#pragma once

// Confocal family
//
//   Q_lambda :  sum_i x_i^2 / (a_i - eps_i lambda) = 1,
//
// with eps_i = +1 on the first k axes and -1 on the last l. Covers Jacobi
// coordinates of a point, the caustic parameters of a line and the
// interlacing of those parameters with the poles eps_i a_i.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pbl/metric.hpp"
#include "pbl/polynomial.hpp"

namespace pbl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class ConfocalFamily {
 public:
  /// `axes` holds the positive numbers a_1..a_d; the poles are eps_i a_i.
  ConfocalFamily(Signature sig, std::vector<double> axes) : sig_(sig), a_(std::move(axes)) {
    if (static_cast<int>(a_.size()) != sig_.dim())
      throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(sig_.dim()) +
                                                    " axes, got " + std::to_string(a_.size()));
    for (double ai : a_)
      if (!(ai > 0.0) || !std::isfinite(ai))
        throw Error(ErrorCode::InvalidArgument, "axes must be positive and finite");
    const int k = sig_.k();
    for (int i = 0; i + 1 < k; ++i)
      if (!(a_[i] > a_[i + 1]))
        throw Error(ErrorCode::InvalidArgument, "need a_1 > a_2 > ... > a_k");
    for (int i = k; i + 1 < dim(); ++i)
      if (!(a_[i] < a_[i + 1]))
        throw Error(ErrorCode::InvalidArgument, "need a_{k+1} < a_{k+2} < ... < a_d");
  }

  const Signature& signature() const { return sig_; }
  int dim() const { return sig_.dim(); }
  double a(int i) const { return a_[i]; }
  const std::vector<double>& axes() const { return a_; }
  double eps(int i) const { return sig_.eps(i); }

  /// eps_i a_i: the parameter where Q_lambda degenerates to {x_i = 0}.
  double pole(int i) const { return eps(i) * a_[i]; }

  /// All poles in ascending order: -a_d < ... < -a_{k+1} < 0 < a_k < ... < a_1.
  std::vector<double> sorted_poles() const {
    std::vector<double> p;
    for (int i = 0; i < dim(); ++i) p.push_back(pole(i));
    std::sort(p.begin(), p.end());
    return p;
  }

  double denom(int i, double lambda) const { return a_[i] - eps(i) * lambda; }

  /// a_i - eps_i lambda as a polynomial in lambda.
  Polynomial denom_poly(int i) const { return Polynomial::linear(a_[i], -eps(i)); }

  /// Length scale a_1 + a_d used for relative tolerances on parameters.
  double scale() const { return a_.front() + a_.back(); }

  bool is_degenerate(double lambda, double rel = 1e-12) const {
    for (int i = 0; i < dim(); ++i)
      if (std::abs(lambda - pole(i)) <= rel * scale()) return true;
    return false;
  }

  Polynomial denominator_product() const {
    Polynomial p({1.0});
    for (int i = 0; i < dim(); ++i) p = p * denom_poly(i);
    return p;
  }

  Polynomial denominator_product_except(int skip) const {
    Polynomial p({1.0});
    for (int i = 0; i < dim(); ++i)
      if (i != skip) p = p * denom_poly(i);
    return p;
  }

 private:
  Signature sig_;
  std::vector<double> a_;
};

struct Line {
  Vector base;
  Vector dir;
};

/// Relative tolerance under which two parameters count as one multiple root.
inline constexpr double kMultiplicityTol = 1e-9;

/// Caustic parameters of a line, ascending; a light-like line carries +inf.
struct CausticSet {
  std::vector<double> params;
  std::vector<int> multiplicity;  // per entry: how many entries coincide with it

  bool has_infinite() const {
    return std::any_of(params.begin(), params.end(), [](double p) { return std::isinf(p); });
  }
  bool has_multiple() const {
    return std::any_of(multiplicity.begin(), multiplicity.end(), [](int m) { return m > 1; });
  }
  std::size_t size() const { return params.size(); }
};

namespace detail {

inline std::vector<int> multiplicities(const std::vector<double>& sorted, double tol) {
  std::vector<int> m(sorted.size(), 1);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    int count = 0;
    for (double v : sorted)
      if (v == sorted[i] || std::abs(v - sorted[i]) <= tol) ++count;
    m[i] = count;
  }
  return m;
}

inline void require_family_dim(const ConfocalFamily& fam, const Vector& x, const char* what) {
  if (x.size() != fam.dim())
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(x.size()) + ", family has d = " +
                                                  std::to_string(fam.dim()));
}

}  // namespace detail

inline CausticSet make_caustic_set(std::vector<double> params, const ConfocalFamily& fam) {
  std::sort(params.begin(), params.end());
  CausticSet c;
  c.multiplicity = detail::multiplicities(params, kMultiplicityTol * fam.scale());
  c.params = std::move(params);
  return c;
}

/// sum x_i^2 / (a_i - eps_i lambda) - 1; zero exactly on Q_lambda.
inline double evaluate_quadric(const ConfocalFamily& fam, double lambda, const Vector& x) {
  detail::require_family_dim(fam, x, "x");
  if (fam.is_degenerate(lambda))
    throw Error(ErrorCode::DegenerateParameter,
                "lambda = " + std::to_string(lambda) + " is a degenerate parameter");
  double s = -1.0;
  for (int i = 0; i < fam.dim(); ++i) s += x(i) * x(i) / fam.denom(i, lambda);
  return s;
}

/// Gradient direction A_lambda x of the quadric function (Euclidean normal).
inline Vector quadric_gradient(const ConfocalFamily& fam, double lambda, const Vector& x) {
  Vector g(fam.dim());
  for (int i = 0; i < fam.dim(); ++i) g(i) = x(i) / fam.denom(i, lambda);
  return g;
}

// ---------------------------------------------------------------------------
// Generalized Jacobi coordinates

/// The d solutions in lambda of  sum x_i^2/(a_i - eps_i lambda) = 1.
struct GeneralizedJacobi {
  std::vector<double> real;  // ascending, repeated according to multiplicity
  std::optional<std::complex<double>> complex_pair;  // one member of a conjugate pair

  bool all_real() const { return !complex_pair.has_value(); }

  bool has_repeated(double tol) const {
    for (std::size_t i = 0; i + 1 < real.size(); ++i)
      if (real[i + 1] - real[i] <= tol) return true;
    return false;
  }
};

/// prod_j D_j(lambda) - sum_i x_i^2 prod_{j != i} D_j(lambda).
inline Polynomial jacobi_polynomial(const ConfocalFamily& fam, const Vector& x) {
  detail::require_family_dim(fam, x, "x");
  Polynomial p = fam.denominator_product();
  for (int i = 0; i < fam.dim(); ++i)
    p = p + fam.denominator_product_except(i) * (-x(i) * x(i));
  return p;
}

inline GeneralizedJacobi jacobi_coordinates(const ConfocalFamily& fam, const Vector& x) {
  const Polynomial p = jacobi_polynomial(fam, x);
  const int d = fam.dim();
  GeneralizedJacobi out;

  int count = 0;
  const auto roots = real_roots(p);
  for (const RealRoot& r : roots) count += r.multiplicity;

  if (count == d || count == d - 2) {
    Polynomial rest = p;
    for (const RealRoot& r : roots)
      for (int m = 0; m < r.multiplicity; ++m) {
        out.real.push_back(r.value);
        rest = rest.deflate(r.value);
      }
    if (count == d - 2) {
      // remaining quadratic carries the conjugate pair
      const double qa = rest.coeff(2), qb = rest.coeff(1), qc = rest.coeff(0);
      const double disc = qb * qb - 4.0 * qa * qc;
      out.complex_pair = std::complex<double>(-qb / (2.0 * qa),
                                              std::sqrt(std::max(0.0, -disc)) / (2.0 * std::abs(qa)));
    }
    return out;
  }

  // isolation disagreed with the degree; fall back to the companion matrix
  const double tol = 1e-9 * fam.scale();
  for (const auto& z : complex_roots(p)) {
    if (std::abs(z.imag()) <= tol) {
      out.real.push_back(z.real());
    } else if (z.imag() > 0.0) {
      out.complex_pair = z;
    }
  }
  std::sort(out.real.begin(), out.real.end());
  return out;
}

// ---------------------------------------------------------------------------
// Integrals and caustics

/// F_1..F_d; conserved by the billiard flow and summing to <v,v>.
namespace detail {

template <class T, class V>
std::vector<T> integrals_impl(const ConfocalFamily& fam, const V& x, const V& v) {
  const int d = fam.dim();
  std::vector<T> F(d);
  for (int i = 0; i < d; ++i) {
    T s = fam.eps(i) * v[i] * v[i];
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const T w = x[i] * v[j] - x[j] * v[i];
      // the difference is formed in T: for mixed signs it is a rounded sum
      s += w * w / (T(fam.eps(j)) * T(fam.a(i)) - T(fam.eps(i)) * T(fam.a(j)));
    }
    F[i] = s;
  }
  return F;
}

}  // namespace detail

inline std::vector<double> integrals_F(const ConfocalFamily& fam, const Vector& x, const Vector& v) {
  detail::require_family_dim(fam, x, "x");
  detail::require_family_dim(fam, v, "v");
  if (v.squaredNorm() == 0.0) throw Error(ErrorCode::ZeroVector, "direction vector is zero");
  return detail::integrals_impl<double>(fam, x, v);
}

/// Numerator of the tangency condition, normalized so that the coefficient
/// of lambda^{d-1} is <v,v>:
///   P(lambda) = (-1)^{k+1} sum_i eps_i F_i prod_{j != i} (a_j - eps_j lambda).
/// For a light-like direction that coefficient is set to exactly zero.
namespace detail {

inline Polynomial caustic_polynomial_from(const ConfocalFamily& fam, const std::vector<double>& F, bool lightLike) {
  const int d = fam.dim();
  std::vector<double> c(d, 0.0);
  const double sign = (fam.signature().k() % 2 == 1) ? 1.0 : -1.0;
  for (int i = 0; i < d; ++i) {
    const Polynomial term = fam.denominator_product_except(i) * (sign * fam.eps(i) * F[i]);
    for (int j = 0; j <= term.degree(); ++j) c[j] += term.coeff(j);
  }
  if (lightLike) c[d - 1] = 0.0;
  return Polynomial(std::move(c));
}

}  // namespace detail

inline Polynomial caustic_polynomial(const ConfocalFamily& fam, const Vector& x, const Vector& v,
                                     double tol = kLightLikeTol) {
  return detail::caustic_polynomial_from(fam, integrals_F(fam, x, v),
                                         line_type(v, fam.signature(), tol) == LineType::LightLike);
}

namespace detail {

struct Quadratic {
  double a, b, c;  // a t^2 + 2 b t + c
};

/// A_lambda (x + t v).(x + t v) - 1 as a quadratic in t.
inline Quadratic chord_quadratic(const ConfocalFamily& fam, double lambda, const Line& line) {
  Quadratic q{0.0, 0.0, -1.0};
  for (int i = 0; i < fam.dim(); ++i) {
    const double w = 1.0 / fam.denom(i, lambda);
    q.a += w * line.dir(i) * line.dir(i);
    q.b += w * line.base(i) * line.dir(i);
    q.c += w * line.base(i) * line.base(i);
  }
  return q;
}

inline bool meets_ellipsoid(const ConfocalFamily& fam, const Line& line) {
  const Quadratic q = chord_quadratic(fam, 0.0, line);
  const double disc = q.b * q.b - q.a * q.c;
  return disc >= -1e-12 * (q.b * q.b + std::abs(q.a * q.c));
}

/// sum_i v_i^2 prod_{j != i} (a_j - eps_j lambda).
inline Polynomial direction_polynomial(const ConfocalFamily& fam, const Vector& v) {
  Polynomial r;
  for (int i = 0; i < fam.dim(); ++i) r = r + fam.denominator_product_except(i) * (v(i) * v(i));
  return r;
}

// Roots of P bracketed by the roots zeta of the direction polynomial R and
// by 0: consecutive anchors enclose exactly one pole and one caustic. Returns
// nullopt when a bracket does not show the expected sign change (a component
// of v vanishes, the line is tangent to Q_0, ...).
inline std::optional<std::vector<double>> bracketed_caustics(const ConfocalFamily& fam,
                                                             const Polynomial& P,
                                                             const Vector& v, LineType type) {
  const Polynomial R = direction_polynomial(fam, v);
  const int d = fam.dim();
  const auto poles = fam.sorted_poles();
  std::vector<double> anchors{0.0};

  // one zeta between consecutive poles of the same sign
  for (int i = 0; i + 1 < d; ++i) {
    const double lo = poles[i], hi = poles[i + 1];
    if (lo < 0.0 && hi > 0.0) continue;
    if (sign_of(R(lo)) * sign_of(R(hi)) >= 0) return std::nullopt;
    anchors.push_back(bisect(R, lo, hi));
  }
  if (type != LineType::LightLike) {
    // zeta_0 lies beyond -a_d (space-like) or beyond a_1 (time-like)
    const double edge = type == LineType::SpaceLike ? poles.front() : poles.back();
    const double dir = type == LineType::SpaceLike ? -1.0 : 1.0;
    const int s_edge = sign_of(R(edge));
    if (s_edge == 0) return std::nullopt;
    double step = fam.scale();
    double far = edge + dir * step;
    int guard = 0;
    while (sign_of(R(far)) == s_edge && guard++ < 200) {
      step *= 2.0;
      far = edge + dir * step;
    }
    if (sign_of(R(far)) == s_edge) return std::nullopt;
    anchors.push_back(dir < 0 ? bisect(R, far, edge) : bisect(R, edge, far));
  }
  std::sort(anchors.begin(), anchors.end());

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
    const double lo = anchors[i], hi = anchors[i + 1];
    if (sign_of(P(lo)) * sign_of(P(hi)) >= 0) return std::nullopt;
    roots.push_back(bisect(P, lo, hi));
  }
  return roots;
}

}  // namespace detail

namespace detail {

/// Caustics of a line with direction v whose integrals F are already known.
inline CausticSet caustics_from_integrals(const ConfocalFamily& fam, const std::vector<double>& F,
                                          const Vector& v, double tol = kLightLikeTol) {
  const LineType type = line_type(v, fam.signature(), tol);
  const Polynomial P = caustic_polynomial_from(fam, F, type == LineType::LightLike);
  const int expected = type == LineType::LightLike ? fam.dim() - 2 : fam.dim() - 1;

  std::vector<double> roots;
  if (auto bracketed = bracketed_caustics(fam, P, v, type)) {
    roots = std::move(*bracketed);
  } else {
    for (const RealRoot& r : real_roots(P))
      for (int m = 0; m < r.multiplicity; ++m) roots.push_back(r.value);
  }
  if (static_cast<int>(roots.size()) != expected)
    throw Error(ErrorCode::NoSolution, "caustic polynomial gave " + std::to_string(roots.size()) +
                                           " real roots, expected " + std::to_string(expected));
  if (type == LineType::LightLike) roots.push_back(kInfinity);
  return make_caustic_set(std::move(roots), fam);
}

}  // namespace detail

/// Parameters of the d-1 confocal quadrics tangent to a line meeting Q_0.
inline CausticSet caustics(const ConfocalFamily& fam, const Line& line,
                           double tol = kLightLikeTol) {
  detail::require_family_dim(fam, line.base, "line base");
  detail::require_family_dim(fam, line.dir, "line direction");
  if (!detail::meets_ellipsoid(fam, line))
    throw Error(ErrorCode::NoIntersection, "line does not meet the ellipsoid Q_0");
  return detail::caustics_from_integrals(fam, integrals_F(fam, line.base, line.dir), line.dir, tol);
}

/// Space-, time- or light-like from the caustics alone, by the sign of
/// (-1)^l alpha_1 ... alpha_{d-1}.
inline LineType trajectory_type_from_caustics(const ConfocalFamily& fam, const CausticSet& c) {
  if (static_cast<int>(c.size()) != fam.dim() - 1)
    throw Error(ErrorCode::InvalidArgument, "expected d-1 caustic parameters");
  if (c.has_infinite()) return LineType::LightLike;
  double sign = (fam.signature().l() % 2 == 0) ? 1.0 : -1.0;
  for (double a : c.params) {
    if (a == 0.0) throw Error(ErrorCode::AmbiguousSign, "a caustic parameter is zero");
    if (a < 0.0) sign = -sign;
  }
  return sign > 0.0 ? LineType::SpaceLike : LineType::TimeLike;
}

// ---------------------------------------------------------------------------
// Interlacing

struct InterlacingClause {
  std::string name;
  bool ok;
};

struct InterlacingReport {
  LineType type = LineType::SpaceLike;
  std::vector<double> b;       // positive values, ascending (+inf last)
  std::vector<double> c;       // negative values, descending: c_1 is closest to 0
  std::vector<double> alphas;  // caustics in the indexing of the interlacing clauses
  std::vector<InterlacingClause> clauses;

  std::size_t p() const { return b.size(); }
  std::size_t q() const { return c.size(); }

  bool passed() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const auto& cl) { return cl.ok; });
  }
};

/// Checks the interlacing of the caustics with the poles for a given type.
inline InterlacingReport interlacing_check(const ConfocalFamily& fam, const CausticSet& caustic,
                                           LineType type) {
  const int k = fam.signature().k();
  const int l = fam.signature().l();
  const int d = fam.dim();

  InterlacingReport r;
  r.type = type;
  bool has_zero = false;
  std::vector<double> pos, neg;
  for (double a : caustic.params) {
    if (a > 0.0) {
      pos.push_back(a);
    } else if (a < 0.0) {
      neg.push_back(a);
    } else {
      has_zero = true;
    }
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  r.alphas = pos;
  r.alphas.insert(r.alphas.end(), neg.begin(), neg.end());

  r.b = pos;
  r.c = neg;
  for (int i = 0; i < d; ++i) (fam.pole(i) > 0.0 ? r.b : r.c).push_back(fam.pole(i));
  std::sort(r.b.begin(), r.b.end());
  std::sort(r.c.begin(), r.c.end(), std::greater<>());

  auto add = [&](std::string name, bool ok) { r.clauses.push_back({std::move(name), ok}); };
  // 1-based accessors; out-of-range reads fail the clause
  auto bv = [&](int i) { return i >= 1 && i <= static_cast<int>(r.b.size()) ? r.b[i - 1] : NAN; };
  auto cv = [&](int i) { return i >= 1 && i <= static_cast<int>(r.c.size()) ? r.c[i - 1] : NAN; };
  auto alpha = [&](int i) {
    return i >= 1 && i <= static_cast<int>(r.alphas.size()) ? r.alphas[i - 1] : NAN;
  };
  auto in_b_pair = [&](int i) {
    const double a = alpha(i);
    return a == bv(2 * i - 1) || a == bv(2 * i);
  };
  auto in_c_pair = [&](int ai, int j) {
    const double a = alpha(ai);
    return a == cv(2 * j - 1) || a == cv(2 * j);
  };

  add("d-1 caustics", static_cast<int>(caustic.size()) == d - 1);
  add("no zero parameter", !has_zero);
  add("p+q = 2d-1", static_cast<int>(r.p() + r.q()) == 2 * d - 1);

  const int p = static_cast<int>(r.p()), q = static_cast<int>(r.q());
  switch (type) {
    case LineType::SpaceLike: {
      add("p = 2k-1", p == 2 * k - 1);
      add("q = 2l", q == 2 * l);
      add("b_p = a_1", bv(p) == fam.a(0));
      bool ok = true;
      for (int i = 1; i <= k - 1; ++i) ok = ok && in_b_pair(i);
      add("alpha_i in {b_2i-1, b_2i}, i < k", ok);
      ok = true;
      for (int j = 1; j <= l; ++j) ok = ok && in_c_pair(j + k - 1, j);
      add("alpha_{j+k-1} in {c_2j-1, c_2j}, j <= l", ok);
      break;
    }
    case LineType::TimeLike: {
      add("p = 2k", p == 2 * k);
      add("q = 2l-1", q == 2 * l - 1);
      add("c_q = -a_d", cv(q) == -fam.a(d - 1));
      bool ok = true;
      for (int i = 1; i <= k; ++i) ok = ok && in_b_pair(i);
      add("alpha_i in {b_2i-1, b_2i}, i <= k", ok);
      ok = true;
      for (int j = 1; j <= l - 1; ++j) ok = ok && in_c_pair(j + k, j);
      add("alpha_{j+k} in {c_2j-1, c_2j}, j < l", ok);
      break;
    }
    case LineType::LightLike: {
      add("p = 2k", p == 2 * k);
      add("q = 2l-1", q == 2 * l - 1);
      add("b_p = inf = alpha_k", std::isinf(bv(p)) && std::isinf(alpha(k)));
      add("b_{p-1} = a_1", bv(p - 1) == fam.a(0));
      // for k = 1 the range below is empty and the clause holds vacuously
      bool ok = true;
      for (int i = 1; i <= k - 1; ++i) ok = ok && in_b_pair(i);
      add("alpha_i in {b_2i-1, b_2i}, i < k", ok);
      ok = true;
      for (int j = 1; j <= l - 1; ++j) ok = ok && in_c_pair(j + k, j);
      add("alpha_{j+k} in {c_2j-1, c_2j}, j < l", ok);
      break;
    }
  }
  return r;
}

/// Caustics of the line merged with the poles, checked against the clauses
/// for the line's own type.
inline InterlacingReport interlacing_report(const ConfocalFamily& fam, const Line& line,
                                            double tol = kLightLikeTol) {
  const CausticSet c = caustics(fam, line, tol);
  return interlacing_check(fam, c, line_type(line.dir, fam.signature(), tol));
}

/// Whether a caustic set can belong to a chord at all: the type implied by
/// the sign rule must satisfy its interlacing clauses.
inline bool admissible_caustics(const ConfocalFamily& fam, const CausticSet& c) {
  if (static_cast<int>(c.size()) != fam.dim() - 1) return false;
  try {
    return interlacing_check(fam, c, trajectory_type_from_caustics(fam, c)).passed();
  } catch (const Error&) {
    return false;
  }
}

}  // namespace pbl
