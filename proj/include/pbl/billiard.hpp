#pragma once

// Billiard flow inside the ellipsoid Q_0 of a confocal family: chords,
// reflection (with the light-like normal convention), tracing, closure and
// the planar light-like arc bookkeeping.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pbl/confocal.hpp"

namespace pbl {

/// Parameters t where x + t v meets Q_lambda: none, one (tangency) or two, ascending.
inline std::vector<double> line_quadric_intersections(const ConfocalFamily& fam, double lambda,
                                                      const Line& line) {
  detail::require_family_dim(fam, line.base, "line base");
  detail::require_family_dim(fam, line.dir, "line direction");
  if (fam.is_degenerate(lambda))
    throw Error(ErrorCode::DegenerateParameter,
                "lambda = " + std::to_string(lambda) + " is a degenerate parameter");
  const auto q = detail::chord_quadratic(fam, lambda, line);
  if (q.a == 0.0) {
    if (q.b == 0.0) return {};
    return {-q.c / (2.0 * q.b)};
  }
  // c = A x.x - 1 carries rounding of order eps * (|A x.x| + 1)
  double cmag = 1.0;
  for (int i = 0; i < fam.dim(); ++i) cmag += std::abs(line.base(i) * line.base(i) / fam.denom(i, lambda));
  const double disc = q.b * q.b - q.a * q.c;
  const double slack = 1e-14 * (q.b * q.b + std::abs(q.a) * cmag);
  if (disc < -slack) return {};
  if (disc <= slack) return {-q.b / q.a};
  const double s = std::sqrt(disc);
  // stable pair: one root from the formula, the other from the product c/a
  const double t1 = q.b >= 0.0 ? (-q.b - s) / q.a : (-q.b + s) / q.a;
  const double t2 = t1 != 0.0 ? q.c / (q.a * t1) : -2.0 * q.b / q.a;
  return {std::min(t1, t2), std::max(t1, t2)};
}

/// Reflection off Q_0 at p. A light-like normal sends v back to -v; that
/// event counts as two reflections.
inline std::pair<Vector, bool> reflect_at_boundary(const ConfocalFamily& fam, const Vector& p, const Vector& v,
                                                   double tol = kLightLikeTol) {
  detail::require_family_dim(fam, p, "p");
  detail::require_family_dim(fam, v, "v");
  if (std::abs(evaluate_quadric(fam, 0.0, p)) > 1e-9)
    throw Error(ErrorCode::PointNotOnBoundary, "point is not on the ellipsoid");
  const Signature& sig = fam.signature();
  const Vector n = pseudo_normal(quadric_gradient(fam, 0.0, p), sig);
  if (std::abs(dot(n, n, sig)) <= tol * n.squaredNorm()) return {-v, true};
  return {reflect_direction(v, n, sig, tol), false};
}

struct Bounce {
  Vector p;
  Vector vin;
  Vector vout;
  bool doubleReflection = false;
};

struct Trajectory {
  ConfocalFamily family;
  Vector start;
  Vector startDir;
  std::vector<Bounce> bounces;
  CausticSet caustics;
  LineType lineType = LineType::SpaceLike;
  std::vector<double> invariantDrift;  // per bounce: max_i |F_i - F_i(0)| / max_j |F_j(0)|
  std::vector<double> causticDrift;    // per bounce: worst relative change of a caustic
  std::vector<int> reflectionIndex;    // reflections so far at each bounce (doubles count 2)

  double max_drift() const {
    double m = 0.0;
    for (double d : invariantDrift) m = std::max(m, d);
    return m;
  }
  double max_caustic_drift() const {
    double m = 0.0;
    for (double d : causticDrift) m = std::max(m, d);
    return m;
  }
};

struct TraceOptions {
  bool trackCaustics = true;
  double lightTol = kLightLikeTol;
};

namespace detail {

inline double caustic_distance(const CausticSet& a, const CausticSet& b) {
  if (a.size() != b.size()) return kInfinity;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.params[i], y = b.params[i];
    if (std::isinf(x) || std::isinf(y)) {
      if (x != y) return kInfinity;
      continue;
    }
    worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(x)));
  }
  return worst;
}

// The tracer keeps its state in quadruple precision: near the tropic curve
// the reflection divides by a small <n,n>, which amplifies rounding, and the
// boosted direction then carries it into the integrals.
using Wide = boost::multiprecision::cpp_bin_float_quad;
using WideVec = std::vector<Wide>;

// Next boundary parameter from x along v: the positive root of the chord
// quadratic, skipping the current point when x is on the boundary.
inline Wide next_hit(const ConfocalFamily& fam, const WideVec& x, const WideVec& v) {
  Wide qa = 0, qb = 0, qc = -1, vv = 0;
  for (int i = 0; i < fam.dim(); ++i) {
    const Wide w = Wide(1) / Wide(fam.a(i));
    qa += w * v[i] * v[i];
    qb += w * x[i] * v[i];
    qc += w * x[i] * x[i];
    vv += v[i] * v[i];
  }
  const Wide disc = qb * qb - qa * qc;
  const Wide s = disc > 0 ? Wide(sqrt(disc)) : Wide(0);
  Wide t = qb <= 0 ? (-qb + s) / qa : qc / (-qb - s);
  if (!(t * Wide(sqrt(vv)) > Wide(1e-12)))
    throw Error(ErrorCode::NumericalStall, "chord length below 1e-12");
  // one Newton step on g(t) = a t^2 + 2 b t + c along the chord
  const Wide g = (qa * t + 2 * qb) * t + qc;
  const Wide dg = 2 * (qa * t + qb);
  if (dg != 0) t -= g / dg;
  return t;
}

// Returns true for a light-like normal (v is then reversed).
inline bool reflect_wide(const ConfocalFamily& fam, const WideVec& p, WideVec& v, double tol) {
  const int d = fam.dim();
  WideVec n(d);
  Wide nn = 0, n2 = 0, vn = 0;
  for (int i = 0; i < d; ++i) {
    n[i] = fam.eps(i) * p[i] / Wide(fam.a(i));
    nn += fam.eps(i) * n[i] * n[i];
    n2 += n[i] * n[i];
    vn += fam.eps(i) * v[i] * n[i];
  }
  if (abs(nn) <= Wide(tol) * n2) {
    for (Wide& c : v) c = -c;
    return true;
  }
  const Wide f = 2 * vn / nn;
  for (int i = 0; i < d; ++i) v[i] -= f * n[i];
  return false;
}

inline Vector narrow(const WideVec& w) {
  Vector v(static_cast<int>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) v(static_cast<int>(i)) = static_cast<double>(w[i]);
  return v;
}

inline WideVec widen(const Vector& v) {
  WideVec w(v.size());
  for (int i = 0; i < v.size(); ++i) w[i] = v(i);
  return w;
}

}  // namespace detail

inline Trajectory trace(const ConfocalFamily& fam, const Vector& x0, const Vector& v0, int nBounces,
                        const TraceOptions& opt = {}) {
  detail::require_family_dim(fam, x0, "start point");
  detail::require_family_dim(fam, v0, "start direction");
  if (nBounces < 0) throw Error(ErrorCode::InvalidArgument, "bounce count must be nonnegative");
  if (evaluate_quadric(fam, 0.0, x0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "start point lies outside the ellipsoid");

  Trajectory tr{fam, x0, v0, {}, {}, line_type(v0, fam.signature(), opt.lightTol), {}, {}, {}};
  tr.caustics = caustics(fam, Line{x0, v0}, opt.lightTol);
  const auto F0 = integrals_F(fam, x0, v0);
  double Fscale = 0.0;
  for (double f : F0) Fscale = std::max(Fscale, std::abs(f));
  if (Fscale == 0.0) Fscale = 1.0;

  detail::WideVec x = detail::widen(x0), v = detail::widen(v0);
  int reflections = 0;
  tr.bounces.reserve(nBounces);
  for (int n = 0; n < nBounces; ++n) {
    const detail::Wide t = detail::next_hit(fam, x, v);
    for (int i = 0; i < fam.dim(); ++i) x[i] += t * v[i];
    const Vector p = detail::narrow(x), vin = detail::narrow(v);
    const bool twice = detail::reflect_wide(fam, x, v, opt.lightTol);
    const Vector vout = detail::narrow(v);
    reflections += twice ? 2 : 1;

    // integrals from the extended state: after a reflection with a nearly
    // light-like normal, the rounded vout alone loses too many digits
    const auto Fw = detail::integrals_impl<detail::Wide>(fam, x, v);
    std::vector<double> F(Fw.begin(), Fw.end());
    double drift = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) drift = std::max(drift, std::abs(F[i] - F0[i]));
    tr.invariantDrift.push_back(drift / Fscale);
    if (opt.trackCaustics)
      tr.causticDrift.push_back(
          detail::caustic_distance(tr.caustics, detail::caustics_from_integrals(fam, F, vout, opt.lightTol)));
    tr.reflectionIndex.push_back(reflections);
    tr.bounces.push_back({p, vin, vout, twice});
  }
  return tr;
}

struct ClosureReport {
  bool closed = false;
  std::optional<int> period;
  double positionError = 0.0;
  double directionError = 0.0;
};

namespace detail {

inline std::pair<double, double> bounce_mismatch(const Trajectory& tr, std::size_t k) {
  const Bounce& b0 = tr.bounces.front();
  const Bounce& bk = tr.bounces[k];
  return {(bk.p - b0.p).norm(), (bk.vout.normalized() - b0.vout.normalized()).norm()};
}

}  // namespace detail

/// Closed when a later bounce repeats bounce 0 in position and direction;
/// the period is counted in reflections. When not closed, the errors are
/// those of the nearest return.
inline ClosureReport closure_test(const Trajectory& tr, double tol) {
  if (tr.bounces.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "closure test needs at least two bounces");
  ClosureReport best;
  double bestScore = kInfinity;
  for (std::size_t k = 1; k < tr.bounces.size(); ++k) {
    const auto [dp, dv] = detail::bounce_mismatch(tr, k);
    if (dp <= tol && dv <= tol) {
      return {true, tr.reflectionIndex[k] - tr.reflectionIndex[0], dp, dv};
    }
    if (std::max(dp, dv) < bestScore) {
      bestScore = std::max(dp, dv);
      best.positionError = dp;
      best.directionError = dv;
    }
  }
  return best;
}

/// Position and direction mismatch between bounce n and bounce 0.
inline std::pair<double, double> closure_error_at(const Trajectory& tr, std::size_t n) {
  if (n >= tr.bounces.size()) throw Error(ErrorCode::InvalidArgument, "trajectory too short");
  return detail::bounce_mismatch(tr, n);
}

// ---------------------------------------------------------------------------
// Directions with prescribed caustics

namespace detail {

/// v^T M v = 0 is tangency of x + t v to Q_alpha:
///   M = (A x)(A x)^T - (A x . x - 1) A,  A = diag(1/(a_i - eps_i alpha)).
inline Eigen::MatrixXd tangency_form(const ConfocalFamily& fam, const Vector& x, double alpha) {
  const int d = fam.dim();
  Vector w(d);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    A(i, i) = 1.0 / fam.denom(i, alpha);
    w(i) = x(i) * A(i, i);
  }
  return w * w.transpose() - (w.dot(x) - 1.0) * A;
}

inline Eigen::MatrixXd metric_form(const ConfocalFamily& fam) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(fam.dim(), fam.dim());
  for (int i = 0; i < fam.dim(); ++i) E(i, i) = fam.eps(i);
  return E;
}

inline bool matches_target(const ConfocalFamily& fam, const Vector& x, const Vector& v,
                           const CausticSet& target) {
  try {
    return caustic_distance(target, caustics(fam, Line{x, v})) <= 1e-9;
  } catch (const Error&) {
    return false;
  }
}

inline void add_unique(std::vector<Vector>& out, Vector v) {
  v.normalize();
  for (const Vector& w : out)
    if (std::abs(w.dot(v)) > 1.0 - 1e-9) return;
  // fix the sign: first nonzero component positive
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      break;
    }
  out.push_back(std::move(v));
}

inline std::vector<Vector> planar_directions(const ConfocalFamily& fam, const Vector& x, double alpha) {
  if (std::isinf(alpha)) {
    // light-like directions of the Minkowski plane
    Vector u(2), w(2);
    u << 1.0, 1.0;
    w << 1.0, -1.0;
    return {u.normalized(), w.normalized()};
  }
  const Eigen::MatrixXd M = tangency_form(fam, x, alpha);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const double mu1 = es.eigenvalues()(0), mu2 = es.eigenvalues()(1);  // ascending
  const Vector e1 = es.eigenvectors().col(0), e2 = es.eigenvectors().col(1);
  const double tol = 1e-14 * std::max(std::abs(mu1), std::abs(mu2));
  if (std::abs(mu1) <= tol) return {e1};
  if (std::abs(mu2) <= tol) return {e2};
  if (mu1 > 0.0 || mu2 < 0.0) return {};
  // mu1 < 0 < mu2: mu1 c1^2 + mu2 c2^2 = 0
  const Vector u = std::sqrt(mu2) * e1 + std::sqrt(-mu1) * e2;
  const Vector w = std::sqrt(mu2) * e1 - std::sqrt(-mu1) * e2;
  return {u.normalized(), w.normalized()};
}

}  // namespace detail

struct DirectionSearch {
  int restarts = 200;
  int maxSolutions = 0;  // stop after this many distinct directions (0: as many as found)
  unsigned seed = 12345;
};

/// Directions at a boundary point x whose line has the given caustics.
/// Returned unit vectors are distinct up to sign.
inline std::vector<Vector> direction_with_caustics(const ConfocalFamily& fam, const Vector& x,
                                                   const CausticSet& target, const DirectionSearch& opt = {}) {
  detail::require_family_dim(fam, x, "x");
  if (std::abs(evaluate_quadric(fam, 0.0, x)) > 1e-9)
    throw Error(ErrorCode::PointNotOnBoundary, "point is not on the ellipsoid");
  if (!admissible_caustics(fam, target))
    throw Error(ErrorCode::InadmissibleCaustics, "caustic parameters violate the interlacing");
  const int d = fam.dim();
  std::vector<Vector> out;

  if (d == 2) {
    for (const Vector& v : detail::planar_directions(fam, x, target.params[0]))
      if (detail::matches_target(fam, x, v, target)) detail::add_unique(out, v);
  } else {
    // normalized quadratic equations v^T M_j v = 0 plus |v|^2 = 1
    std::vector<Eigen::MatrixXd> forms;
    for (double alpha : target.params) {
      Eigen::MatrixXd M = std::isinf(alpha) ? detail::metric_form(fam) : detail::tangency_form(fam, x, alpha);
      forms.push_back(M / M.norm());
    }
    std::mt19937 rng(opt.seed);
    std::normal_distribution<double> normal;

    auto residual = [&](const Vector& v, Vector& r, Eigen::MatrixXd& J) {
      for (int j = 0; j < d - 1; ++j) {
        const Vector Mv = forms[j] * v;
        r(j) = v.dot(Mv);
        J.row(j) = 2.0 * Mv.transpose();
      }
      r(d - 1) = v.squaredNorm() - 1.0;
      J.row(d - 1) = 2.0 * v.transpose();
    };

    for (int attempt = 0; attempt < opt.restarts; ++attempt) {
      Vector v(d);
      for (int i = 0; i < d; ++i) v(i) = normal(rng);
      v.normalize();
      Vector r(d);
      Eigen::MatrixXd J(d, d);
      residual(v, r, J);
      double mu = 1e-3;
      for (int it = 0; it < 200 && r.norm() > 1e-15; ++it) {
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Vector g = J.transpose() * r;
        const Vector step =
            (JtJ + mu * Eigen::MatrixXd::Identity(d, d)).ldlt().solve(-g);
        const Vector trial = v + step;
        Vector rt(d);
        Eigen::MatrixXd Jt(d, d);
        residual(trial, rt, Jt);
        if (rt.norm() < r.norm()) {
          v = trial;
          r = rt;
          J = Jt;
          mu = std::max(mu * 0.1, 1e-15);
        } else {
          mu *= 10.0;
          if (mu > 1e10) break;
        }
      }
      if (r.norm() <= 1e-12 && detail::matches_target(fam, x, v, target)) detail::add_unique(out, v);
      if (opt.maxSolutions > 0 && static_cast<int>(out.size()) >= opt.maxSolutions) break;
    }
  }
  if (out.empty()) throw Error(ErrorCode::NoSolution, "no direction realizes the requested caustics");
  return out;
}

// ---------------------------------------------------------------------------
// Planar light-like diagnostics

/// Bounce counts on the four arcs of the boundary ellipse separated by the
/// points with light-like tangent lines. pairA: the two arcs crossing the
/// y-axis; pairB: the two crossing the x-axis. Counts are per arc.
struct ArcHits {
  int pairA = 0;
  int pairB = 0;
  std::array<int, 4> perArc{};  // right (x>0), top, left, bottom
};

inline ArcHits arc_hit_counts(const Trajectory& tr) {
  const ConfocalFamily& fam = tr.family;
  if (fam.dim() != 2 || tr.lineType != LineType::LightLike)
    throw Error(ErrorCode::NotPlanarLightLike, "needs a light-like trajectory in the plane");
  const double a = fam.a(0), b = fam.a(1);
  // the light-like tangent points sit at eccentric angle +-theta0, pi +- theta0
  const double theta0 = std::atan2(std::sqrt(b), std::sqrt(a));
  ArcHits h;
  for (const Bounce& bn : tr.bounces) {
    if (bn.doubleReflection) continue;
    double th = std::atan2(bn.p(1) / std::sqrt(b), bn.p(0) / std::sqrt(a));
    if (th < -theta0) th += 2.0 * std::numbers::pi;
    int arc;
    if (th < theta0) arc = 0;
    else if (th < std::numbers::pi - theta0) arc = 1;
    else if (th < std::numbers::pi + theta0) arc = 2;
    else arc = 3;
    ++h.perArc[arc];
  }
  h.pairA = (h.perArc[1] + h.perArc[3]) / 2;
  h.pairB = (h.perArc[0] + h.perArc[2]) / 2;
  return h;
}

/// Ratio of the sides of the rectangle whose light-like billiard is
/// trajectorially equivalent to the one in x^2/a + y^2/b = 1.
inline double rectangle_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "a and b must be positive");
  return std::numbers::pi / (2.0 * std::atan(std::sqrt(a / b))) - 1.0;
}

}  // namespace pbl
