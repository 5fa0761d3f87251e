#pragma once

// Analytic periodicity conditions: the Taylor coefficients of sqrt(P1), the
// Hankel-type Cayley matrices and their rank test, the light-like arctan
// criterion, and a Poncelet harness that checks the prediction by tracing.

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "pbl/billiard.hpp"
#include "pbl/confocal.hpp"

namespace pbl {

using Rational = boost::multiprecision::cpp_rational;

/// B_0..B_order with (sum B_i l^i)^2 = sum q_i l^i through order `order`.
inline std::vector<double> sqrt_series(const std::vector<double>& q, int order) {
  if (q.empty() || !(q[0] > 0.0))
    throw Error(ErrorCode::NonpositiveConstantTerm, "constant term must be positive");
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "order must be nonnegative");
  std::vector<double> B(order + 1, 0.0);
  B[0] = std::sqrt(q[0]);
  for (int n = 1; n <= order; ++n) {
    double s = n < static_cast<int>(q.size()) ? q[n] : 0.0;
    for (int i = 1; i < n; ++i) s -= B[i] * B[n - i];
    B[n] = s / (2.0 * B[0]);
  }
  return B;
}

namespace detail {

/// Series of sqrt(q(l)/q_0): beta_0 = 1, rational whenever q is.
template <class T>
std::vector<T> unit_sqrt_series(const std::vector<T>& q, int order) {
  std::vector<T> beta(order + 1, T(0));
  beta[0] = T(1);
  for (int n = 1; n <= order; ++n) {
    T s = n < static_cast<int>(q.size()) ? T(q[n] / q[0]) : T(0);
    for (int i = 1; i < n; ++i) s -= beta[i] * beta[n - i];
    beta[n] = s / T(2);
  }
  return beta;
}

/// Coefficients of prod (c0 + c1 l) over the given factors.
template <class T>
std::vector<T> expand_factors(const std::vector<std::pair<T, T>>& factors) {
  std::vector<T> p{T(1)};
  for (const auto& [c0, c1] : factors) {
    std::vector<T> r(p.size() + 1, T(0));
    for (std::size_t i = 0; i < p.size(); ++i) {
      r[i] += p[i] * c0;
      r[i + 1] += p[i] * c1;
    }
    p = std::move(r);
  }
  return p;
}

inline void check_caustics_for_series(const ConfocalFamily& fam, const CausticSet& c) {
  if (static_cast<int>(c.size()) != fam.dim() - 1)
    throw Error(ErrorCode::InvalidArgument, "expected d-1 caustic parameters");
  if (c.has_multiple())
    throw Error(ErrorCode::DegenerateConfiguration, "repeated caustic parameter");
  for (double a : c.params)
    if (!std::isinf(a) && fam.is_degenerate(a, kMultiplicityTol))
      throw Error(ErrorCode::DegenerateConfiguration, "caustic parameter coincides with a pole");
  if (std::count_if(c.params.begin(), c.params.end(), [](double a) { return std::isinf(a); }) > 1)
    throw Error(ErrorCode::DegenerateConfiguration, "repeated infinite caustic");
}

}  // namespace detail

/// prod_j (alpha_j - l) prod_i (a_i - eps_i l), skipping an infinite alpha.
inline std::vector<double> build_P1(const ConfocalFamily& fam, const CausticSet& c) {
  detail::check_caustics_for_series(fam, c);
  std::vector<std::pair<double, double>> f;
  for (double a : c.params)
    if (!std::isinf(a)) f.emplace_back(a, -1.0);
  for (int i = 0; i < fam.dim(); ++i) f.emplace_back(fam.a(i), -fam.eps(i));
  return detail::expand_factors(f);
}

struct CayleyMatrix {
  Eigen::MatrixXd entries;
  std::vector<std::vector<int>> index;  // which B_i sits in each cell
  int n = 0;
  int d = 0;
  bool even = true;
  int threshold = 0;  // periodic iff rank < threshold
};

namespace detail {

struct CayleyShape {
  int rows, cols, offset, threshold, maxIndex;
};

inline CayleyShape cayley_shape(int d, int n) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "period must be at least 3");
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 2");
  CayleyShape s{};
  if (n % 2 == 0) {
    const int m = n / 2;
    s = {m - 1, m - d + 1, d + 1, m - d + 1, 2 * m - 1};
  } else {
    const int m = (n - 1) / 2;
    s = {m, m - d + 2, d, m - d + 2, 2 * m};
  }
  if (s.rows <= 0 || s.cols <= 0)
    throw Error(ErrorCode::VacuousCondition, "Cayley matrix is empty for d = " + std::to_string(d) +
                                                 ", n = " + std::to_string(n));
  return s;
}

}  // namespace detail

inline CayleyMatrix cayley_matrix(const std::vector<double>& B, int d, int n) {
  const auto s = detail::cayley_shape(d, n);
  if (static_cast<int>(B.size()) <= s.maxIndex)
    throw Error(ErrorCode::InsufficientOrder, "need coefficients up to B_" + std::to_string(s.maxIndex));
  CayleyMatrix M;
  M.n = n;
  M.d = d;
  M.even = n % 2 == 0;
  M.threshold = s.threshold;
  M.entries.resize(s.rows, s.cols);
  M.index.assign(s.rows, std::vector<int>(s.cols));
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c) {
      M.index[r][c] = s.offset + r + c;
      M.entries(r, c) = B[s.offset + r + c];
    }
  return M;
}

/// Number of singular values above relTol * max(sigma_max, floor).
inline int numerical_rank(const Eigen::MatrixXd& M, double relTol = 1e-9, double floor = 0.0) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double cut = relTol * std::max(s.size() ? s(0) : 0.0, floor);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

/// Exact rank by Gaussian elimination over the rationals.
inline int exact_rank(std::vector<std::vector<Rational>> M) {
  const int rows = static_cast<int>(M.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(M[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (M[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(M[piv], M[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      if (M[r][c] == 0) continue;
      const Rational f = M[r][c] / M[rank][c];
      for (int k = c; k < cols; ++k) M[r][k] -= f * M[rank][k];
    }
    ++rank;
  }
  return rank;
}

namespace detail {

// Rescales B_i -> B_i R^i / |B_0| with R the smallest finite parameter
// magnitude, so that the rank test no longer depends on units.
inline std::vector<double> normalized_series(const ConfocalFamily& fam, const CausticSet& c, int order) {
  std::vector<double> q = build_P1(fam, c);
  if (q[0] < 0.0)
    for (double& x : q) x = -x;  // sqrt(-P1) differs by a constant factor only
  const auto B = sqrt_series(q, order);
  double R = kInfinity;
  for (double a : c.params)
    if (!std::isinf(a)) R = std::min(R, std::abs(a));
  for (int i = 0; i < fam.dim(); ++i) R = std::min(R, fam.a(i));
  std::vector<double> out(B.size());
  double p = 1.0;
  for (std::size_t i = 0; i < B.size(); ++i) {
    out[i] = B[i] * p / std::abs(B[0]);
    p *= R;
  }
  return out;
}

}  // namespace detail

/// Exact version of the rank test: all of sig, axes and the finite caustic
/// parameters are rationals; std::nullopt stands for an infinite parameter.
inline bool cayley_condition_exact(const Signature& sig, const std::vector<Rational>& axes,
                                   const std::vector<std::optional<Rational>>& caustic, int n) {
  const int d = sig.dim();
  if (static_cast<int>(axes.size()) != d || static_cast<int>(caustic.size()) != d - 1)
    throw Error(ErrorCode::DimensionMismatch, "axes or caustic count do not match the signature");
  std::vector<std::pair<Rational, Rational>> f;
  for (const auto& a : caustic) {
    if (!a) continue;
    if (*a == 0) throw Error(ErrorCode::NonpositiveConstantTerm, "zero caustic parameter");
    for (int i = 0; i < d; ++i)
      if (*a == axes[i] * Rational(static_cast<int>(sig.eps(i))))
        throw Error(ErrorCode::DegenerateConfiguration, "caustic parameter coincides with a pole");
    f.emplace_back(*a, Rational(-1));
  }
  for (int i = 0; i < d; ++i) f.emplace_back(axes[i], Rational(-static_cast<int>(sig.eps(i))));
  const auto q = detail::expand_factors(f);
  if (q[0] == 0) throw Error(ErrorCode::NonpositiveConstantTerm, "constant term vanishes");

  const auto s = detail::cayley_shape(d, n);
  const auto beta = detail::unit_sqrt_series(q, s.maxIndex);
  std::vector<std::vector<Rational>> M(s.rows, std::vector<Rational>(s.cols));
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c) M[r][c] = beta[s.offset + r + c];
  return exact_rank(std::move(M)) < s.threshold;
}

/// Whether billiard trajectories with these caustics are n-periodic. In
/// exact mode every double is taken at its exact binary value.
inline bool cayley_condition(const ConfocalFamily& fam, const CausticSet& c, int n, double relTol = 1e-9,
                             bool exact = false) {
  detail::check_caustics_for_series(fam, c);
  if (!admissible_caustics(fam, c))
    throw Error(ErrorCode::InadmissibleCaustics, "caustic parameters violate the interlacing");
  const auto s = detail::cayley_shape(fam.dim(), n);
  if (exact) {
    std::vector<Rational> axes;
    for (double a : fam.axes()) axes.emplace_back(a);
    std::vector<std::optional<Rational>> cs;
    for (double a : c.params) cs.push_back(std::isinf(a) ? std::nullopt : std::optional<Rational>(Rational(a)));
    return cayley_condition_exact(fam.signature(), axes, cs, n);
  }
  const auto B = detail::normalized_series(fam, c, s.maxIndex);
  const CayleyMatrix M = cayley_matrix(B, fam.dim(), n);
  return numerical_rank(M.entries, relTol, 1.0) < M.threshold;
}

// ---------------------------------------------------------------------------
// Light-like planar trajectories

struct LightlikePeriod {
  int n;
  int k;
};

/// Smallest even n (with k < n/2 coprime to n/2) such that
/// arctan sqrt(a/b) = k pi / n.
inline std::optional<LightlikePeriod> lightlike_period(double a, double b, int maxN) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "a and b must be positive");
  const double theta = std::atan(std::sqrt(a / b));
  for (int n = 4; n <= maxN; n += 2)
    for (int k = 1; k < n / 2; ++k)
      if (std::gcd(k, n / 2) == 1 && std::abs(theta - k * std::numbers::pi / n) <= 1e-12) return LightlikePeriod{n, k};
  return std::nullopt;
}

inline int euler_phi(int n) {
  int r = n;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      r -= r / p;
    }
  if (n > 1) r -= r / n;
  return r;
}

/// Number of axis ratios a/b whose light-like trajectories are n-periodic.
inline int count_axis_ratios(int n) {
  if (n % 2 != 0) throw Error(ErrorCode::OddPeriod, "light-like periods are even");
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "period must be at least 4");
  return n % 4 == 0 ? euler_phi(n) / 4 : euler_phi(n) / 2;
}

// ---------------------------------------------------------------------------
// Planar search

struct SearchGrid {
  int pointsPerInterval = 4000;
  int bisectionSteps = 200;
};

namespace detail {

// Determinant of the square planar Cayley matrix of normalized coefficients;
// its sign is that of the unnormalized one.
inline double plane_cayley_det(const ConfocalFamily& fam, double alpha, int n) {
  CausticSet c = make_caustic_set({alpha}, fam);
  const auto s = cayley_shape(2, n);
  const auto B = normalized_series(fam, c, s.maxIndex);
  return cayley_matrix(B, 2, n).entries.determinant();
}

}  // namespace detail

/// All caustic parameters alpha of a planar family for which the Cayley
/// condition of period n holds, located as sign changes of the Cayley
/// determinant over the whole line minus {-b, 0, a}.
inline std::vector<double> find_periodic_caustics_plane(const ConfocalFamily& fam, int n,
                                                        const SearchGrid& grid = {}) {
  if (fam.dim() != 2) throw Error(ErrorCode::WrongDimension, "needs a planar family");
  const double a = fam.a(0), b = fam.a(1);
  const int N = std::max(grid.pointsPerInterval, 8);

  // each interval is covered by alpha = phi(u), u in (0, 1)
  struct Piece {
    double lo, hi;
    int unbounded;  // -1: (-inf, hi), +1: (lo, inf), 0: bounded
  };
  const std::vector<Piece> pieces{{-kInfinity, -b, -1}, {-b, 0.0, 0}, {0.0, a, 0}, {a, kInfinity, 1}};
  auto map = [&](const Piece& p, double u) {
    const double s = a + b;
    if (p.unbounded < 0) return p.hi - s * std::tan(u * std::numbers::pi / 2.0);
    if (p.unbounded > 0) return p.lo + s * std::tan(u * std::numbers::pi / 2.0);
    return p.lo + (p.hi - p.lo) * u;
  };

  std::vector<double> roots;
  for (const Piece& p : pieces) {
    auto f = [&](double u) { return detail::plane_cayley_det(fam, map(p, u), n); };
    double u0 = 1.0 / (N + 1), f0 = f(u0);
    for (int i = 2; i <= N; ++i) {
      const double u1 = static_cast<double>(i) / (N + 1), f1 = f(u1);
      if (f0 == 0.0) {
        roots.push_back(map(p, u0));
      } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
        double lo = u0, hi = u1, flo = f0;
        for (int it = 0; it < grid.bisectionSteps; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const double fm = f(mid);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        // finish in alpha itself: u-resolution is coarse on the unbounded pieces
        double alo = map(p, lo), ahi = map(p, hi);
        if (alo > ahi) std::swap(alo, ahi);
        const bool slo = detail::plane_cayley_det(fam, alo, n) < 0.0;
        for (int it = 0; it < grid.bisectionSteps; ++it) {
          const double mid = 0.5 * (alo + ahi);
          if (mid <= alo || mid >= ahi) break;
          const double fm = detail::plane_cayley_det(fam, mid, n);
          if (fm == 0.0) {
            alo = ahi = mid;
            break;
          }
          if ((fm < 0.0) == slo) {
            alo = mid;
          } else {
            ahi = mid;
          }
        }
        roots.push_back(0.5 * (alo + ahi));
      }
      u0 = u1;
      f0 = f1;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// ---------------------------------------------------------------------------
// Poncelet harness

struct PonceletReport {
  bool condition = false;
  int n = 0;
  std::vector<double> caustics;
  int samples = 0;
  int closed = 0;
  double worstPositionError = 0.0;
  double worstDirectionError = 0.0;
};

struct PonceletOptions {
  unsigned seed = 2024;
  double tol = 1e-6;
  int attemptsPerSample = 200;
  double relTol = 1e-9;
  bool parallel = true;
};

namespace detail {

struct SampleOutcome {
  bool closed = false;
  double positionError = kInfinity;
  double directionError = kInfinity;
};

inline Vector random_boundary_point(const ConfocalFamily& fam, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  Vector u(fam.dim());
  for (int i = 0; i < fam.dim(); ++i) u(i) = normal(rng);
  double s = 0.0;
  for (int i = 0; i < fam.dim(); ++i) s += u(i) * u(i) / fam.a(i);
  return u / std::sqrt(s);
}

inline SampleOutcome poncelet_sample(const ConfocalFamily& fam, const CausticSet& c, int n, unsigned seed,
                                     const PonceletOptions& opt) {
  std::mt19937 rng(seed);
  for (int attempt = 0; attempt < opt.attemptsPerSample; ++attempt) {
    const Vector x = random_boundary_point(fam, rng);
    std::vector<Vector> dirs;
    try {
      dirs = direction_with_caustics(fam, x, c, DirectionSearch{64, 1, static_cast<unsigned>(rng())});
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoSolution) continue;
      throw;
    }
    Vector v = dirs.front();
    if (quadric_gradient(fam, 0.0, x).dot(v) > 0.0) v = -v;  // point inward

    TraceOptions topt;
    topt.trackCaustics = false;
    std::optional<Trajectory> tr;
    try {
      tr = trace(fam, x, v, n + 1, topt);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NumericalStall) continue;
      throw;
    }
    SampleOutcome out;
    for (std::size_t k = 1; k < tr->bounces.size(); ++k) {
      if (tr->reflectionIndex[k] - tr->reflectionIndex[0] != n) continue;
      const auto [dp, dv] = closure_error_at(*tr, k);
      out.positionError = dp;
      out.directionError = dv;
      out.closed = dp <= opt.tol && dv <= opt.tol;
    }
    return out;
  }
  throw Error(ErrorCode::ConstructionFailure, "could not realize the caustics at sampled boundary points");
}

}  // namespace detail

/// Traces `samples` trajectories from random boundary points sharing the
/// given caustics and checks each closes after n reflections.
inline PonceletReport poncelet_verify(const ConfocalFamily& fam, const CausticSet& c, int n, int samples,
                                      const PonceletOptions& opt = {}) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  PonceletReport rep;
  rep.n = n;
  rep.caustics = c.params;
  rep.samples = samples;
  rep.condition = cayley_condition(fam, c, n, opt.relTol);
  if (!rep.condition)
    throw Error(ErrorCode::ConditionNotSatisfied, "Cayley condition fails for period " + std::to_string(n));

  std::vector<detail::SampleOutcome> outcomes(samples);
  if (opt.parallel) {
    std::vector<std::future<detail::SampleOutcome>> jobs;
    for (int s = 0; s < samples; ++s)
      jobs.push_back(std::async(std::launch::async, detail::poncelet_sample, std::cref(fam), std::cref(c), n,
                                opt.seed + static_cast<unsigned>(s), std::cref(opt)));
    for (int s = 0; s < samples; ++s) outcomes[s] = jobs[s].get();
  } else {
    for (int s = 0; s < samples; ++s)
      outcomes[s] = detail::poncelet_sample(fam, c, n, opt.seed + static_cast<unsigned>(s), opt);
  }
  for (const auto& o : outcomes) {
    rep.closed += o.closed ? 1 : 0;
    rep.worstPositionError = std::max(rep.worstPositionError, o.positionError);
    rep.worstDirectionError = std::max(rep.worstDirectionError, o.directionError);
  }
  return rep;
}

}  // namespace pbl
