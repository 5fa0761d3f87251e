#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <random>
#include <vector>

#include "pbl/confocal.hpp"

namespace testing_support {

inline pbl::Vector vec(std::initializer_list<double> xs) {
  pbl::Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline pbl::Vector random_vector(std::mt19937& rng, int d) {
  std::normal_distribution<double> g;
  pbl::Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = g(rng);
  return v;
}

/// Uniform point strictly inside the ellipsoid Q_0 (rejection from the box).
inline pbl::Vector random_interior(std::mt19937& rng, const pbl::ConfocalFamily& fam, double shrink = 0.98) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    pbl::Vector x(fam.dim());
    double s = 0.0;
    for (int i = 0; i < fam.dim(); ++i) {
      x(i) = u(rng) * std::sqrt(fam.a(i));
      s += x(i) * x(i) / fam.a(i);
    }
    if (s < shrink * shrink && s > 1e-6) return x;
  }
}

/// Tangency discriminant of x + t v against Q_lambda, straight from the
/// quadric (no polynomial expansion): (A x.v)^2 - (A v.v)(A x.x - 1).
inline double tangency_discriminant(const pbl::ConfocalFamily& fam, double lambda, const pbl::Vector& x,
                                    const pbl::Vector& v) {
  double xv = 0, vv = 0, xx = -1;
  for (int i = 0; i < fam.dim(); ++i) {
    const double w = 1.0 / (fam.a(i) - fam.eps(i) * lambda);
    xv += w * x(i) * v(i);
    vv += w * v(i) * v(i);
    xx += w * x(i) * x(i);
  }
  return xv * xv - vv * xx;
}

template <class F>
double bisect(F f, double lo, double hi, int steps = 200) {
  double flo = f(lo);
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Sign changes of f on a fine grid of each open interval between
/// consecutive breakpoints, refined by bisection.
template <class F>
std::vector<double> scan_roots(F f, const std::vector<double>& breaks, int perInterval = 4000) {
  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1], w = hi - lo;
    double x0 = lo + w * 1e-9, f0 = f(x0);
    for (int i = 1; i <= perInterval; ++i) {
      const double x1 = i == perInterval ? hi - w * 1e-9 : lo + w * i / perInterval;
      const double f1 = f(x1);
      if ((f0 < 0) != (f1 < 0)) roots.push_back(bisect(f, x0, x1));
      x0 = x1;
      f0 = f1;
    }
  }
  return roots;
}

inline pbl::Line random_chord(std::mt19937& rng, const pbl::ConfocalFamily& fam) {
  return pbl::Line{random_interior(rng, fam), random_vector(rng, fam.dim())};
}

inline std::vector<pbl::Signature> all_signatures() {
  using pbl::Signature;
  return {Signature(1, 1), Signature(2, 1), Signature(1, 2), Signature(2, 2), Signature(1, 3), Signature(3, 1)};
}

inline pbl::ConfocalFamily random_family(std::mt19937& rng, const pbl::Signature& sig) {
  std::uniform_real_distribution<double> u(0.5, 6.0);
  std::vector<double> pos, neg;
  for (int i = 0; i < sig.k(); ++i) pos.push_back(u(rng));
  for (int i = 0; i < sig.l(); ++i) neg.push_back(u(rng));
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end());
  pos.insert(pos.end(), neg.begin(), neg.end());
  return pbl::ConfocalFamily(sig, pos);
}

/// Open intervals holding one Jacobi coordinate each for an interior point:
/// (-a_d,-a_{d-1}), ..., (-a_{k+1}, 0), (0, a_k), ..., (a_2, a_1).
inline std::vector<std::pair<double, double>> jacobi_intervals(const pbl::ConfocalFamily& fam) {
  std::vector<double> p = fam.sorted_poles();
  p.push_back(0.0);
  std::sort(p.begin(), p.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) out.emplace_back(p[i], p[i + 1]);
  return out;
}

}  // namespace testing_support
