#pragma once

// Dense real polynomials (ascending coefficients) and bracketed real-root
// isolation. Degrees here stay below ~2d, so nothing fancier than Horner and
// bisection is needed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pbl {

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

  /// (root - x), the linear factor used for caustic and axis terms.
  static Polynomial linear(double constant, double slope) { return Polynomial({constant, slope}); }

  int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
  std::span<const double> coeffs() const { return c_; }
  double coeff(int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }

  double operator()(double x) const {
    double r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }

  /// Sum |c_i| |x|^i: the scale against which a computed value is "zero".
  double magnitude(double x) const {
    double r = 0.0;
    const double ax = std::abs(x);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * ax + std::abs(*it);
    return r;
  }

  Polynomial derivative() const {
    std::vector<double> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(static_cast<double>(i) * c_[i]);
    return Polynomial(std::move(d));
  }

  Polynomial operator*(const Polynomial& o) const {
    if (c_.empty() || o.c_.empty()) return {};
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Polynomial(std::move(r));
  }

  Polynomial operator+(const Polynomial& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return Polynomial(std::move(r));
  }

  Polynomial operator*(double s) const {
    std::vector<double> r = c_;
    for (double& x : r) x *= s;
    return Polynomial(std::move(r));
  }

  /// Quotient by (x - root); the remainder is dropped.
  Polynomial deflate(double root) const {
    if (c_.size() < 2) return {};
    std::vector<double> q(c_.size() - 1);
    double carry = 0.0;
    for (std::size_t i = c_.size(); i-- > 1;) {
      carry = carry * root + c_[i];
      q[i - 1] = carry;
    }
    return Polynomial(std::move(q));
  }

  /// Zero the leading coefficient (used when it is known to vanish).
  Polynomial drop_leading() const {
    std::vector<double> r = c_;
    if (!r.empty()) r.pop_back();
    return Polynomial(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

struct RealRoot {
  double value;
  int multiplicity;
};

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Bisection on [lo, hi] for a polynomial with p(lo) p(hi) < 0.
inline double bisect(const Polynomial& p, double lo, double hi) {
  int slo = sign_of(p(lo));
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int sm = sign_of(p(mid));
    if (sm == 0) return mid;
    if (sm == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double cauchy_bound(const Polynomial& p) {
  double m = 0.0;
  const double lead = std::abs(p.leading());
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, std::abs(p.coeff(i)) / lead);
  return 1.0 + m;
}

inline bool near_zero(const Polynomial& p, double x, double rel) {
  return std::abs(p(x)) <= rel * p.magnitude(x);
}

// Real roots in [lo, hi]. Critical points (roots of p') split the interval
// into monotone pieces, each holding at most one simple root; a critical
// point where p itself is negligible is reported as a multiple root.
inline std::vector<RealRoot> isolate(const Polynomial& p, double lo, double hi, double rel) {
  std::vector<RealRoot> out;
  if (p.degree() <= 0) return out;
  if (p.degree() == 1) {
    const double r = -p.coeff(0) / p.coeff(1);
    if (r >= lo && r <= hi) out.push_back({r, 1});
    return out;
  }
  std::vector<RealRoot> knots{{lo, 0}};
  for (const RealRoot& c : isolate(p.derivative(), lo, hi, rel))
    if (c.value > lo && c.value < hi) knots.push_back(c);
  knots.push_back({hi, 0});

  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double u = knots[i].value, w = knots[i + 1].value;
    const bool zu = i > 0 && near_zero(p, u, rel);
    const bool zw = i + 2 < knots.size() && near_zero(p, w, rel);
    // a root of p' of multiplicity m that is also a root of p has multiplicity m + 1
    if (zu) out.push_back({u, knots[i].multiplicity + 1});
    if (zu || zw) continue;
    if (sign_of(p(u)) * sign_of(p(w)) < 0) out.push_back({bisect(p, u, w), 1});
  }
  return out;
}

}  // namespace detail

/// All real roots with multiplicity, ascending. `rel` is the relative
/// threshold (against Sum|c_i||x|^i) used to treat a value as zero.
inline std::vector<RealRoot> real_roots(const Polynomial& p, double rel = 1e-12) {
  if (p.degree() <= 0) return {};
  const double bound = detail::cauchy_bound(p);
  return detail::isolate(p, -bound, bound, rel);
}

/// Real roots inside the open interval (lo, hi).
inline std::vector<RealRoot> real_roots_in(const Polynomial& p, double lo, double hi,
                                           double rel = 1e-12) {
  std::vector<RealRoot> out;
  for (const RealRoot& r : real_roots(p, rel))
    if (r.value > lo && r.value < hi) out.push_back(r);
  return out;
}

/// All complex roots via the companion matrix (fallback for awkward cases).
inline std::vector<std::complex<double>> complex_roots(const Polynomial& p) {
  const int n = p.degree();
  std::vector<std::complex<double>> out;
  if (n <= 0) return out;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -p.coeff(i) / p.leading();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

}  // namespace pbl
