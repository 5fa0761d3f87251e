#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "pbl/periodicity.hpp"
#include "support.hpp"

using namespace pbl;
using namespace testing_support;
using std::numbers::pi;

namespace {

ConfocalFamily fam2() { return ConfocalFamily(Signature(1, 1), {2, 1}); }

template <class F>
void expect_code(ErrorCode code, F f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

void expect_coeffs(const std::vector<double>& got, const Polynomial& want, double tol) {
  ASSERT_EQ(static_cast<int>(got.size()) - 1, want.degree());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want.coeff(i), tol) << "coefficient " << i;
}

// Hankel determinant of B_3..B_{2m-1} from the raw series
double hankel_det(const ConfocalFamily& f, double alpha, int m) {
  const auto B = sqrt_series(build_P1(f, make_caustic_set({alpha}, f)), 2 * m - 1);
  Eigen::MatrixXd H(m - 1, m - 1);
  for (int r = 0; r < m - 1; ++r)
    for (int c = 0; c < m - 1; ++c) H(r, c) = B[3 + r + c];
  return H.determinant();
}

}  // namespace

TEST(SqrtSeries, Examples) {
  auto B = sqrt_series({1, -2, 1}, 4);
  EXPECT_NEAR(B[0], 1, 1e-15);
  EXPECT_NEAR(B[1], -1, 1e-15);
  for (int i = 2; i <= 4; ++i) EXPECT_NEAR(B[i], 0, 1e-15);
  B = sqrt_series({4}, 3);
  EXPECT_EQ(B, (std::vector<double>{2, 0, 0, 0}));
  B = sqrt_series({1, 1}, 3);
  EXPECT_NEAR(B[1], 0.5, 1e-15);
  EXPECT_NEAR(B[2], -0.125, 1e-15);
  EXPECT_NEAR(B[3], 0.0625, 1e-15);
  expect_code(ErrorCode::NonpositiveConstantTerm, [] { sqrt_series({0, 1}, 2); });
  expect_code(ErrorCode::NonpositiveConstantTerm, [] { sqrt_series({-1, 1}, 2); });
}

TEST(SqrtSeries, SquaringIdentity) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    std::vector<double> q(5);
    for (double& x : q) x = u(rng);
    q[0] = 0.5 + std::abs(q[0]);
    const int N = 12;
    const auto B = sqrt_series(q, N);
    double scale = 0;
    for (double x : q) scale = std::max(scale, std::abs(x));
    for (int n = 0; n <= N; ++n) {
      double c = 0;
      for (int i = 0; i <= n; ++i) c += B[i] * B[n - i];
      const double want = n < 5 ? q[n] : 0.0;
      // the series grows like (1/rho)^n, so compare against the coefficient scale at order n
      double mag = 0;
      for (int i = 0; i <= n; ++i) mag += std::abs(B[i] * B[n - i]);
      EXPECT_NEAR(c, want, 1e-12 * std::max(scale, mag)) << "order " << n;
    }
  }
}

TEST(BuildP1, Examples) {
  const auto f = fam2();
  const Polynomial want = Polynomial::linear(2.0 / 3.0, -1) * Polynomial::linear(2, -1) * Polynomial::linear(1, 1);
  expect_coeffs(build_P1(f, make_caustic_set({2.0 / 3.0}, f)), want, 1e-15);
  expect_coeffs(build_P1(f, make_caustic_set({kInfinity}, f)),
                Polynomial::linear(2, -1) * Polynomial::linear(1, 1), 1e-15);
  expect_code(ErrorCode::DegenerateConfiguration, [&] { build_P1(f, make_caustic_set({2.0}, f)); });
  expect_code(ErrorCode::DegenerateConfiguration, [&] { build_P1(f, make_caustic_set({-1.0}, f)); });
}

TEST(CayleyMatrix, Shapes) {
  std::vector<double> B(12);
  for (int i = 0; i < 12; ++i) B[i] = i;
  auto M = cayley_matrix(B, 2, 4);
  ASSERT_EQ(M.entries.rows(), 1);
  ASSERT_EQ(M.entries.cols(), 1);
  EXPECT_EQ(M.entries(0, 0), 3);
  M = cayley_matrix(B, 2, 3);
  ASSERT_EQ(M.entries.size(), 1);
  EXPECT_EQ(M.entries(0, 0), 2);
  M = cayley_matrix(B, 3, 6);
  ASSERT_EQ(M.entries.rows(), 2);
  ASSERT_EQ(M.entries.cols(), 1);
  EXPECT_EQ(M.entries(0, 0), 4);
  EXPECT_EQ(M.entries(1, 0), 5);
  M = cayley_matrix(B, 2, 8);
  ASSERT_EQ(M.entries.rows(), 3);
  ASSERT_EQ(M.entries.cols(), 3);
  EXPECT_EQ(M.index[2][2], 7);
  // odd n, d = 3: rows B_3.., columns m - 1
  M = cayley_matrix(B, 3, 7);
  ASSERT_EQ(M.entries.rows(), 3);
  ASSERT_EQ(M.entries.cols(), 2);
  EXPECT_EQ(M.index[0][0], 3);
  EXPECT_EQ(M.index[2][1], 6);
}

TEST(CayleyMatrix, Errors) {
  std::vector<double> B(12, 1.0);
  expect_code(ErrorCode::VacuousCondition, [&] { cayley_matrix(B, 3, 4); });
  expect_code(ErrorCode::VacuousCondition, [&] { cayley_matrix(B, 3, 3); });
  expect_code(ErrorCode::InvalidArgument, [&] { cayley_matrix(B, 2, 2); });
  expect_code(ErrorCode::InsufficientOrder, [&] { cayley_matrix(std::vector<double>(3, 1.0), 2, 4); });
}

TEST(Cayley, Examples) {
  const auto f = fam2();
  EXPECT_TRUE(cayley_condition(f, make_caustic_set({2.0 / 3.0}, f), 4));
  EXPECT_FALSE(cayley_condition(f, make_caustic_set({0.5}, f), 4));
  EXPECT_TRUE(cayley_condition(f, make_caustic_set({-2.0}, f), 4));
  EXPECT_TRUE(cayley_condition(f, make_caustic_set({-2.0 / 3.0}, f), 4));
  EXPECT_FALSE(cayley_condition(f, make_caustic_set({2.0 / 3.0}, f), 5));
}

TEST(Cayley, ExactMode) {
  const Signature s(1, 1);
  const std::vector<Rational> ax{Rational(2), Rational(1)};
  EXPECT_TRUE(cayley_condition_exact(s, ax, {Rational(2, 3)}, 4));
  EXPECT_TRUE(cayley_condition_exact(s, ax, {Rational(-2)}, 4));
  EXPECT_TRUE(cayley_condition_exact(s, ax, {Rational(-2, 3)}, 4));
  EXPECT_FALSE(cayley_condition_exact(s, ax, {Rational(1, 2)}, 4));
  EXPECT_FALSE(cayley_condition_exact(s, ax, {Rational(2, 3) + Rational(1, 1000000000)}, 4));
  // 2/3 is not exactly representable, so the binary value misses the root
  const auto f = fam2();
  EXPECT_FALSE(cayley_condition(f, make_caustic_set({2.0 / 3.0}, f), 4, 1e-9, true));
  EXPECT_TRUE(cayley_condition(f, make_caustic_set({-2.0}, f), 4, 1e-9, true));
}

TEST(Cayley, MatchesHankelDeterminant) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> A(1.2, 5.0), Bd(0.5, 1.0);
  for (int m : {2, 3, 4}) {
    for (int s = 0; s < 100; ++s) {
      const double a = A(rng), b = Bd(rng) * a * 0.8;
      const ConfocalFamily f(Signature(1, 1), {a, b});
      // a generic alpha: determinant away from zero, condition false
      const double alpha = std::uniform_real_distribution<double>(0.05 * b, 0.95 * b)(rng);
      const double det = hankel_det(f, alpha, m);
      const bool cond = cayley_condition(f, make_caustic_set({alpha}, f), 2 * m);
      if (std::abs(det) > 1e-6) EXPECT_FALSE(cond) << "det " << det;
    }
    // at determinant roots the condition holds
    const ConfocalFamily f(Signature(1, 1), {3, 1.3});
    const auto roots = scan_roots([&](double al) { return hankel_det(f, al, m); }, {1e-6, 1.3 - 1e-6}, 4000);
    for (double r : roots) EXPECT_TRUE(cayley_condition(f, make_caustic_set({r}, f), 2 * m)) << r;
    EXPECT_FALSE(roots.empty());
  }
}

TEST(Search, ExampleSolutions) {
  const auto roots = find_periodic_caustics_plane(fam2(), 4);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], -2.0, 1e-10);
  EXPECT_NEAR(roots[1], -2.0 / 3.0, 1e-10);
  EXPECT_NEAR(roots[2], 2.0 / 3.0, 1e-10);
}

TEST(Search, ClosedFormsForRandomAxes) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.3, 6.0);
  for (int s = 0; s < 20; ++s) {
    double a = u(rng), b = u(rng);
    if (a < b) std::swap(a, b);
    if (a - b < 1e-2) continue;
    const auto roots = find_periodic_caustics_plane(ConfocalFamily(Signature(1, 1), {a, b}), 4);
    ASSERT_EQ(roots.size(), 3u) << a << " " << b;
    EXPECT_NEAR(roots[0], a * b / (b - a), 1e-10 * std::max(1.0, std::abs(roots[0])));
    EXPECT_NEAR(roots[1], -a * b / (a + b), 1e-10);
    EXPECT_NEAR(roots[2], a * b / (a + b), 1e-10);
  }
}

TEST(Search, PeriodThreeMatchesSeriesOracle) {
  const auto f = fam2();
  const auto roots = find_periodic_caustics_plane(f, 3);
  // B_2 vanishes with 4 q0 q2 - q1^2, q = (alpha - l)(2 - l)(1 + l)
  auto B2 = [&](double al) {
    const Polynomial q = Polynomial::linear(al, -1) * Polynomial::linear(2, -1) * Polynomial::linear(1, 1);
    return 4 * q.coeff(0) * q.coeff(2) - q.coeff(1) * q.coeff(1);
  };
  const auto oracle = scan_roots(B2, {-1e4, -1.0, 0.0, 2.0, 1e4}, 40000);
  ASSERT_EQ(roots.size(), oracle.size());
  for (std::size_t i = 0; i < roots.size(); ++i)
    EXPECT_NEAR(roots[i], oracle[i], 1e-9 * std::max(1.0, std::abs(oracle[i])));
}

TEST(Search, ScalingCovariance) {
  for (int n : {4, 5, 6}) {
    const auto r1 = find_periodic_caustics_plane(ConfocalFamily(Signature(1, 1), {2, 1}), n);
    for (double s : {0.5, 3.0}) {
      const auto r2 = find_periodic_caustics_plane(ConfocalFamily(Signature(1, 1), {2 * s, s}), n);
      ASSERT_EQ(r1.size(), r2.size());
      for (std::size_t i = 0; i < r1.size(); ++i)
        EXPECT_NEAR(r2[i], s * r1[i], 1e-9 * std::max(1.0, std::abs(r2[i])));
    }
  }
}

TEST(LightLike, Periods) {
  auto check = [](double a, double b, int n, int k) {
    const auto p = lightlike_period(a, b, 40);
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(p->n, n);
    EXPECT_EQ(p->k, k);
  };
  check(1, 1, 4, 1);
  check(3, 1, 6, 2);
  check(1, 3, 6, 1);
  check(std::pow(std::tan(pi / 8), 2), 1, 8, 1);
  EXPECT_FALSE(lightlike_period(2, 1, 40).has_value());
}

TEST(LightLike, TotientCounts) {
  EXPECT_EQ(count_axis_ratios(6), 1);
  EXPECT_EQ(count_axis_ratios(8), 1);
  EXPECT_EQ(count_axis_ratios(10), 2);
  EXPECT_EQ(count_axis_ratios(12), 1);
  expect_code(ErrorCode::OddPeriod, [] { count_axis_ratios(7); });
  // brute force: distinct ratios tan^2(k pi / n) with k coprime to n/2
  for (int n = 4; n <= 40; n += 2) {
    int count = 0;
    for (int k = 1; k < n / 2; ++k)
      if (std::gcd(k, n / 2) == 1 && lightlike_period(std::pow(std::tan(k * pi / n), 2), 1, n)->n == n) ++count;
    // a/b and b/a describe the same ellipse up to swapping the axes
    EXPECT_EQ(count_axis_ratios(n), count / 2) << n;
  }
}

TEST(Poncelet, FourPeriodic) {
  const auto f = fam2();
  const auto rep = poncelet_verify(f, make_caustic_set({2.0 / 3.0}, f), 4, 20);
  EXPECT_TRUE(rep.condition);
  EXPECT_EQ(rep.closed, 20);
  EXPECT_LT(rep.worstPositionError, 1e-6);
  expect_code(ErrorCode::ConditionNotSatisfied,
              [&] { poncelet_verify(f, make_caustic_set({2.0 / 3.0}, f), 5, 5); });
}

TEST(Poncelet, Deterministic) {
  const auto f = fam2();
  const auto c = make_caustic_set({-2.0 / 3.0}, f);
  PonceletOptions serial;
  serial.parallel = false;
  const auto r1 = poncelet_verify(f, c, 4, 8);
  const auto r2 = poncelet_verify(f, c, 4, 8, serial);
  EXPECT_EQ(r1.closed, r2.closed);
  EXPECT_EQ(r1.worstPositionError, r2.worstPositionError);
}

TEST(Poncelet, SixPeriodicInSpace) {
  // caustic pairs with B_4 = B_5 = 0, by Newton with a finite-difference Jacobian
  const ConfocalFamily f(Signature(2, 1), {5, 3, 2});
  auto F = [&](double x, double y) {
    const auto B = detail::normalized_series(f, make_caustic_set({x, y}, f), 5);
    return Eigen::Vector2d(B[4], B[5]);
  };
  Eigen::Vector2d z(-1.5, 2.0);
  for (int it = 0; it < 60; ++it) {
    const Eigen::Vector2d r = F(z(0), z(1));
    Eigen::Matrix2d J;
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d h = Eigen::Vector2d::Zero();
      h(j) = 1e-7 * std::max(1.0, std::abs(z(j)));
      J.col(j) = (F(z(0) + h(0), z(1) + h(1)) - r) / h(j);
    }
    const Eigen::Vector2d step = J.partialPivLu().solve(r);
    z -= step;
    if (step.norm() < 1e-14) break;
  }
  ASSERT_LE(F(z(0), z(1)).norm(), 1e-10);
  const auto c = make_caustic_set({z(0), z(1)}, f);
  ASSERT_TRUE(admissible_caustics(f, c)) << z.transpose();
  EXPECT_TRUE(cayley_condition(f, c, 6));
  const auto rep = poncelet_verify(f, c, 6, 10);
  EXPECT_EQ(rep.closed, 10);
  EXPECT_LT(rep.worstPositionError, 1e-6);
}
