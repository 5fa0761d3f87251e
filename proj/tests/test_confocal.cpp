#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pbl/billiard.hpp"
#include "pbl/confocal.hpp"
#include "support.hpp"

using namespace pbl;
using namespace testing_support;

namespace {

ConfocalFamily fam3() { return ConfocalFamily(Signature(2, 1), {5, 3, 2}); }

template <class F>
void expect_code(ErrorCode code, F f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Family, Validation) {
  EXPECT_NO_THROW(fam3());
  expect_code(ErrorCode::InvalidArgument, [] { ConfocalFamily(Signature(2, 1), {3, 5, 2}); });
  expect_code(ErrorCode::InvalidArgument, [] { ConfocalFamily(Signature(1, 2), {5, 3, 2}); });
  expect_code(ErrorCode::InvalidArgument, [] { ConfocalFamily(Signature(1, 1), {2, -1}); });
  expect_code(ErrorCode::DimensionMismatch, [] { ConfocalFamily(Signature(1, 1), {2, 1, 3}); });
}

TEST(EvaluateQuadric, Examples) {
  const auto f = fam3();
  EXPECT_NEAR(evaluate_quadric(f, 0.0, vec({std::sqrt(5.0), 0, 0})), 0.0, 1e-15);
  EXPECT_EQ(evaluate_quadric(f, 0.0, vec({0, 0, 0})), -1.0);
  expect_code(ErrorCode::DegenerateParameter, [&] { evaluate_quadric(f, 3.0, vec({1, 1, 1})); });
  expect_code(ErrorCode::DegenerateParameter, [&] { evaluate_quadric(f, -2.0, vec({1, 1, 1})); });
}

TEST(Jacobi, CenterAndVertex) {
  const auto f = fam3();
  auto J = jacobi_coordinates(f, vec({0, 0, 0}));
  ASSERT_TRUE(J.all_real());
  ASSERT_EQ(J.real.size(), 3u);
  EXPECT_NEAR(J.real[0], -2.0, 1e-12);
  EXPECT_NEAR(J.real[1], 3.0, 1e-12);
  EXPECT_NEAR(J.real[2], 5.0, 1e-12);

  J = jacobi_coordinates(f, vec({std::sqrt(5.0), 0, 0}));
  ASSERT_EQ(J.real.size(), 3u);
  EXPECT_NEAR(J.real[0], -2.0, 1e-12);
  EXPECT_NEAR(J.real[1], 0.0, 1e-12);
  EXPECT_NEAR(J.real[2], 3.0, 1e-12);
}

TEST(Jacobi, InteriorPointAgainstBisection) {
  const auto f = fam3();
  const Vector x = vec({1, 1, 0.5});
  const auto J = jacobi_coordinates(f, x);
  ASSERT_EQ(J.real.size(), 3u);
  const std::vector<std::pair<double, double>> iv{{-2, 0}, {0, 3}, {3, 5}};
  for (int i = 0; i < 3; ++i) {
    auto g = [&](double l) { return x(0) * x(0) / (5 - l) + x(1) * x(1) / (3 - l) + x(2) * x(2) / (2 + l) - 1; };
    const double w = iv[i].second - iv[i].first;
    const double oracle = bisect(g, iv[i].first + 1e-12 * w, iv[i].second - 1e-12 * w);
    EXPECT_NEAR(J.real[i], oracle, 1e-10);
  }
}

TEST(Jacobi, OnePerIntervalForInteriorPoints) {
  std::mt19937 rng(3);
  for (const Signature& sig : all_signatures()) {
    const ConfocalFamily f = random_family(rng, sig);
    const auto iv = jacobi_intervals(f);
    for (int s = 0; s < 200; ++s) {
      const Vector x = random_interior(rng, f);
      const auto J = jacobi_coordinates(f, x);
      ASSERT_TRUE(J.all_real());
      ASSERT_EQ(static_cast<int>(J.real.size()), f.dim());
      for (int i = 0; i < f.dim(); ++i) {
        EXPECT_GT(J.real[i], iv[i].first);
        EXPECT_LT(J.real[i], iv[i].second);
      }
      // exactly two coordinates between -a_{k+1} and a_k, of opposite sign
      const double lo = -f.a(sig.k()), hi = f.a(sig.k() - 1);
      int neg = 0, pos = 0;
      for (double r : J.real) {
        if (r > lo && r < 0) ++neg;
        if (r > 0 && r < hi) ++pos;
      }
      EXPECT_EQ(neg, 1);
      EXPECT_EQ(pos, 1);
    }
  }
}

TEST(Jacobi, ComplexPairCountsTwo) {
  // far outside along a light-like direction the coordinates need not all be real
  const auto f = fam3();
  std::mt19937 rng(5);
  int complexSeen = 0;
  for (int s = 0; s < 2000; ++s) {
    const Vector x = random_vector(rng, 3) * 4.0;
    const auto J = jacobi_coordinates(f, x);
    EXPECT_EQ(static_cast<int>(J.real.size()) + (J.complex_pair ? 2 : 0), 3);
    if (J.complex_pair) {
      ++complexSeen;
      // the conjugate pair really solves the equation
      std::complex<double> l = *J.complex_pair, s2 = -1.0;
      for (int i = 0; i < 3; ++i) s2 += x(i) * x(i) / (f.a(i) - f.eps(i) * l);
      EXPECT_LT(std::abs(s2), 1e-8);
    }
  }
  EXPECT_GT(complexSeen, 0);
}

TEST(Caustics, PlanarExamples) {
  const ConfocalFamily f(Signature(1, 1), {2, 1});
  auto c = caustics(f, Line{vec({0, 0}), vec({1, 1})});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(std::isinf(c.params[0]));

  c = caustics(f, Line{vec({0, 0.5}), vec({1, 0})});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c.params[0], -0.75, 1e-14);
}

TEST(Caustics, MissingLineRejected) {
  expect_code(ErrorCode::NoIntersection,
              [] { caustics(fam3(), Line{vec({10, 0, 0}), vec({0, 1, 0})}); });
}

TEST(Caustics, MatchDiscriminantScan) {
  std::mt19937 rng(17);
  for (const Signature& sig : {Signature(2, 1), Signature(1, 2), Signature(2, 2)}) {
    const ConfocalFamily f = random_family(rng, sig);
    for (int s = 0; s < 40; ++s) {
      const Line line = random_chord(rng, f);
      const auto c = caustics(f, line);
      std::vector<double> breaks = f.sorted_poles();
      breaks.insert(breaks.begin(), {-1e7, -1e5, -1e3});
      breaks.insert(breaks.end(), {1e3, 1e5, 1e7});
      auto disc = [&](double l) { return tangency_discriminant(f, l, line.base, line.dir); };
      const auto oracle = scan_roots(disc, breaks, 20000);
      ASSERT_EQ(oracle.size(), c.size()) << ::testing::PrintToString(c.params) << " vs "
                                         << ::testing::PrintToString(oracle) << " poles "
                                         << ::testing::PrintToString(f.sorted_poles());
      for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_NEAR(c.params[i], oracle[i], 1e-9 * std::max(1.0, std::abs(oracle[i])));
    }
  }
}

TEST(Caustics, AxisParallelDirectionsUseFallback) {
  // v_2 = 0 puts a root of the direction polynomial onto a pole
  const auto f = fam3();
  const Line line{vec({0.3, 0.2, 0.1}), vec({1, 0, 0.5})};
  const auto c = caustics(f, line);
  ASSERT_EQ(c.size(), 2u);
  auto disc = [&](double l) { return tangency_discriminant(f, l, line.base, line.dir); };
  const auto oracle = scan_roots(disc, {-1e3, -2.0, 3.0, 5.0, 1e3}, 20000);
  ASSERT_EQ(oracle.size(), 2u);
  EXPECT_NEAR(c.params[0], oracle[0], 1e-9);
  EXPECT_NEAR(c.params[1], oracle[1], 1e-9);
  auto P = caustic_polynomial(f, line.base, line.dir);
  for (double a : c.params) EXPECT_LE(std::abs(P(a)), 1e-12 * P.magnitude(a));
}

TEST(Caustics, InvariantUnderReflection) {
  std::mt19937 rng(23);
  const auto f = fam3();
  for (int s = 0; s < 100; ++s) {
    const Line line = random_chord(rng, f);
    const auto ts = line_quadric_intersections(f, 0.0, line);
    ASSERT_EQ(ts.size(), 2u);
    const Vector p = line.base + ts[1] * line.dir;
    const auto [vout, twice] = reflect_at_boundary(f, p, line.dir);
    const auto before = caustics(f, line), after = caustics(f, Line{p, vout});
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t i = 0; i < before.size(); ++i)
      EXPECT_NEAR(after.params[i], before.params[i], 1e-9 * std::max(1.0, std::abs(before.params[i])));
  }
}

TEST(IntegralsF, Examples) {
  const auto f = fam3();
  auto F = integrals_F(f, vec({1, 0, 0}), vec({0, 1, 1}));
  EXPECT_NEAR(F[0] + F[1] + F[2], 0.0, 1e-14);
  F = integrals_F(f, vec({0, 0, 0}), vec({1, 0, 0}));
  EXPECT_EQ(F[0], 1.0);
  EXPECT_EQ(F[1], 0.0);
  EXPECT_EQ(F[2], 0.0);
  expect_code(ErrorCode::ZeroVector, [&] { integrals_F(f, vec({0, 0, 0}), vec({0, 0, 0})); });
}

TEST(IntegralsF, SumIsScalarSquare) {
  std::mt19937 rng(29);
  for (const Signature& sig : all_signatures()) {
    const ConfocalFamily f = random_family(rng, sig);
    for (int s = 0; s < 100; ++s) {
      const Vector x = random_vector(rng, f.dim()), v = random_vector(rng, f.dim());
      const auto F = integrals_F(f, x, v);
      double sum = 0.0, mag = 0.0;
      for (double q : F) {
        sum += q;
        mag += std::abs(q);
      }
      EXPECT_NEAR(sum, dot(v, v, sig), 1e-12 * mag);
    }
  }
}

TEST(CausticPolynomial, LeadingCoefficientIsScalarSquare) {
  std::mt19937 rng(31);
  for (const Signature& sig : all_signatures()) {
    const ConfocalFamily f = random_family(rng, sig);
    for (int s = 0; s < 50; ++s) {
      const Vector x = random_vector(rng, f.dim()), v = random_vector(rng, f.dim());
      const Polynomial P = caustic_polynomial(f, x, v);
      ASSERT_EQ(P.degree(), f.dim() - 1);
      EXPECT_NEAR(P.leading(), dot(v, v, sig), 1e-10 * v.squaredNorm() * (1 + x.squaredNorm()));
    }
  }
}

TEST(CausticPolynomial, DiscriminantIdentities) {
  // the tangency discriminant equals sum eps_i F_i / D_i, and P is that sum
  // with denominators cleared (up to the sign fixing its leading coefficient)
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> lam(-8.0, 8.0);
  for (const Signature& sig : {Signature(2, 1), Signature(2, 2), Signature(1, 3)}) {
    const ConfocalFamily f = random_family(rng, sig);
    for (int s = 0; s < 100; ++s) {
      const Vector x = random_vector(rng, f.dim()), v = random_vector(rng, f.dim());
      const double l = lam(rng);
      if (f.is_degenerate(l, 1e-3)) continue;
      const auto F = integrals_F(f, x, v);
      double eq6 = 0.0, prod = 1.0, mag = 0.0;
      for (int i = 0; i < f.dim(); ++i) {
        eq6 += f.eps(i) * F[i] / f.denom(i, l);
        mag += std::abs(F[i] / f.denom(i, l));
        prod *= f.denom(i, l);
      }
      const double eq5 = tangency_discriminant(f, l, x, v);
      EXPECT_NEAR(eq5, eq6, 1e-10 * mag);
      const double sign = sig.k() % 2 == 1 ? 1.0 : -1.0;
      const Polynomial P = caustic_polynomial(f, x, v);
      EXPECT_NEAR(P(l), sign * prod * eq5, 1e-10 * std::abs(prod) * mag);
    }
  }
}

TEST(TypeFromCaustics, Examples) {
  const ConfocalFamily f2(Signature(1, 1), {2, 1});
  EXPECT_EQ(trajectory_type_from_caustics(f2, make_caustic_set({kInfinity}, f2)), LineType::LightLike);
  EXPECT_EQ(trajectory_type_from_caustics(f2, make_caustic_set({-0.75}, f2)), LineType::SpaceLike);
  EXPECT_EQ(trajectory_type_from_caustics(f2, make_caustic_set({0.75}, f2)), LineType::TimeLike);
  expect_code(ErrorCode::AmbiguousSign,
              [&] { trajectory_type_from_caustics(f2, make_caustic_set({0.0}, f2)); });
}

TEST(TypeFromCaustics, MatchesDirectionOnRandomChords) {
  std::mt19937 rng(41);
  for (const Signature& sig : {Signature(2, 1), Signature(1, 2), Signature(2, 2)}) {
    const ConfocalFamily f = random_family(rng, sig);
    for (int s = 0; s < 300; ++s) {
      const Line line = random_chord(rng, f);
      EXPECT_EQ(trajectory_type_from_caustics(f, caustics(f, line)), line_type(line.dir, sig));
    }
  }
}

TEST(Interlacing, SpaceLikeChord) {
  const auto f = fam3();
  const auto r = interlacing_report(f, Line{vec({0.2, 0.1, 0.3}), vec({1, 0.5, 0.2})});
  EXPECT_EQ(r.type, LineType::SpaceLike);
  EXPECT_EQ(r.p(), 3u);
  EXPECT_EQ(r.q(), 2u);
  EXPECT_EQ(r.b.back(), 5.0);
  EXPECT_TRUE(r.passed());
}

TEST(Interlacing, LightLikeChord) {
  const auto f = fam3();
  const auto r = interlacing_report(f, Line{vec({0.2, 0.1, 0.3}), vec({0.6, 0.8, 1.0})});
  EXPECT_EQ(r.type, LineType::LightLike);
  ASSERT_GE(r.p(), 2u);
  EXPECT_TRUE(std::isinf(r.b.back()));
  EXPECT_EQ(r.b[r.p() - 2], 5.0);
  EXPECT_TRUE(std::isinf(r.alphas[1]));  // alpha_k with k = 2
  EXPECT_TRUE(r.passed());
}

TEST(Interlacing, RandomChordsAllSignatures) {
  std::mt19937 rng(43);
  for (const Signature& sig : all_signatures()) {
    const ConfocalFamily f = random_family(rng, sig);
    for (int s = 0; s < 200; ++s) {
      const auto r = interlacing_report(f, random_chord(rng, f));
      EXPECT_EQ(r.p() + r.q(), static_cast<std::size_t>(2 * f.dim() - 1));
      EXPECT_TRUE(r.passed());
    }
  }
}

TEST(Interlacing, LightLikeChordsWithSingleSpaceAxis) {
  // k = 1: the clause over alpha_1..alpha_{k-1} is empty
  std::mt19937 rng(47);
  const ConfocalFamily f(Signature(1, 2), {4, 1, 3});
  for (int s = 0; s < 100; ++s) {
    Vector v = random_vector(rng, 3);
    v(0) = std::sqrt(v(1) * v(1) + v(2) * v(2));
    const auto r = interlacing_report(f, Line{random_interior(rng, f), v});
    EXPECT_EQ(r.type, LineType::LightLike);
    EXPECT_TRUE(r.passed());
  }
}

TEST(Interlacing, Admissibility) {
  const ConfocalFamily f2(Signature(1, 1), {2, 1});
  EXPECT_TRUE(admissible_caustics(f2, make_caustic_set({2.0 / 3.0}, f2)));
  EXPECT_TRUE(admissible_caustics(f2, make_caustic_set({-2.0}, f2)));
  // in d = 3 two space-like caustics cannot both exceed a_1
  const auto f = fam3();
  EXPECT_FALSE(admissible_caustics(f, make_caustic_set({6.0, 7.0}, f)));
}
