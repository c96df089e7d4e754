#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cdd/delta_scalar.hpp"
#include "cdd/error.hpp"
#include "cdd/expr.hpp"
#include "generators.hpp"
#include "numeric.hpp"
#include "reference.hpp"

using namespace cdd;
using cdd::testing::Big;
using cdd::testing::positive_zero;
using cdd::testing::to_double;
using cdd::testing::ulp_distance;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void expect_code(Errc code, auto&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// Working-precision rounding of an exact reference value.
double ref(const Big& v) { return to_double(v); }

}  // namespace

TEST(LiftParameter, DeltaIsZero) {
  EXPECT_EQ(lift_parameter(3.14), DeltaScalar(3.14, 0.0));
  EXPECT_EQ(lift_parameter(0.0), DeltaScalar(0.0, 0.0));
  EXPECT_EQ(lift_parameter(1e300), DeltaScalar(1e300, 0.0));
  EXPECT_TRUE(positive_zero(lift_parameter(-2.0).delta()));
}

TEST(LiftParameter, RejectsNonFinite) {
  expect_code(Errc::invalid_input, [] { lift_parameter(kInf); });
  expect_code(Errc::invalid_input, [] { lift_parameter(kNaN); });
}

TEST(SeedInput, CarriesStep) {
  EXPECT_EQ(seed_input(1.0, 1e-18), DeltaScalar(1.0, 1e-18));
  EXPECT_EQ(seed_input(2.0, 0.0), DeltaScalar(2.0, 0.0));
  EXPECT_EQ(seed_input(-5.0, 0.25), DeltaScalar(-5.0, 0.25));
  expect_code(Errc::invalid_input, [] { seed_input(1.0, kNaN); });
  expect_code(Errc::invalid_input, [] { seed_input(-kInf, 0.0); });
}

TEST(DeltaScalarType, ConstructorRejectsNonFinite) {
  expect_code(Errc::invalid_input, [] { DeltaScalar(kNaN, 0.0); });
  expect_code(Errc::invalid_input, [] { DeltaScalar(0.0, kInf); });
}

TEST(AddSub, Linear) {
  EXPECT_EQ(add(seed_input(1, 1e-18), seed_input(1, 1e-18)), DeltaScalar(2, 2e-18));
  EXPECT_EQ(add(seed_input(0.75, 0.125), lift_parameter(2.0)), DeltaScalar(2.75, 0.125));
  const DeltaScalar self = sub(seed_input(1, 1e-18), seed_input(1, 1e-18));
  EXPECT_EQ(self, DeltaScalar(0, 0));
  EXPECT_TRUE(positive_zero(self.delta()));
  EXPECT_EQ(neg(seed_input(3, 0.5)), DeltaScalar(-3, -0.5));
}

TEST(AddSub, Overflow) {
  expect_code(Errc::overflow, [] { add(lift_parameter(1.7e308), lift_parameter(1.7e308)); });
  expect_code(Errc::overflow, [] { sub(seed_input(0, 1.7e308), seed_input(0, -1.7e308)); });
}

TEST(Mul, Examples) {
  EXPECT_EQ(mul(seed_input(1, 1e-18), seed_input(1, 1e-18)).delta(), 2e-18);
  EXPECT_EQ(mul(lift_parameter(3), lift_parameter(5)), DeltaScalar(15, 0));
  EXPECT_EQ(mul(seed_input(2, 1), seed_input(3, 1)), DeltaScalar(6, 6));
  expect_code(Errc::overflow, [] { mul(lift_parameter(1e200), lift_parameter(1e200)); });
}

TEST(Reciprocal, Examples) {
  EXPECT_EQ(reciprocal(lift_parameter(2)), DeltaScalar(0.5, 0));
  EXPECT_EQ(reciprocal(seed_input(1, 1)), DeltaScalar(1, -0.5));
  const double want = ref(Big(1) / (Big(1) + Big(1e-20)) - 1);
  EXPECT_LE(ulp_distance(reciprocal(seed_input(1, 1e-20)).delta(), want), 1u);
}

TEST(Reciprocal, DomainChecksBothEndpoints) {
  expect_code(Errc::domain, [] { reciprocal(seed_input(0, 1)); });
  expect_code(Errc::domain, [] { reciprocal(seed_input(1, -1)); });
  expect_code(Errc::domain, [] { reciprocal(seed_input(1, -2)); });
  expect_code(Errc::domain, [] { reciprocal(seed_input(-0.5, 1)); });
}

TEST(Div, Examples) {
  EXPECT_EQ(div(lift_parameter(6), lift_parameter(3)), DeltaScalar(2, 0));
  EXPECT_EQ(div(seed_input(1, 1), seed_input(1, 1)), DeltaScalar(1, 0));
  const double want = ref(Big(1) / (Big(1) + Big(1e-18)) - 1);
  EXPECT_LE(ulp_distance(div(lift_parameter(1), seed_input(1, 1e-18)).delta(), want), 1u);
  expect_code(Errc::domain, [] { div(lift_parameter(1), seed_input(2, -2)); });
}

TEST(Div, IsMulOfReciprocalBitwise) {
  cdd::testing::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const DeltaScalar a(cdd::testing::uniform(rng, -3, 3), cdd::testing::uniform(rng, -1, 1));
    const DeltaScalar b(cdd::testing::uniform(rng, 0.5, 3), cdd::testing::uniform(rng, -0.4, 0.4));
    const DeltaScalar q = div(a, b);
    const DeltaScalar m = mul(a, reciprocal(b));
    EXPECT_EQ(std::bit_cast<std::uint64_t>(q.delta()), std::bit_cast<std::uint64_t>(m.delta()));
    EXPECT_EQ(std::bit_cast<std::uint64_t>(q.value()), std::bit_cast<std::uint64_t>(m.value()));
  }
}

TEST(Square, Examples) {
  EXPECT_EQ(square(seed_input(1, 1e-18)), DeltaScalar(1, 2e-18));
  EXPECT_EQ(square(seed_input(0, 0.375)), DeltaScalar(0, 0.375 * 0.375));
  EXPECT_EQ(square(seed_input(3, 1)), DeltaScalar(9, 7));
  expect_code(Errc::overflow, [] { square(lift_parameter(1e160)); });
}

TEST(Sqrt, Examples) {
  EXPECT_EQ(sqrt(lift_parameter(4)), DeltaScalar(2, 0));
  EXPECT_EQ(sqrt(seed_input(1, 3)), DeltaScalar(1, 1));
  const double want = ref(boost::multiprecision::sqrt(Big(1) + Big(1e-18)) - 1);
  EXPECT_LE(ulp_distance(sqrt(seed_input(1, 1e-18)).delta(), want), 1u);
}

TEST(Sqrt, Domain) {
  expect_code(Errc::domain, [] { sqrt(lift_parameter(-1)); });
  expect_code(Errc::domain, [] { sqrt(seed_input(1, -2)); });
  expect_code(Errc::domain, [] { sqrt(seed_input(-1, 2)); });
  // Both endpoints zero only when the step is zero.
  EXPECT_EQ(sqrt(seed_input(0, 0)), DeltaScalar(0, 0));
  EXPECT_EQ(sqrt(seed_input(0, 4)), DeltaScalar(0, 2));
}

TEST(Exp, Examples) {
  EXPECT_EQ(exp(lift_parameter(0)), DeltaScalar(1, 0));
  EXPECT_LE(ulp_distance(exp(seed_input(0, std::log(2.0))).delta(),
                         ref(boost::multiprecision::exp(Big(std::log(2.0))) - 1)),
            2u);
  EXPECT_NEAR(exp(seed_input(0, std::log(2.0))).delta(), 1.0, 4 * kUnitRoundoff);
  // e^1 · (e^1e-18 − 1), rounded once.
  const double want = ref(boost::multiprecision::exp(Big(1)) *
                          (boost::multiprecision::exp(Big(1e-18)) - 1));
  EXPECT_LE(ulp_distance(exp(seed_input(1, 1e-18)).delta(), want), 2u);
}

TEST(Exp, BranchBoundaryAndOverflow) {
  // |Δu| = 1 goes to the Taylor kernel; both sides stay accurate.
  for (double d : {1.0, -1.0, std::nextafter(1.0, 2.0), std::nextafter(-1.0, -2.0), 3.0, -30.0}) {
    const double got = exp(seed_input(0.5, d)).delta();
    const double want = ref(boost::multiprecision::exp(Big(0.5)) *
                            (boost::multiprecision::exp(Big(d)) - 1));
    EXPECT_LE(ulp_distance(got, want), 4u) << d;
  }
  expect_code(Errc::overflow, [] { exp(lift_parameter(710)); });
  expect_code(Errc::overflow, [] { exp(seed_input(700, 20)); });
}

TEST(Log, Examples) {
  EXPECT_EQ(log(lift_parameter(1)), DeltaScalar(0, 0));
  const double e_minus_1 = std::exp(1.0) - 1.0;
  EXPECT_NEAR(log(seed_input(1, e_minus_1)).delta(), 1.0, 4 * kUnitRoundoff);
  const double want = ref(boost::multiprecision::log1p(Big(1e-18) / 2));
  EXPECT_LE(ulp_distance(log(seed_input(2, 1e-18)).delta(), want), 2u);
}

TEST(Log, Domain) {
  expect_code(Errc::domain, [] { log(lift_parameter(0)); });
  expect_code(Errc::domain, [] { log(seed_input(1, -1)); });
  expect_code(Errc::domain, [] { log(seed_input(-1, 3)); });
}

TEST(Pow, Examples) {
  EXPECT_EQ(pow(lift_parameter(2), lift_parameter(3)), DeltaScalar(8, 0));
  EXPECT_EQ(pow(seed_input(1, 1e-18), lift_parameter(2)).delta(), 2e-18);
  const double want = ref(boost::multiprecision::sqrt(Big(4) + Big(1e-16)) - 2);
  EXPECT_LE(ulp_distance(pow(seed_input(4, 1e-16), lift_parameter(0.5)).delta(), want), 4u);
}

TEST(Pow, DispatchWidensDomain) {
  // Square and reciprocal accept negative bases.
  EXPECT_EQ(pow(seed_input(-3, 1), lift_parameter(2)), DeltaScalar(9, -5));
  EXPECT_EQ(pow(seed_input(-2, 1), lift_parameter(-1)), DeltaScalar(-0.5, -0.5));
  expect_code(Errc::domain, [] { pow(seed_input(-2, 1), lift_parameter(3)); });
  // An exponent carrying a delta takes the exp/log path.
  expect_code(Errc::domain, [] { pow(seed_input(-2, 0), seed_input(2, 0.5)); });
}

TEST(Pow, GeneralPathAccuracy) {
  // (1.5 + 2^-40)^(2.5 + 2^-41) − 1.5^2.5 against the reference.
  const double u = 1.5, du = std::ldexp(1.0, -40), v = 2.5, dv = std::ldexp(1.0, -41);
  const double got = pow(seed_input(u, du), seed_input(v, dv)).delta();
  const double want = ref(boost::multiprecision::pow(Big(u) + Big(du), Big(v) + Big(dv)) -
                          boost::multiprecision::pow(Big(u), Big(v)));
  EXPECT_LE(std::fabs(got - want), 100 * kUnitRoundoff * std::fabs(want));
}

TEST(AccuracyBudget, Validation) {
  EXPECT_NO_THROW((AccuracyBudget{}.validate()));
  expect_code(Errc::invalid_input, [] { AccuracyBudget{0.0, 100.0}.validate(); });
  expect_code(Errc::invalid_input, [] { AccuracyBudget{kUnitRoundoff, 0.5}.validate(); });
  const AccuracyBudget b{};
  EXPECT_DOUBLE_EQ(b.tolerance(1e-10, 1e-12), 100 * 1e-10 * kUnitRoundoff);
  EXPECT_DOUBLE_EQ(b.tolerance(1e-10, 3e-9), 100 * 3e-9 * kUnitRoundoff);
}

TEST(ZeroStep, EveryRuleMapsZeroToPositiveZero) {
  const DeltaScalar a = seed_input(1.75, 0.0);
  const DeltaScalar b = seed_input(-0.5, 0.0);
  const DeltaScalar p = lift_parameter(2.25);
  for (const DeltaScalar& r :
       {add(a, b), sub(a, a), neg(a), neg(b), mul(a, b), mul(b, b), reciprocal(b), div(a, b),
        square(b), sqrt(a), exp(b), log(a), pow(a, p), pow(a, lift_parameter(2)),
        pow(a, lift_parameter(0.5)), pow(b, lift_parameter(-1)), pow(a, seed_input(1.25, 0))}) {
    EXPECT_TRUE(positive_zero(r.delta())) << r.delta();
  }
}

TEST(Telescoping, ScalarAdditivity) {
  // Δ(x, s1+s2) ≈ Δ(x, s1) + Δ(x+s1, s2) for s1, s2 powers of two.
  cdd::testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Expr e = cdd::testing::random_expr(rng, 1, 5);
    // Dyadic x so that x + s1 is exact for every k below.
    const double x = static_cast<double>(32 + rng() % 97) / 64.0;
    for (int k : {3, 10, 25, 40, 50}) {
      const double s1 = std::ldexp(1.0, -k), s2 = std::ldexp(1.0, -k - 1);
      const double x1 = x + s1;
      const std::vector<double> xv{x}, x1v{x1}, s{s1 + s2}, s1v{s1}, s2v{s2};
      double whole, a, b;
      try {
        whole = eval_delta(e, xv, s).delta();
        a = eval_delta(e, xv, s1v).delta();
        b = eval_delta(e, x1v, s2v).delta();
      } catch (const Error&) {
        continue;
      }
      const double scale = std::max(std::fabs(whole), std::fabs(a) + std::fabs(b));
      EXPECT_LE(std::fabs(whole - (a + b)), cdd::testing::step_bound(s1 + s2, scale))
          << format(e) << " x=" << x << " k=" << k;
    }
  }
}
