#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ehs/error.hpp"
#include "ehs/models.hpp"
#include "ehs/synth.hpp"
#include "oracles.hpp"

namespace {

using ehs::HingeParams;
using ehs::LinearParams;
using ehs::SoftHingeParams;

TEST(Softplus, KnownValues) {
  EXPECT_NEAR(ehs::softplus(0.0), std::numbers::ln2, 1e-12);
  EXPECT_NEAR(ehs::softplus(50.0), 50.0, 1e-12);
  const double tail = ehs::softplus(-50.0);
  EXPECT_GT(tail, 0.0);
  EXPECT_NEAR(tail, 1.9287498479639178e-22, 1e-34);
}

TEST(Softplus, AgreesWithExtendedPrecisionReference) {
  for (double z = -60.0; z <= 60.0; z += 0.37) {
    EXPECT_NEAR(ehs::softplus(z), ehs_test::ref_softplus(z), 1e-14 * std::max(1.0, ehs_test::ref_softplus(z)));
  }
}

TEST(Softplus, NeverOverflows) {
  for (const double z : {-1e6, -1e3, 1e3, 1e6}) {
    EXPECT_TRUE(std::isfinite(ehs::softplus(z)));
    EXPECT_GE(ehs::softplus(z), 0.0);
  }
  EXPECT_EQ(ehs::softplus(1e6), 1e6);
}

TEST(EvalModel, LinearBelowBreakpointIsZero) {
  EXPECT_EQ(ehs::eval_model(LinearParams{10.0, 0.8}, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(ehs::eval_model(LinearParams{10.0, 0.8}, 20.0), 8.0);
}

TEST(EvalModel, SoftHingeAtKneeIsBetaLn2) {
  EXPECT_NEAR(ehs::eval_model(SoftHingeParams{0.5, 20.0, 5.0}, 20.0), 0.5 * std::numbers::ln2, 1e-12);
}

TEST(EvalModel, UnitSoftnessEqualsHinge) {
  for (int x = 0; x <= 50; ++x) {
    EXPECT_NEAR(ehs::eval_model(SoftHingeParams{0.7, 13.0, 1.0}, x), ehs::eval_model(HingeParams{0.7, 13.0}, x),
                1e-12);
  }
}

TEST(EvalModel, HingeUsesSoftplusKink) {
  EXPECT_NEAR(ehs::eval_model(HingeParams{0.6, 10.0}, 30.0), 0.6 * ehs_test::ref_softplus(20.0), 1e-12);
}

TEST(EvalModel, ZeroBetaIsZeroEverywhere) {
  for (int x = 0; x <= 50; x += 5) {
    EXPECT_EQ(ehs::eval_model(SoftHingeParams{0.0, 10.0, 3.0}, x), 0.0);
    EXPECT_EQ(ehs::eval_model(HingeParams{0.0, 10.0}, x), 0.0);
    EXPECT_EQ(ehs::eval_model(LinearParams{10.0, 0.0}, x), 0.0);
  }
}

TEST(EvalModel, OutsideDomainIsError) {
  for (const double x : {-0.001, 50.001}) {
    try {
      ehs::eval_model(SoftHingeParams{0.5, 20.0, 5.0}, x);
      FAIL();
    } catch (const ehs::Error& e) {
      EXPECT_EQ(e.code(), ehs::Errc::domain_error);
    }
  }
  EXPECT_NO_THROW(ehs::eval_model(SoftHingeParams{0.5, 20.0, 5.0}, 50.0));
}

TEST(ModelGradient, AtKnee) {
  const auto g = ehs::model_gradient(SoftHingeParams{0.8, 18.0, 6.0}, 18.0);
  EXPECT_NEAR(g[0], std::numbers::ln2, 1e-12);
  EXPECT_NEAR(g[1], -0.8 / 6.0 * 0.5, 1e-12);
  EXPECT_EQ(g[2], 0.0);
}

TEST(ModelGradient, ZeroBeta) {
  const auto g = ehs::model_gradient(SoftHingeParams{0.0, 18.0, 6.0}, 30.0);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_EQ(g[2], 0.0);
}

TEST(ModelGradient, MatchesFiniteDifferences) {
  ehs::SynthRng rng(99);
  for (int k = 0; k < 100; ++k) {
    const std::array<double, 3> p{rng.uniform(0.0, 1.0), rng.uniform(-10.0, 60.0), rng.uniform(0.2, 20.0)};
    const double x = rng.uniform(0.0, 50.0);
    const auto g = ehs::model_gradient(SoftHingeParams{p[0], p[1], p[2]}, x);
    const auto f = [x](const std::array<double, 3>& q) { return ehs_test::ref_soft_hinge(q[0], q[1], q[2], x); };
    for (std::size_t i = 0; i < 3; ++i) {
      const double fd = ehs_test::central_difference(f, p, i, 1e-5);
      EXPECT_LE(std::abs(g[i] - fd), 1e-4 * std::max({std::abs(fd), std::abs(g[i]), 1e-300})) << "draw " << k;
    }
  }
}

TEST(ModelGradient, HingeMatchesFiniteDifferences) {
  const HingeParams p{0.6, 21.0};
  for (const double x : {0.0, 15.0, 21.0, 33.0, 50.0}) {
    const auto g = ehs::model_gradient(p, x);
    const auto f = [x](const std::array<double, 2>& q) { return ehs_test::ref_soft_hinge(q[0], q[1], 1.0, x); };
    for (std::size_t i = 0; i < 2; ++i) {
      const double fd = ehs_test::central_difference(f, std::array<double, 2>{p.beta, p.tau}, i, 1e-5);
      EXPECT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(SoftHinge, StrictlyIncreasingAndPositive) {
  const SoftHingeParams p{0.3, 40.0, 0.8};
  double prev = -1.0;
  for (double x = 0.0; x <= 50.0; x += 0.5) {
    const double y = ehs::eval_model(p, x);
    EXPECT_GT(y, 0.0);
    EXPECT_GT(y, prev);
    prev = y;
  }
}

TEST(SoftHinge, AsymptoticSlopeIsBetaOverS) {
  const SoftHingeParams p{0.9, 10.0, 3.0};  // (50 - 10) / 3 > 10
  const double slope = (ehs::eval_model(p, 50.0) - ehs::eval_model(p, 45.0)) / 5.0;
  EXPECT_NEAR(slope, p.beta / p.s, 0.01 * p.beta / p.s);
}

TEST(SoftHinge, SharpLimitApproachesLinear) {
  const double gamma = 0.7;
  const double tau = 20.0;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (const double s : {2.0, 0.5, 0.1, 0.01, ehs::kSoftnessMin}) {
    const SoftHingeParams soft{gamma * s, tau, s};
    double gap = 0.0;
    for (int x = 0; x <= 50; ++x) {
      gap = std::max(gap, std::abs(ehs::eval_model(soft, x) - ehs::eval_model(LinearParams{tau, gamma}, x)));
    }
    EXPECT_LE(gap, gamma * s * std::numbers::ln2 + 1e-12);
    EXPECT_LE(gap, prev_gap);
    prev_gap = gap;
  }
}

ehs::GazeShift pt(double x, double y) {
  ehs::GazeShift s;
  s.x = x;
  s.y = y;
  return s;
}

TEST(ComputeEor, AllEyeOnlyIsFullDomain) {
  ehs::ShiftSet set;
  for (int x = 1; x <= 50; ++x) set.shifts.push_back(pt(x, 0.05 * x));
  EXPECT_EQ(ehs::compute_eor(set), 50.0);
}

TEST(ComputeEor, NoEyeOnlyIsZero) {
  ehs::ShiftSet set;
  for (int x = 1; x <= 50; ++x) set.shifts.push_back(pt(x, 0.5 * x));
  EXPECT_EQ(ehs::compute_eor(set), 0.0);
}

TEST(ComputeEor, InterpolatesBetweenBinCentres) {
  ehs::ShiftSet set;
  for (const double c : {5.0, 10.0, 15.0}) {
    for (int i = 0; i < 10; ++i) set.shifts.push_back(pt(c, 0.0));
  }
  for (int i = 0; i < 10; ++i) set.shifts.push_back(pt(20.0, i < 6 ? 0.0 : 10.0));
  for (int i = 0; i < 10; ++i) set.shifts.push_back(pt(25.0, i < 4 ? 0.0 : 10.0));
  for (int i = 0; i < 10; ++i) set.shifts.push_back(pt(30.0, 15.0));
  EXPECT_NEAR(ehs::compute_eor(set), 22.5, 0.1);
}

TEST(ComputeEhrSlope, ExactLine) {
  ehs::ShiftSet set;
  for (int x = 0; x <= 50; ++x) set.shifts.push_back(pt(x, x > 15 ? 0.6 * (x - 15) : 0.0));
  EXPECT_NEAR(ehs::compute_ehr_slope(set, 15.0), 0.6, 1e-12);
}

TEST(ComputeEhrSlope, FlatDataIsZero) {
  ehs::ShiftSet set;
  for (int x = 0; x <= 50; ++x) set.shifts.push_back(pt(x, 0.0));
  EXPECT_EQ(ehs::compute_ehr_slope(set, 10.0), 0.0);
}

TEST(ComputeEhrSlope, NoisyMatchesClosedFormOls) {
  ehs::SynthRng rng(5);
  ehs::ShiftSet set;
  for (int i = 0; i < 500; ++i) {
    const double x = rng.uniform(0.0, 50.0);
    set.shifts.push_back(pt(x, 0.7 * std::max(0.0, x - 10.0) + rng.normal(0.0, 1.5)));
  }
  // Independent oracle: normal equations of y = g * (x - a) with Kahan-free long double sums.
  long double num = 0, den = 0;
  for (const auto& s : set.shifts) {
    if (s.x <= 10.0) continue;
    num += static_cast<long double>(s.y) * (s.x - 10.0);
    den += static_cast<long double>(s.x - 10.0) * (s.x - 10.0);
  }
  const double gamma = ehs::compute_ehr_slope(set, 10.0);
  EXPECT_NEAR(gamma, static_cast<double>(num / den), 1e-12);
  EXPECT_NEAR(gamma, 0.7, 0.02);
}

TEST(ComputeEhrSlope, NeedsTwoPointsBeyondAlpha) {
  ehs::ShiftSet set;
  set.shifts = {pt(5.0, 0.0), pt(30.0, 10.0)};
  try {
    ehs::compute_ehr_slope(set, 20.0);
    FAIL();
  } catch (const ehs::Error& e) {
    EXPECT_EQ(e.code(), ehs::Errc::too_few_points);
  }
}

TEST(ModelJson, RoundTripsEveryKind) {
  for (const ehs::ModelParams p : {ehs::ModelParams{LinearParams{12.5, 0.4}}, ehs::ModelParams{HingeParams{0.3, 7.0}},
                                   ehs::ModelParams{SoftHingeParams{0.8, 18.0, 6.0}}}) {
    const auto j = ehs::params_to_json(p);
    const auto back = ehs::params_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(ehs::kind_of(back), ehs::kind_of(p));
    for (int x = 0; x <= 50; x += 10) EXPECT_EQ(ehs::eval_model(back, x), ehs::eval_model(p, x));
  }
  EXPECT_EQ(ehs::params_to_json(SoftHingeParams{0.8, 18.0, 6.0})["model"], "soft-hinge");
}

TEST(ModelKind, ParsesCliNames) {
  EXPECT_EQ(ehs::parse_model_kind("linear"), ehs::ModelKind::linear);
  EXPECT_EQ(ehs::parse_model_kind("hinge"), ehs::ModelKind::hinge);
  EXPECT_EQ(ehs::parse_model_kind("soft-hinge"), ehs::ModelKind::soft_hinge);
  EXPECT_THROW(ehs::parse_model_kind("cubic"), ehs::Error);
  EXPECT_EQ(ehs::parameter_count(ehs::ModelKind::soft_hinge), 3);
  EXPECT_EQ(ehs::parameter_count(ehs::ModelKind::linear), 2);
}

}  // namespace
