#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eet/analytic.hpp"
#include "eet/dynamics.hpp"
#include "reference.hpp"

using namespace eet;
using LDParams = BasicTwoSiteParams<long double>;

namespace {

// Reference values evaluated independently in 30-digit arithmetic.
constexpr double kEtaDefault = 0.832417673892052076;
constexpr double kEtaSaturated = 0.833333333333333333;
constexpr double kDipLocation = 1.294213562373095049;
constexpr double kDepthClosedForm = 0.007032995025112524;
constexpr double kDepthNumeric = 0.006723485108129237;
constexpr double kEtaMin = 0.827730429076558969;
constexpr double kCriticalHopping = 1.355485782337639730;
constexpr double kDMinusAt04 = 0.979795897113271239;

LDParams with_c(long double c, long double delta) {
  LDParams p;
  p.delta = delta;
  p.gamma_diss = c / 12;
  p.lambda_sink = 10 * c / 12;
  return p;
}

}  // namespace

TEST(EtaTwoSite, DefaultParameters) {
  EXPECT_NEAR(eta_two_site(TwoSiteParams{}), kEtaDefault, 1e-14);
}

TEST(EtaTwoSite, NoCoherentCouplingNoTransport) {
  TwoSiteParams p;
  p.v = 0.0;
  EXPECT_EQ(eta_two_site(p), 0.0);
  p.v = 1e-6;
  EXPECT_LT(eta_two_site(p), 1e-9);
}

TEST(EtaTwoSite, SaturatesForStrongHopping) {
  TwoSiteParams p;
  p.gamma_hop = 1e9;
  EXPECT_NEAR(eta_two_site(p), kEtaSaturated, 1e-9);
}

TEST(EtaTwoSite, UndefinedWithoutLossOrSink) {
  TwoSiteParams p;
  p.gamma_diss = p.lambda_sink = 0.0;
  EXPECT_THROW(eta_two_site(p), PreconditionError);
  p.gamma_diss = 0.1;
  p.gamma_hop = -1;
  EXPECT_THROW(eta_two_site(p), ValidationError);
}

TEST(EtaSaturated, Examples) {
  EXPECT_NEAR(eta_saturated(0.02, 0.2), kEtaSaturated, 1e-15);
  EXPECT_EQ(eta_saturated(0.3, 0.0), 0.0);
  EXPECT_EQ(eta_saturated(0.0, 0.4), 1.0);
}

TEST(EffectiveHopping, Examples) {
  EXPECT_NEAR(effective_hopping(TwoSiteParams{}), 4 / 0.24, 1e-12);
  TwoSiteParams p;
  p.v = 0.0;
  p.gamma_hop = 5.0;
  EXPECT_EQ(effective_hopping(p), 5.0);
  p.v = 1.0;
  p.delta = 1e8;
  EXPECT_NEAR(effective_hopping(p), 5.0, 1e-12);
}

TEST(DipLocation, Examples) {
  EXPECT_NEAR(*dip_location_uniform(0.02, 0.2, 0.0), kDipLocation, 1e-15);
  EXPECT_FALSE(dip_location_uniform(0.02, 0.2, 1.5).has_value());
  EXPECT_NEAR(*dip_location_uniform(1e-9, 1e-9, 0.0), std::sqrt(2.0), 1e-8);
  // exactly at the threshold the minimizer is gamma_h = 0, not interior
  EXPECT_FALSE(dip_location_uniform(0.0, 2 * std::sqrt(2.0), 0.0).has_value());
}

TEST(DipLocation, MatchesNumericMinimizer) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<long double> u(0, 1);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LDParams p;
    p.v = 0.2L + 2 * u(rng);
    // shallow dips (tiny Gamma) are too flat to locate to 1e-8 even in long double
    p.gamma_diss = p.v * (0.02L + 0.28L * u(rng));
    p.lambda_sink = p.v * (0.05L + u(rng));
    p.gamma_deph = 0.5L * p.v * u(rng);
    const auto x = dip_location_uniform(p.gamma_diss, p.lambda_sink, p.gamma_deph, p.v);
    if (!x) continue;
    const auto m = dip_depth_numeric(p, 1e-16L);
    EXPECT_NEAR(static_cast<double>(m.location), static_cast<double>(*x), 1e-8) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(DipDepth, ClosedFormAsPrinted) {
  EXPECT_NEAR(dip_depth_closed_form(0.02, 0.2), kDepthClosedForm, 1e-15);
  EXPECT_NEAR(dip_depth_closed_form(0.02, 0.2), 0.00706, 5e-5);
  const double g = 0.05;
  EXPECT_NEAR(dip_depth_closed_form(g, 0.0),
              g * g / (g * g + (2 * std::sqrt(2.0) - 2 * g) * 2 * g), 1e-15);
  EXPECT_THROW(dip_depth_closed_form(1.0, 1.0), NoDipError);
}

TEST(DipDepth, NumericCompanion) {
  const DipDepthReport r = dip_depth(0.02, 0.2);
  EXPECT_NEAR(r.closed_form, kDepthClosedForm, 1e-15);
  EXPECT_NEAR(r.numeric, kDepthNumeric, 1e-12);
  EXPECT_NEAR(r.numeric_location, kDipLocation, 1e-6);
  const auto m = dip_depth_numeric(TwoSiteParams{});
  EXPECT_NEAR(m.eta_min, kEtaMin, 1e-14);
  EXPECT_NEAR(m.eta_saturated, kEtaSaturated, 1e-15);
}

TEST(DipDepth, InteriorDipOnlyWhenPresent) {
  EXPECT_TRUE(interior_dip(TwoSiteParams{}).has_value());
  TwoSiteParams p;
  p.gamma_deph = 2.0;
  EXPECT_FALSE(interior_dip(p).has_value());
}

TEST(CriticalHopping, UniformExample) {
  const double x = critical_incoherent_hopping(TwoSiteParams{});
  EXPECT_NEAR(x, kCriticalHopping, 1e-14);
  EXPECT_LE(std::abs(4 / (0.24 + 2 * x) - x), 1e-12);
}

TEST(CriticalHopping, ResidualOverRandomParameters) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    TwoSiteParams p;
    p.v = reference::log_uniform(rng, 1e-2, 10.0);
    p.delta = 20 * (u(rng) - 0.5);
    p.gamma_diss = reference::log_uniform(rng, 1e-3, 10.0);
    p.lambda_sink = reference::log_uniform(rng, 1e-3, 10.0);
    p.gamma_deph = reference::log_uniform(rng, 1e-3, 10.0);
    const double x = critical_incoherent_hopping(p);
    p.gamma_hop = x;
    EXPECT_GE(x, 0.0);
    EXPECT_LE(std::abs(4 * p.v * p.v / dressed_width(p) - x), 1e-12) << "trial " << trial;
  }
}

TEST(CriticalHopping, Limits) {
  TwoSiteParams p;
  p.v = 1e-6;
  EXPECT_LT(critical_incoherent_hopping(p), 1e-9);
  p.v = 1.0;
  p.delta = 1e6;
  EXPECT_LT(critical_incoherent_hopping(p), 1e-9);
  p.v = 0.0;
  EXPECT_THROW(critical_incoherent_hopping(p), PreconditionError);
}

TEST(ClassifyRegion, Examples) {
  const RegionLabel a = classify_region(0.4, 0.24);
  EXPECT_EQ(a.region, Region::I);
  EXPECT_NEAR(*a.d_minus, kDMinusAt04, 1e-14);
  EXPECT_NEAR(*a.d_plus, 2.4, 1e-14);
  EXPECT_EQ(classify_region(0.6, 0.24).region, Region::B);
  EXPECT_EQ(classify_region(0.6, 10.0).region, Region::B);
  EXPECT_EQ(classify_region(0.5, 0.1).region, Region::B);
  EXPECT_EQ(classify_region(0.0, 0.24).region, Region::II);
  EXPECT_EQ(classify_region(0.1, 3.0).region, Region::III);
  const RegionLabel z = classify_region(0.0, 1.0);
  EXPECT_EQ(*z.d_minus, 0.0);
  EXPECT_NEAR(*z.d_plus, 2 * std::sqrt(2.0), 1e-15);
  EXPECT_THROW(classify_region(0.1, 0.0), PreconditionError);
}

TEST(ClassifyRegion, ExtremaCountsMatchSampledCurves) {
  EXPECT_EQ(reference::sign_changes_two_site(with_c(0.24L, 0.4L)), 2);
  EXPECT_EQ(reference::sign_changes_two_site(with_c(0.24L, 0.6L)), 0);
  EXPECT_EQ(reference::sign_changes_two_site(with_c(0.24L, 0.0L)), 1);
  EXPECT_EQ(reference::sign_changes_two_site(with_c(3.0L, 0.1L)), 0);
}

TEST(ClassifyRegion, RandomCellsAwayFromBoundaries) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> ud(0.0, 0.7), uc(0.02, 4.0);
  int tested = 0;
  while (tested < 150) {
    const double delta = ud(rng), c = uc(rng);
    const RegionLabel lab = classify_region(delta, c);
    if (delta > 0.45 && delta < 0.55) continue;
    if (lab.d_minus && (std::abs(c - *lab.d_minus) < 0.05 || std::abs(c - *lab.d_plus) < 0.05)) continue;
    const int changes = reference::sign_changes_two_site(with_c(c, delta), 4001);
    EXPECT_EQ(changes, extrema_count(lab.region))
        << "delta=" << delta << " c=" << c << " region=" << to_string(lab.region);
    ++tested;
  }
}

TEST(ClassifyRegion, InvariantUnderRescaling) {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double delta = u(rng), c = 4 * u(rng) + 1e-3, s = std::pow(2.0, 8 * u(rng) - 4);
    EXPECT_EQ(classify_region(delta, c).region, classify_region(s * delta, s * c, s).region)
        << delta << ' ' << c << ' ' << s;
  }
}

TEST(Monotonicity, StrictlyIncreasingInRegionsBAndIII) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> ud(0.0, 1.5), uc(0.02, 6.0);
  int tested = 0;
  while (tested < 60) {
    const double delta = ud(rng), c = uc(rng);
    const Region r = classify_region(delta, c).region;
    if (r != Region::B && r != Region::III) continue;
    LDParams p = with_c(c, delta);
    long double prev = -1;
    for (int i = 0; i < 1000; ++i) {
      p.gamma_hop = std::pow(10.0L, -3 + 6.0L * i / 999);
      const long double e = eta_two_site(p);
      ASSERT_GT(e, prev) << "delta=" << delta << " c=" << c << " i=" << i;
      prev = e;
    }
    ++tested;
  }
}

TEST(Equivalence, ClosedFormMatchesLinearSolve) {
  std::mt19937_64 rng(56);
  std::uniform_real_distribution<double> ud(-10.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    TwoSiteParams p;
    p.delta = ud(rng);
    p.gamma_diss = reference::log_uniform(rng, 1e-3, 1e2);
    p.gamma_deph = reference::log_uniform(rng, 1e-3, 1e2);
    p.gamma_hop = reference::log_uniform(rng, 1e-3, 1e2);
    p.lambda_sink = reference::log_uniform(rng, 1e-3, 1e2);
    ChainSpec s;
    s.site_energies = {p.delta, 0.0};
    s.gamma_diss = p.gamma_diss;
    s.gamma_deph = p.gamma_deph;
    s.gamma_hop = p.gamma_hop;
    s.lambda_sink = p.lambda_sink;
    worst = std::max(worst, std::abs(eta_two_site(p) - efficiency_linear_solve(s)));
  }
  EXPECT_LE(worst, 1e-9);
}
