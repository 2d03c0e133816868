#include <gtest/gtest.h>

#include <cmath>

#include "eet/sweep.hpp"

using namespace eet;

namespace {

SweepTable hop_sweep(ChainSpec s, int points = 201) {
  SweepRequest r;
  r.param = SweepParam::GammaHop;
  r.grid = make_grid(1e-2, 1e3, points, GridScale::Log);
  return sweep_1d(s, r);
}

std::vector<std::optional<double>> wrap(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST(Grid, LinearAndLog) {
  const auto lin = make_grid(0.0, 1.0, 5, GridScale::Linear);
  EXPECT_EQ(lin, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  const auto lg = make_grid(1e-2, 1e3, 6, GridScale::Log);
  ASSERT_EQ(lg.size(), 6u);
  EXPECT_EQ(lg.front(), 1e-2);
  EXPECT_EQ(lg.back(), 1e3);
  EXPECT_NEAR(lg[2], 1.0, 1e-15);
  EXPECT_EQ(make_grid(3.0, 3.0, 1, GridScale::Log), std::vector<double>{3.0});
  EXPECT_THROW(make_grid(0.0, 1.0, 0, GridScale::Linear), PreconditionError);
  EXPECT_THROW(make_grid(0.0, 1.0, 5, GridScale::Log), PreconditionError);
  EXPECT_THROW(make_grid(1.0, 0.5, 5, GridScale::Linear), PreconditionError);
}

TEST(Grid, ParamNames) {
  for (auto p : {SweepParam::GammaHop, SweepParam::GammaDeph, SweepParam::GammaDiss,
                 SweepParam::LambdaSink, SweepParam::Delta, SweepParam::V})
    EXPECT_EQ(parse_sweep_param(to_string(p)), p);
  EXPECT_FALSE(parse_sweep_param("gamma").has_value());
}

TEST(SweepRequest, Validation) {
  SweepRequest r;
  r.grid = {0.1, 0.1, 0.2};
  EXPECT_THROW(validate(r), PreconditionError);
  r.grid = {};
  EXPECT_THROW(validate(r), PreconditionError);
  r.grid = {-1.0, 1.0};
  EXPECT_THROW(validate(r), PreconditionError);
  r.param = SweepParam::Delta;
  EXPECT_NO_THROW(validate(r));
  r.param = SweepParam::GammaHop;
  r.grid = {1.0, 2.0};
  r.hop_ratio = 0.1;
  EXPECT_THROW(validate(r), PreconditionError);
}

TEST(SweepRequest, LinkedHopping) {
  SweepRequest r;
  r.param = SweepParam::GammaDeph;
  r.hop_ratio = 1e-2;
  const ChainSpec s = spec_at(ChainSpec{}, r, 40.0);
  EXPECT_EQ(s.gamma_deph, 40.0);
  EXPECT_NEAR(s.gamma_hop, 0.4, 1e-15);
  r.param = SweepParam::Delta;
  r.hop_ratio.reset();
  EXPECT_EQ(spec_at(ChainSpec::line(3), r, 2.5).site_energies, (std::vector<double>{2.5, 0, 0}));
}

TEST(FindExtrema, MonotoneIsEmpty) {
  std::vector<double> g, y;
  for (int i = 0; i < 50; ++i) {
    g.push_back(i);
    y.push_back(std::log1p(i));
  }
  EXPECT_TRUE(find_extrema(g, wrap(y)).empty());
}

TEST(FindExtrema, SampledSine) {
  std::vector<double> g, y;
  for (int i = 0; i <= 400; ++i) {
    g.push_back(10.0 * i / 400);
    y.push_back(std::sin(g.back()));
  }
  const auto e = find_extrema(g, wrap(y), [](double x) { return std::sin(x); });
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0].kind, ExtremumKind::Max);
  EXPECT_NEAR(e[0].position, M_PI / 2, 1e-6);
  EXPECT_EQ(e[1].kind, ExtremumKind::Min);
  EXPECT_NEAR(e[1].position, 3 * M_PI / 2, 1e-6);
  EXPECT_NEAR(e[1].value, -1.0, 1e-12);
  EXPECT_EQ(e[2].kind, ExtremumKind::Max);
}

TEST(FindExtrema, PlateauAndNoise) {
  // flat bottom counts once; wiggles below the noise floor are ignored
  const std::vector<double> g{0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> y{3, 2, 1, 1, 1, 2, 3, 3 + 1e-14};
  const auto e = find_extrema(g, wrap(y));
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].kind, ExtremumKind::Min);
  EXPECT_EQ(e[0].value, 1.0);
}

TEST(FindExtrema, SkipsMissingRows) {
  const std::vector<double> g{0, 1, 2, 3, 4, 5, 6};
  std::vector<std::optional<double>> y{5.0, 4.0, std::nullopt, 2.0, 3.0, std::nullopt, 6.0};
  const auto e = find_extrema(g, y);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].index, 3u);
}

TEST(FindExtrema, NeedsFivePoints) {
  EXPECT_THROW(find_extrema({0, 1, 2, 3}, wrap({0, 1, 0, 1})), PreconditionError);
}

TEST(Sweep1d, UniformDimerSingleMinimum) {
  const SweepTable t = hop_sweep(ChainSpec{});
  EXPECT_EQ(t.missing(), 0u);
  ASSERT_EQ(t.extrema.size(), 1u);
  EXPECT_EQ(t.extrema[0].kind, ExtremumKind::Min);
  EXPECT_NEAR(t.extrema[0].position, std::sqrt(2.0) - 0.12, 1e-6);
  EXPECT_NEAR(t.extrema[0].value, 0.827730429076558969, 1e-12);
}

TEST(Sweep1d, LongerChainIsLessEfficient) {
  const SweepTable a = hop_sweep(ChainSpec{}, 51);
  const SweepTable b = hop_sweep(ChainSpec::line(20), 51);
  for (std::size_t i = 0; i < a.grid.size(); ++i) EXPECT_LT(*b.eta[i], *a.eta[i]) << a.grid[i];
  ASSERT_EQ(b.extrema.size(), 1u);
  EXPECT_EQ(b.extrema[0].kind, ExtremumKind::Min);
}

TEST(Sweep1d, DetunedDimerRegions) {
  const SweepTable i = hop_sweep(ChainSpec{}.with_delta(0.4), 501);
  ASSERT_EQ(i.extrema.size(), 2u);
  EXPECT_EQ(i.extrema[0].kind, ExtremumKind::Max);
  EXPECT_EQ(i.extrema[1].kind, ExtremumKind::Min);
  EXPECT_TRUE(hop_sweep(ChainSpec{}.with_delta(0.6), 501).extrema.empty());
}

TEST(Sweep1d, StrongDephasingKillsTransport) {
  SweepRequest r;
  r.param = SweepParam::GammaDeph;
  r.grid = make_grid(1e-2, 1e5, 36, GridScale::Log);
  const SweepTable t = sweep_1d(ChainSpec{}.with_delta(5.0), r);
  EXPECT_LT(*t.eta.back(), 1e-2);
  for (std::size_t k = 20; k < t.grid.size(); ++k) EXPECT_LT(*t.eta[k], *t.eta[k - 1]);
}

TEST(Sweep1d, FailedRowsAreRecorded) {
  SweepRequest r;
  r.param = SweepParam::GammaDiss;
  r.grid = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
  const SweepTable t = sweep_1d(ChainSpec{}, r);
  EXPECT_EQ(t.missing(), 1u);
  EXPECT_FALSE(t.eta[0].has_value());
  EXPECT_NE(t.errors[0].find("gamma_diss"), std::string::npos);
  EXPECT_TRUE(t.errors[1].empty());
}

TEST(Sweep1d, WorkerCountDoesNotChangeResults) {
  SweepRequest r;
  r.grid = make_grid(1e-2, 1e3, 97, GridScale::Log);
  const ChainSpec s = ChainSpec::line(4);
  SweepOptions one, many;
  many.workers = 4;
  const SweepTable a = sweep_1d(s, r, one), b = sweep_1d(s, r, many);
  EXPECT_EQ(a.eta, b.eta);
  ASSERT_EQ(a.extrema.size(), b.extrema.size());
  for (std::size_t k = 0; k < a.extrema.size(); ++k) {
    EXPECT_EQ(a.extrema[k].position, b.extrema[k].position);
    EXPECT_EQ(a.extrema[k].value, b.extrema[k].value);
  }
}

TEST(Phase, ExampleCells) {
  const PhaseDiagram pd = phase_diagram({0.24, 3.0}, {0.0, 0.1, 0.4, 0.5, 0.7});
  EXPECT_EQ(pd.numeric_at(2, 0), Region::I);
  EXPECT_EQ(pd.analytic_at(2, 0), Region::I);
  EXPECT_EQ(pd.numeric_at(0, 0), Region::II);
  EXPECT_EQ(pd.numeric_at(1, 1), Region::III);
  EXPECT_EQ(pd.analytic_at(1, 1), Region::III);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(pd.numeric_at(3, j), Region::B);
    EXPECT_EQ(pd.numeric_at(4, j), Region::B);
  }
  ASSERT_TRUE(pd.overlay_minus[2].has_value());
  EXPECT_NEAR(*pd.overlay_minus[2], 0.979795897113271239, 1e-14);
  EXPECT_FALSE(pd.overlay_plus[4].has_value());
}

TEST(Phase, SingleCell) {
  const PhaseDiagram pd = phase_diagram({0.24}, {0.4});
  ASSERT_EQ(pd.numeric.size(), 1u);
  EXPECT_EQ(pd.numeric[0], Region::I);
  EXPECT_EQ(pd.mismatches_away_from_boundaries(), 0u);
}

TEST(Phase, DephasingShiftsBoundaries) {
  PhaseOptions o;
  o.gamma_deph = 0.4;
  // c + 2 gamma = 1.04 moves the delta = 0.4 cell past D_- = 0.98
  const PhaseDiagram pd = phase_diagram({0.24}, {0.0, 0.4}, o);
  EXPECT_EQ(pd.analytic_at(1, 0), Region::II);
  EXPECT_EQ(pd.numeric_at(1, 0), Region::II);
  EXPECT_EQ(pd.numeric_at(0, 0), Region::II);
  EXPECT_NEAR(*pd.overlay_plus[0], 2 * std::sqrt(2.0) - 0.8, 1e-14);
}

TEST(Phase, RejectsBadGrids) {
  EXPECT_THROW(phase_diagram({}, {0.1}), PreconditionError);
  EXPECT_THROW(phase_diagram({0.0, 1.0}, {0.1}), PreconditionError);
  EXPECT_THROW(phase_diagram({1.0, 0.5}, {0.1}), PreconditionError);
}
