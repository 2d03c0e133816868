#include <gtest/gtest.h>

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "eet/error.hpp"
#include "eet/ode.hpp"

using namespace eet;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

namespace {
const auto keep_going = [](const auto&) { return true; };
}

TEST(Dopri, ExponentialDecay) {
  ode::Options o;
  o.rtol = o.atol = 1e-12;
  Vec y0(1);
  y0 << 1.0;
  const auto r = ode::integrate([](double, const Vec& y, Vec& dy) { dy = -y; }, 0.0, y0, 5.0, o,
                                keep_going);
  EXPECT_DOUBLE_EQ(r.t, 5.0);
  EXPECT_NEAR(r.y[0], std::exp(-5.0), 1e-11);
  EXPECT_GT(r.stats.accepted, 0);
}

TEST(Dopri, ComplexRotationWithDenseOutput) {
  ode::Options o;
  o.rtol = o.atol = 1e-11;
  CVec y0(1);
  y0 << 1.0;
  double worst = 0.0;
  const auto obs = [&](const ode::DenseStep<CVec>& s) {
    for (double f : {0.25, 0.5, 0.75}) {
      const double t = s.t_old + f * (s.t_new - s.t_old);
      worst = std::max(worst, std::abs(s(t)[0] - std::polar(1.0, t)));
    }
    EXPECT_EQ(s(s.t_new)[0], (*s.y_new)[0]);
    return true;
  };
  const auto r = ode::integrate(
      [](double, const CVec& y, CVec& dy) { dy = std::complex<double>(0, 1) * y; }, 0.0, y0, 10.0, o,
      obs);
  EXPECT_LT(std::abs(r.y[0] - std::polar(1.0, 10.0)), 1e-9);
  EXPECT_LT(worst, 1e-8);
}

TEST(Dopri, TighterToleranceIsMoreAccurate) {
  Vec y0(2);
  y0 << 1.0, 0.0;
  const auto f = [](double, const Vec& y, Vec& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  double prev = 1.0;
  for (double tol : {1e-4, 1e-7, 1e-10}) {
    ode::Options o;
    o.rtol = o.atol = tol;
    const auto r = ode::integrate(f, 0.0, y0, 20.0, o, keep_going);
    const double err = std::abs(r.y[0] - std::cos(20.0));
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(Dopri, ObserverStopsIntegration) {
  ode::Options o;
  Vec y0(1);
  y0 << 1.0;
  const auto r = ode::integrate([](double, const Vec& y, Vec& dy) { dy = -y; }, 0.0, y0, 100.0, o,
                                [](const ode::DenseStep<Vec>& s) { return (*s.y_new)[0] > 0.5; });
  EXPECT_TRUE(r.stopped_by_observer);
  EXPECT_LT(r.t, 100.0);
  EXPECT_LE(r.y[0], 0.5);
}

TEST(Dopri, BlowUpReportsTimeReached) {
  ode::Options o;
  o.rtol = o.atol = 1e-8;
  Vec y0(1);
  y0 << 1.0;
  try {
    ode::integrate([](double, const Vec& y, Vec& dy) { dy = y.cwiseProduct(y); }, 0.0, y0, 2.0, o,
                   keep_going);
    FAIL() << "expected IntegrationFailure";
  } catch (const IntegrationFailure& e) {
    EXPECT_NEAR(e.time_reached(), 1.0, 1e-3);
  }
}

TEST(Dopri, StepBudgetExhausted) {
  ode::Options o;
  o.max_steps = 10;
  CVec y0(1);
  y0 << 1.0;
  EXPECT_THROW(ode::integrate([](double, const CVec& y, CVec& dy) {
                 dy = std::complex<double>(0, 100) * y;
               },
                              0.0, y0, 100.0, o, keep_going),
               IntegrationFailure);
}
