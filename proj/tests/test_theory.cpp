// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "adamrel/io.hpp"
#include "adamrel/theory.hpp"
#include "test_util.hpp"

namespace adamrel::theory {
namespace {

using optim::Variant;

// Scalar Adam recurrence with eps = 0: `history` steps of g = 1, an optional
// timestep reset, then steps of k. Returns |m_hat / sqrt(v_hat)| for each
// post-change step.
std::vector<double> recurrence(double k, int history, int post_steps, bool reset_t,
                               double b1 = 0.9, double b2 = 0.999) {
  double m = 0.0, v = 0.0;
  long t = 0;
  auto advance = [&](double g) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, static_cast<double>(t)));
    const double vh = v / (1 - std::pow(b2, static_cast<double>(t)));
    return std::fabs(mh / std::sqrt(vh));
  };
  for (int i = 0; i < history; ++i) advance(1.0);
  if (reset_t) t = 0;
  std::vector<double> out;
  for (int i = 0; i < post_steps; ++i) out.push_back(advance(k));
  return out;
}

TEST(AdamLimit, UnitForStationaryGradient) {
  for (std::int64_t t : {0, 1, 5, 100, 20000}) EXPECT_EQ(adam_limit_update(1.0, t), 1.0);
}

TEST(AdamLimit, HugeJumpGivesSqrtTen) {
  EXPECT_NEAR(adam_limit_update(1e9, 0), 3.16228, 1e-3);
}

TEST(AdamLimit, SmallJumpMatchesLongHistoryRecurrence) {
  EXPECT_NEAR(adam_limit_update(2.0, 0), 1.1 / std::sqrt(1.003), 1e-14);
  const auto sim = recurrence(2.0, 20000, 1, false);
  EXPECT_NEAR(adam_limit_update(2.0, 0), sim[0], 1e-6);
}

TEST(AdamLimit, PeakExceedsSqrtTenNearK111) {
  const double at111 = adam_limit_update(111.0, 0);
  EXPECT_NEAR(at111, 3.2880, 1e-4);
  EXPECT_GT(at111, std::sqrt(10.0));
  // Grid search for the supremum over k.
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double k = std::pow(10.0, -2.0 + 12.0 * i / 200000.0);
    best = std::max(best, adam_limit_update(k, 0));
  }
  const double bound = std::sqrt(0.81 / 0.999 + 0.01 / 0.001);
  EXPECT_NEAR(adam_peak_bound(0.9, 0.999), bound, 1e-14);
  EXPECT_LE(best, bound + 1e-12);
  EXPECT_NEAR(best, bound, 1e-6);
  EXPECT_LE(adam_peak_bound(0.9, 0.999), 3.28803);
}

TEST(AdamLimit, RejectsNonPositiveK) {
  EXPECT_THROW(adam_limit_update(0.0, 0), std::invalid_argument);
  EXPECT_THROW(adam_limit_update(-1.0, 0), std::invalid_argument);
  EXPECT_THROW(adamrel_limit_update(0.0, 3), std::invalid_argument);
  EXPECT_THROW(adam_limit_update(1.0, -1), std::invalid_argument);
}

TEST(AdamRelLimit, TendsToOneForHugeJumps) {
  for (std::int64_t t = 0; t <= 100; ++t) EXPECT_NEAR(adamrel_limit_update(1e9, t), 1.0, 1e-3);
  for (std::int64_t t : {0, 3, 50, 1000, 20000}) EXPECT_NEAR(adamrel_limit_update(1e12, t), 1.0, 1e-9);
}

TEST(AdamRelLimit, StationaryGradientMatchesPostResetRecurrence) {
  EXPECT_NEAR(adamrel_limit_update(1.0, 0), std::sqrt(0.001) / 0.1, 1e-14);
  const auto sim = recurrence(1.0, 20000, 1, true);
  EXPECT_NEAR(adamrel_limit_update(1.0, 0), sim[0], 1e-6);
}

TEST(AdamRelLimit, MildOvershootAtK1000) {
  const double direct = std::sqrt(0.001) / 0.1 * (0.9 + 1000 * 0.1) /
                        std::sqrt(0.999 + 1e6 * 0.001);
  EXPECT_NEAR(adamrel_limit_update(1000.0, 0), direct, 1e-14);
  EXPECT_NEAR(adamrel_limit_update(1000.0, 0), 1.00845, 1e-4);
}

TEST(AdamRelLimit, PrefactorIdentity) {
  for (double k : {0.1, 1.0, 2.0, 37.0, 1e4, 1e9})
    for (std::int64_t t : {0, 1, 7, 63, 500, 20000}) {
      const double ratio = adamrel_limit_update(k, t) / adam_limit_update(k, t);
      EXPECT_TRUE(adamrel::testing::within_ulps(ratio, adamrel_prefactor(t, 0.9, 0.999), 8));
      const double expected = std::sqrt(1 - std::pow(0.999, t + 1.0)) / (1 - std::pow(0.9, t + 1.0));
      EXPECT_NEAR(adamrel_prefactor(t, 0.9, 0.999), expected, 1e-15 * expected);
    }
}

TEST(AdamRelLimit, AnnealingShapeAtKOne) {
  const double v0 = adamrel_limit_update(1.0, 0);
  EXPECT_NEAR(v0, 0.316, 1e-3);
  EXPECT_LT(adamrel_limit_update(1.0, 10), v0);
  EXPECT_LT(v0, adamrel_limit_update(1.0, 5000));
  // Once past its minimum the curve rises monotonically.
  std::int64_t argmin = 0;
  for (std::int64_t t = 1; t < 5000; ++t)
    if (adamrel_limit_update(1.0, t) < adamrel_limit_update(1.0, argmin)) argmin = t;
  for (std::int64_t t = argmin; t < 5000; ++t)
    ASSERT_LE(adamrel_limit_update(1.0, t), adamrel_limit_update(1.0, t + 1));
}

TEST(AdamRelLimit, NearUnitBoundOnCoarseGrid) {
  double best = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double k = std::pow(10.0, 9.0 * i / 199.0);
    for (std::int64_t t = 0; t <= 20000; t += (t < 200 ? 1 : 97)) best = std::max(best, adamrel_limit_update(k, t));
  }
  EXPECT_LE(best, 1.05);
  EXPECT_GT(best, 1.0);
}

TEST(AdamLimit, OvershootDecaysTowardOne) {
  for (double k : {1.5, 2.0, 10.0, 100.0, 1e4}) EXPECT_GT(adam_limit_update(k, 0), 1.0);
  EXPECT_NEAR(adam_limit_update(100.0, 20000), 1.0, 1e-3);
}

TEST(FiniteHistory, MatchesRecurrence) {
  for (double k : {0.5, 1.0, 2.0, 10.0, 100.0, 1e4})
    for (int history : {1, 7, 300, 5000}) {
      const auto sim = recurrence(k, history, 64, false);
      for (std::int64_t t = 0; t < 64; ++t) {
        const double f = detail::adam_finite_history_update(k, t, history, 0.9, 0.999);
        ASSERT_NEAR(f, sim[static_cast<std::size_t>(t)], 1e-11 * sim[static_cast<std::size_t>(t)])
            << "k=" << k << " t'=" << history << " t=" << t;
      }
    }
}

TEST(FiniteHistory, ApproachesClosedFormAsHistoryGrows) {
  double gap_short = 0.0, gap_long = 0.0;
  for (double k : {1.0, 2.0, 10.0, 100.0, 1e4})
    for (std::int64_t t = 0; t < 64; ++t) {
      const double limit = adam_limit_update(k, t);
      gap_short = std::max(gap_short, std::fabs(detail::adam_finite_history_update(k, t, 5000, 0.9, 0.999) - limit));
      gap_long = std::max(gap_long, std::fabs(detail::adam_finite_history_update(k, t, 20000, 0.9, 0.999) - limit));
    }
  // b2^5000 is still about 6.7e-3, so 5000 steps leave a visible residue.
  EXPECT_GT(gap_short, 1e-3);
  EXPECT_LT(gap_long, 1e-6);
}

TEST(Simulate, StationaryCurveIsFlat) {
  StepGradientScenario s;
  s.k = 1.0;
  s.t_prime = 5000;
  s.t_max = 63;
  const auto curve = simulate_step_gradient(s, Variant::Adam);
  ASSERT_EQ(curve.points.size(), 64u);
  for (const auto& p : curve.points) EXPECT_NEAR(p.update_size, 1.0, 1e-9);
}

TEST(Simulate, AgreesWithFiniteHistoryAndLimit) {
  for (double k : {1.0, 2.0, 10.0, 100.0, 1e4}) {
    StepGradientScenario s;
    s.k = k;
    s.g = 0.37;
    s.t_max = 63;
    s.t_prime = 5000;
    const auto short_run = simulate_step_gradient(s, Variant::Adam);
    s.t_prime = 20000;
    const auto long_run = simulate_step_gradient(s, Variant::Adam);
    for (std::int64_t t = 0; t <= 63; ++t) {
      const auto i = static_cast<std::size_t>(t);
      EXPECT_EQ(short_run.points[i].t, t);
      EXPECT_NEAR(short_run.points[i].update_size,
                  detail::adam_finite_history_update(k, t, 5000, 0.9, 0.999), 1e-9);
      EXPECT_NEAR(long_run.points[i].update_size, adam_limit_update(k, t), 1e-6);
    }
  }
}

TEST(Simulate, AdamRelPostResetMatchesLimit) {
  for (double k : {1.0, 2.0, 100.0}) {
    StepGradientScenario s;
    s.k = k;
    s.t_max = 40;
    const auto curve = simulate_step_gradient(s, Variant::AdamRel);
    const auto sim = recurrence(k, static_cast<int>(s.t_prime), 41, true);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      EXPECT_NEAR(curve.points[i].update_size, sim[i], 1e-12);
      EXPECT_NEAR(curve.points[i].update_size, adamrel_limit_update(k, static_cast<std::int64_t>(i)), 1e-6);
    }
  }
}

TEST(Simulate, FullResetRestartsAtUnitUpdate) {
  for (double k : {0.01, 1.0, 3.0, 1e6}) {
    StepGradientScenario s;
    s.k = k;
    s.t_prime = 100;
    s.t_max = 5;
    const auto curve = simulate_step_gradient(s, Variant::AdamMR);
    for (const auto& p : curve.points) EXPECT_NEAR(p.update_size, 1.0, 1e-12);
  }
}

TEST(Simulate, ValidatesScenario) {
  StepGradientScenario s;
  s.g = 0.0;
  EXPECT_THROW(simulate_step_gradient(s, Variant::Adam), std::invalid_argument);
  s = {};
  s.k = -2.0;
  EXPECT_THROW(simulate_step_gradient(s, Variant::Adam), std::invalid_argument);
  s = {};
  s.t_prime = 0;
  EXPECT_THROW(simulate_step_gradient(s, Variant::Adam), std::invalid_argument);
  s = {};
  s.beta2 = 1.0;
  EXPECT_THROW(simulate_step_gradient(s, Variant::Adam), std::invalid_argument);
}

TEST(EmitCurves, ShapesAndValues) {
  const std::vector<double> ks{1.0, 2.0, 10.0, 100.0};
  const std::vector<Variant> vs{Variant::Adam, Variant::AdamRel};
  const auto curves = emit_update_curves(ks, 30, 0.9, 0.999, vs);
  ASSERT_EQ(curves.size(), 8u);
  EXPECT_EQ(curves[0].variant, Variant::Adam);
  EXPECT_EQ(curves[4].variant, Variant::AdamRel);
  for (const auto& c : curves) {
    ASSERT_EQ(c.points.size(), 31u);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      EXPECT_EQ(c.points[i].t, static_cast<std::int64_t>(i));
      EXPECT_GT(c.points[i].update_size, 0.0);
    }
  }
  for (const auto& p : curves[0].points) EXPECT_EQ(p.update_size, 1.0);

  const std::vector<double> huge{1e9};
  const std::vector<Variant> adam{Variant::Adam}, rel{Variant::AdamRel};
  EXPECT_NEAR(emit_update_curves(huge, 5, 0.9, 0.999, adam)[0].points[0].update_size, 3.16228, 1e-3);
  for (const auto& p : emit_update_curves(huge, 100, 0.9, 0.999, rel)[0].points)
    EXPECT_NEAR(p.update_size, 1.0, 1e-3);

  const std::vector<double> none;
  EXPECT_THROW(emit_update_curves(none, 5, 0.9, 0.999, vs), std::invalid_argument);
  const std::vector<Variant> mr{Variant::AdamMR};
  EXPECT_THROW(emit_update_curves(ks, 5, 0.9, 0.999, mr), std::invalid_argument);
}

TEST(EmitCurves, CsvRoundTripsExactly) {
  const std::vector<double> ks{2.0, 1e4};
  const std::vector<Variant> vs{Variant::Adam, Variant::AdamRel};
  const auto curves = emit_update_curves(ks, 9, 0.9, 0.999, vs);
  std::stringstream buf;
  write_curves_csv(buf, curves);
  const auto table = io::read_csv(buf);
  ASSERT_EQ(table.header, (std::vector<std::string>{"variant", "k", "t", "update_size"}));
  ASSERT_EQ(table.rows.size(), 40u);
  std::size_t r = 0;
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      const auto& row = table.rows[r++];
      EXPECT_EQ(row[0], optim::to_string(c.variant));
      EXPECT_EQ(*io::parse_double(row[1]), c.k);
      EXPECT_EQ(*io::parse_int(row[2]), p.t);
      EXPECT_EQ(*io::parse_double(row[3]), p.update_size);
    }
}

}  // namespace
}  // namespace adamrel::theory
