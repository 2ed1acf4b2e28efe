// Exact engine: closed-form anchors, Gray-code vs naive enumeration,
// Gibbs expectations, ground states, and the two-environment interpolation.

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "skglass/environment.hpp"
#include "skglass/exact_engine.hpp"
#include "skglass/rng.hpp"
#include "skglass/serialization.hpp"

using namespace skglass;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

CouplingTensor sample(const EnvironmentSpec& env, int n, int p,
                      std::uint64_t seed) {
  return sample_couplings(env, n, p, seed);
}

std::vector<EnvironmentSpec> catalog() {
  return {EnvironmentSpec::gaussian(), EnvironmentSpec::rademacher(),
          EnvironmentSpec::uniform_centered(),
          EnvironmentSpec::shifted_exponential()};
}

}  // namespace

TEST(LogPartition, SingleSpinClosedForm) {
  CouplingTensor t;
  t.n = 1;
  t.p = 2;
  t.values = {0.83};
  for (const double beta : {-1.5, 0.0, 0.4, 2.0}) {
    for (const double h : {-0.7, 0.0, 1.2}) {
      const auto r = log_partition(t, {1, 2, beta, h});
      EXPECT_NEAR(r.log_z, beta * 0.83 + std::log(std::cosh(h)), 1e-12);
    }
  }
}

TEST(LogPartition, TwoSpinClosedForm) {
  CouplingTensor t;
  t.n = 2;
  t.p = 2;
  t.values = {0.5, 1.0, 0.2, -0.3};
  const double b = 1.0 / std::sqrt(2.0);
  const double expected =
      b * (0.5 - 0.3) + std::log(std::cosh(b * (1.0 + 0.2)));
  const auto r = log_partition(t, {2, 2, 1.0, 0.0});
  EXPECT_NEAR(r.log_z, expected, 1e-13);
  EXPECT_NEAR(r.log_z, 0.46504361204049605, 1e-12);  // mpmath enumeration
  EXPECT_EQ(r.enumerated_count, 4u);
}

TEST(LogPartition, BetaZeroIsPureFieldTerm) {
  const CouplingTensor t = sample(EnvironmentSpec::shifted_exponential(), 5, 2, 3);
  const auto r = log_partition(t, {5, 2, 0.0, 0.3});
  EXPECT_NEAR(r.log_z, 5.0 * std::log(std::cosh(0.3)), 1e-12);
  const auto anchor = log_partition(t, {5, 2, 0.0, 0.0});
  EXPECT_NEAR(anchor.log_z, 0.0, 1e-12);
}

TEST(LogPartition, PythonEnumerationFixtures) {
  std::ifstream in(std::string(SKGLASS_FIXTURE_DIR) +
                   "/log_partition_fixtures.json");
  ASSERT_TRUE(in.good());
  const nlohmann::json fixtures = nlohmann::json::parse(in);
  ASSERT_GE(fixtures.size(), 4u);
  for (const auto& f : fixtures) {
    const CouplingTensor t = f.get<CouplingTensor>();
    const ModelParams params{t.n, t.p, f.at("beta").get<double>(),
                             f.at("h").get<double>()};
    const auto r = log_partition(t, params);
    EXPECT_LE(rel_err(r.log_z, f.at("log_z").get<double>()), 1e-12)
        << "fixture n=" << t.n << " p=" << t.p << " beta=" << params.beta;
  }
}

TEST(LogPartition, GrayCodeMatchesNaiveEnumeration) {
  const auto envs = catalog();
  rng::Xoshiro256pp eng(2024);
  int checked = 0;
  for (const int p : {2, 3}) {
    const int n_max = p == 2 ? 10 : 7;
    for (int n = 1; n <= n_max; ++n) {
      for (int rep = 0; rep < 8; ++rep) {
        const auto& env = envs[checked % envs.size()];
        const CouplingTensor t = sample(env, n, p, eng.next());
        const double beta = 3.0 * eng.uniform01() - 1.5;
        const double h = eng.uniform01() - 0.5;
        const double want = oracle::naive_log_partition(t, beta, h);
        const double got = log_partition(t, {n, p, beta, h}).log_z;
        EXPECT_LE(rel_err(got, want), 1e-10) << "n=" << n << " p=" << p;
        ++checked;
      }
    }
  }
  EXPECT_GE(checked, 100);
}

TEST(LogPartition, NoOverflowAtExtremeBeta) {
  const CouplingTensor t = sample(EnvironmentSpec::gaussian(), 8, 2, 5);
  const auto r = log_partition(t, {8, 2, 400.0, 0.0});
  EXPECT_TRUE(std::isfinite(r.log_z));
  // dominated by the ground state at large beta
  const double s = ground_state(t).s_n;
  EXPECT_NEAR(r.log_z / 400.0, s / std::sqrt(8.0), 0.02);
}

TEST(LogPartition, ConvexInBeta) {
  const CouplingTensor t = sample(EnvironmentSpec::rademacher(), 6, 2, 9);
  for (const double beta : {-1.0, 0.3, 1.1}) {
    const double db = 0.05;
    const double lo = log_partition(t, {6, 2, beta - db, 0.2}).log_z;
    const double mid = log_partition(t, {6, 2, beta, 0.2}).log_z;
    const double hi = log_partition(t, {6, 2, beta + db, 0.2}).log_z;
    EXPECT_GE(lo + hi - 2.0 * mid, -1e-10);
  }
}

TEST(LogPartition, NegativeBetaEqualsNegatedEnvironment) {
  const CouplingTensor t = sample(EnvironmentSpec::shifted_exponential(), 6, 2, 31);
  const CouplingTensor neg = negated(t);
  for (const double beta : {0.6, 1.4}) {
    const double lhs = log_partition(t, {6, 2, -beta, 0.15}).log_z;
    const double rhs = log_partition(neg, {6, 2, beta, 0.15}).log_z;
    EXPECT_LE(rel_err(lhs, rhs), 1e-12);
  }
}

TEST(LogPartition, PathwiseSandwich) {
  rng::Xoshiro256pp eng(77);
  for (const auto& env : catalog()) {
    for (const int n : {3, 6, 9}) {
      const CouplingTensor t = sample(env, n, 2, eng.next());
      const double s = ground_state(t).s_n;
      for (const double beta : {1.0, std::pow(n, 1.0 / 6.0)}) {
        const double lz = log_partition(t, {n, 2, beta, 0.0}).log_z;
        const double top = beta * s / std::sqrt(n);
        EXPECT_LE(lz, top + 1e-9);
        EXPECT_GE(lz, top - n * std::log(2.0) - 1e-9);
      }
    }
  }
}

TEST(LogPartition, CapacityAndDimensionErrors) {
  const CouplingTensor t = sample(EnvironmentSpec::gaussian(), 4, 2, 1);
  EXPECT_THROW(log_partition(t, {5, 2, 1.0, 0.0}), dimension_error);
  EngineLimits tiny;
  tiny.max_n_p2 = 3;
  EXPECT_THROW(log_partition(t, {4, 2, 1.0, 0.0}, tiny), capacity_error);
}

TEST(GibbsExpectation, IndependentSpinsAtBetaZero) {
  const CouplingTensor t = sample(EnvironmentSpec::gaussian(), 5, 2, 12);
  const double h = 0.6;
  for (int i = 0; i < 5; ++i) {
    const double m = gibbs_expectation(
        t, {5, 2, 0.0, h}, [i](SpinConfiguration s) {
          return static_cast<double>(s.spin(i));
        });
    EXPECT_NEAR(m, std::tanh(h), 1e-12);
  }
  // h = 0: <sigma_i sigma_j> = delta_ij
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double c = gibbs_expectation(
          t, {5, 2, 0.0, 0.0}, [i, j](SpinConfiguration s) {
            return static_cast<double>(s.spin(i) * s.spin(j));
          });
      EXPECT_NEAR(c, i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(GibbsExpectation, MatchesNaiveWeightedSum) {
  rng::Xoshiro256pp eng(55);
  const CouplingTensor t = sample(EnvironmentSpec::uniform_centered(), 3, 2, 8);
  const auto obs = [](SpinConfiguration s) {
    return static_cast<double>(s.spin(0) * s.spin(2)) - 0.25 * s.magnetization();
  };
  for (const double beta : {0.4, 1.3}) {
    for (const double h : {0.0, -0.3}) {
      const double want = oracle::naive_gibbs(t, beta, h, obs);
      const double got = gibbs_expectation(t, {3, 2, beta, h}, obs);
      EXPECT_LE(rel_err(got, want), 1e-12);
    }
  }
}

TEST(GroundState, SingleSpin) {
  CouplingTensor t;
  t.n = 1;
  t.p = 2;
  t.values = {-0.4};
  const auto gs = ground_state(t);
  EXPECT_DOUBLE_EQ(gs.s_n, -0.4);
  EXPECT_EQ(gs.degeneracy_hint, 2u);  // both spin values tie
}

TEST(GroundState, TwoSpinClosedForm) {
  CouplingTensor t;
  t.n = 2;
  t.p = 2;
  t.values = {0.5, 1.0, 0.2, -0.3};
  const auto gs = ground_state(t);
  EXPECT_NEAR(gs.s_n, 0.5 - 0.3 + std::abs(1.0 + 0.2), 1e-15);
  EXPECT_NEAR(gs.s_n, 1.4, 1e-15);
}

TEST(GroundState, MatchesNaiveScan) {
  rng::Xoshiro256pp eng(6);
  for (const int p : {2, 3}) {
    for (int rep = 0; rep < 5; ++rep) {
      const int n = p == 2 ? 10 : 6;
      const CouplingTensor t = sample(EnvironmentSpec::gaussian(), n, p, eng.next());
      const auto gs = ground_state(t);
      EXPECT_NEAR(gs.s_n, oracle::naive_ground_state(t), 1e-10);
      EXPECT_NEAR(energy(t, gs.argmax), gs.s_n, 1e-10);
    }
  }
}

TEST(GroundState, GlobalFlipDegeneracyForPairModel) {
  const CouplingTensor t = sample(EnvironmentSpec::gaussian(), 8, 2, 17);
  EXPECT_GE(ground_state(t).degeneracy_hint, 2u);
}

TEST(GroundState, RademacherIntegerTies) {
  const CouplingTensor t = sample(EnvironmentSpec::rademacher(), 6, 2, 23);
  const auto gs = ground_state(t);
  std::uint64_t count = 0;
  for (std::uint64_t bits = 0; bits < 64; ++bits) {
    if (std::abs(oracle::naive_energy(t, {6, bits}) - gs.s_n) <= 1e-12)
      ++count;
  }
  EXPECT_EQ(gs.degeneracy_hint, count);
  EXPECT_GE(count, 2u);
}

TEST(Interpolation, EmptyExponentAnchor) {
  const CouplingTensor g = sample(EnvironmentSpec::gaussian(), 4, 2, 1);
  const CouplingTensor x = sample(EnvironmentSpec::rademacher(), 4, 2, 2);
  const auto pt = interpolated_log_partition(g, x, 0.0, 0.0, {4, 2, 0.0});
  EXPECT_NEAR(pt.log_z, 0.0, 1e-12);
  const auto pt_h = interpolated_log_partition(g, x, 0.0, 0.0, {4, 2, 0.45});
  EXPECT_NEAR(pt_h.log_z, 4.0 * std::log(std::cosh(0.45)), 1e-12);
}

TEST(Interpolation, SingleEnvironmentReductions) {
  const CouplingTensor g = sample(EnvironmentSpec::gaussian(), 5, 2, 41);
  const CouplingTensor x = sample(EnvironmentSpec::shifted_exponential(), 5, 2, 42);
  const double t0 = 1.3, h = 0.2;
  const auto at_x_zero = interpolated_log_partition(g, x, t0, 0.0, {5, 2, h});
  EXPECT_LE(rel_err(at_x_zero.log_z,
                    log_partition(g, {5, 2, std::sqrt(t0), h}).log_z),
            1e-12);
  const auto at_t_zero = interpolated_log_partition(g, x, 0.0, t0, {5, 2, h});
  EXPECT_LE(rel_err(at_t_zero.log_z,
                    log_partition(x, {5, 2, std::sqrt(t0), h}).log_z),
            1e-12);
}

TEST(Interpolation, ValidationErrors) {
  const CouplingTensor g = sample(EnvironmentSpec::gaussian(), 4, 2, 1);
  const CouplingTensor x = sample(EnvironmentSpec::rademacher(), 5, 2, 2);
  EXPECT_THROW(interpolated_log_partition(g, x, 0.5, 0.5, {4, 2, 0.0}),
               dimension_error);
  const CouplingTensor x4 = sample(EnvironmentSpec::rademacher(), 4, 2, 2);
  EXPECT_THROW(interpolated_log_partition(g, x4, -0.1, 0.5, {4, 2, 0.0}),
               validation_error);
  EXPECT_THROW(interpolated_log_partition(g, x4, 0.1, -0.5, {4, 2, 0.0}),
               validation_error);
}

TEST(Interpolation, PSpinReduction) {
  const CouplingTensor g = sample(EnvironmentSpec::gaussian(), 4, 3, 11);
  const CouplingTensor x = sample(EnvironmentSpec::rademacher(), 4, 3, 12);
  const double t0 = 0.9;
  const auto pt = interpolated_log_partition(g, x, t0, 0.0, {4, 3, 0.0});
  EXPECT_LE(rel_err(pt.log_z,
                    log_partition(g, {4, 3, std::sqrt(t0), 0.0}).log_z),
            1e-12);
}
