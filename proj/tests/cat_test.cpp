#include "catsim/cat.hpp"

#include <gtest/gtest.h>

#include "catsim/error.hpp"
#include "test_util.hpp"

using namespace catsim;

namespace {

ContextSnapshot snapshot_with_snr(double snr, double rate = 8.0) {
  ContextSnapshot s;
  s.channel = {-90.0, -10.0, snr, 7};
  s.mobility = {{51.0, 7.0}, 10.0, 0.0};
  s.rate_mbps = rate;
  return s;
}

}  // namespace

TEST(TxProbability, HardFloorBelowTmin) {
  EXPECT_DOUBLE_EQ(tx_probability(0.9, 9.99, CatParams{}), 0.0);
  EXPECT_DOUBLE_EQ(tx_probability(1.0, 0.0, CatParams{}), 0.0);
}

TEST(TxProbability, DeadlineAtTmax) {
  EXPECT_DOUBLE_EQ(tx_probability(0.1, 120.0, CatParams{}), 1.0);
  EXPECT_DOUBLE_EQ(tx_probability(0.0, 500.0, CatParams{}), 1.0);
}

TEST(TxProbability, PowerLawInsideWindow) {
  EXPECT_DOUBLE_EQ(tx_probability(0.5, 60.0, CatParams{}), 0.25);
  CatParams alpha1{1.0, 10.0, 120.0};
  EXPECT_DOUBLE_EQ(tx_probability(0.3, 60.0, alpha1), 0.3);
  CatParams alpha0{0.0, 10.0, 120.0};
  EXPECT_DOUBLE_EQ(tx_probability(0.3, 60.0, alpha0), 1.0);  // phi^0
}

TEST(TxProbability, MonotoneInPhiAndElapsed) {
  for (double alpha : {0.0, 0.5, 1.0, 2.0, 8.0}) {
    const CatParams params{alpha, 10.0, 120.0};
    for (double elapsed : {0.0, 9.0, 10.0, 60.0, 119.0, 120.0, 400.0}) {
      double prev = -1.0;
      for (int i = 0; i <= 40; ++i) {
        const double p = tx_probability(i / 40.0, elapsed, params);
        EXPECT_GE(p, prev);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        prev = p;
      }
    }
    for (double phi : {0.0, 0.25, 0.5, 1.0}) {
      double prev = -1.0;
      for (double elapsed = 0.0; elapsed <= 150.0; elapsed += 1.5) {
        const double p = tx_probability(phi, elapsed, params);
        EXPECT_GE(p, prev);
        prev = p;
      }
    }
  }
}

TEST(ExecuteTransmission, DurationFromExactFormula) {
  const auto snap = snapshot_with_snr(10.0, 8.0);
  const TransmissionRecord record = execute_transmission(1000000, snap, 0.0);
  EXPECT_DOUBLE_EQ(record.duration_s, 1.0);  // 8e6 bits / 8e6 bits-per-second
  EXPECT_DOUBLE_EQ(record.rate_mbps, 8.0);
  EXPECT_EQ(record.payload_bytes, 1000000u);
}

TEST(ExecuteTransmission, MeanBufferAgeIntegratesUniformAccrual) {
  const auto snap = snapshot_with_snr(10.0, 8.0);
  const TransmissionRecord record = execute_transmission(1000000, snap, 60.0);
  EXPECT_DOUBLE_EQ(record.mean_buffer_age_s, 31.0);  // 60/2 + 1
}

TEST(ExecuteTransmission, MissingGroundTruthRateIsAnError) {
  ContextSnapshot snap = snapshot_with_snr(10.0);
  snap.rate_mbps.reset();
  EXPECT_THROW(execute_transmission(1000, snap, 0.0), ValidationError);
}

TEST(Step, PeriodicTriggersOnTheCountedTick) {
  const TransmissionPolicy policy = PeriodicPolicy{10.0};
  BufferState state;
  Rng rng(1, "test.step");
  const auto snap = snapshot_with_snr(10.0);
  for (int tick = 1; tick <= 9; ++tick) {
    EXPECT_FALSE(step(policy, state, snap, 1.0, 1000, rng).has_value());
  }
  const auto record = step(policy, state, snap, 1.0, 1000, rng);
  ASSERT_TRUE(record.has_value());
  EXPECT_EQ(record->payload_bytes, 10000u);  // 10 ticks * 1000 B
  EXPECT_FALSE(record->phi_at_decision.has_value());
  EXPECT_EQ(state.bytes, 0u);
  EXPECT_DOUBLE_EQ(state.elapsed_since_last_tx_s, 0.0);
}

TEST(Step, ZeroPhiWindowTriggersExactlyAtDeadline) {
  CatPolicy cat;
  cat.metric = SingleMetric{Indicator::kSnr};
  cat.params = {2.0, 2.0, 5.0};
  const TransmissionPolicy policy = cat;
  BufferState state;
  Rng rng(2, "test.step");
  const auto snap = snapshot_with_snr(-10.0);  // phi = 0
  for (int tick = 1; tick <= 4; ++tick) {
    EXPECT_FALSE(step(policy, state, snap, 1.0, 1000, rng).has_value()) << "tick " << tick;
  }
  const auto record = step(policy, state, snap, 1.0, 1000, rng);
  ASSERT_TRUE(record.has_value());
  ASSERT_TRUE(record->phi_at_decision.has_value());
  EXPECT_DOUBLE_EQ(*record->phi_at_decision, 0.0);
  EXPECT_EQ(record->payload_bytes, 5000u);
}

TEST(Step, FullPhiTriggersRegardlessOfRngOnceWindowOpens) {
  CatPolicy cat;
  cat.metric = SingleMetric{Indicator::kSnr};
  cat.params = {2.0, 3.0, 100.0};
  const TransmissionPolicy policy = cat;
  const auto snap = snapshot_with_snr(30.0);  // phi = 1
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BufferState state;
    Rng rng(seed, "test.step.p1");
    for (int tick = 1; tick <= 2; ++tick) {
      EXPECT_FALSE(step(policy, state, snap, 1.0, 1000, rng).has_value());
    }
    const auto record = step(policy, state, snap, 1.0, 1000, rng);
    ASSERT_TRUE(record.has_value()) << "seed " << seed;
    EXPECT_DOUBLE_EQ(*record->phi_at_decision, 1.0);
  }
}

TEST(Step, EmptyBufferSuppressesTheRecord) {
  CatPolicy cat;
  cat.metric = SingleMetric{Indicator::kSnr};
  cat.params = {2.0, 0.0, 100.0};
  const TransmissionPolicy policy = cat;
  BufferState state;
  Rng rng(3, "test.step");
  const auto snap = snapshot_with_snr(30.0);  // p = 1, but nothing buffered
  EXPECT_FALSE(step(policy, state, snap, 1.0, 0, rng).has_value());
  EXPECT_EQ(state.bytes, 0u);
  EXPECT_EQ(state.ticks_since_last_tx, 1u);
}

TEST(Step, BufferViewTracksAges) {
  const TransmissionPolicy policy = PeriodicPolicy{100.0};
  BufferState state;
  Rng rng(4, "test.step");
  const auto snap = snapshot_with_snr(10.0);
  step(policy, state, snap, 0.5, 2000, rng);
  step(policy, state, snap, 0.5, 2000, rng);
  EXPECT_EQ(state.bytes, 2000u);
  EXPECT_DOUBLE_EQ(state.elapsed_since_last_tx_s, 1.0);
  EXPECT_DOUBLE_EQ(state.oldest_item_age_s, 1.0);
}

TEST(ValidatePolicy, RejectsBadParameters) {
  EXPECT_THROW(validate_policy(PeriodicPolicy{0.0}), ValidationError);
  CatPolicy cat;
  cat.metric = SingleMetric{Indicator::kSnr};
  cat.params = {2.0, 10.0, 10.0};  // t_max == t_min
  EXPECT_THROW(validate_policy(cat), ValidationError);
  cat.params = {-1.0, 10.0, 120.0};
  EXPECT_THROW(validate_policy(cat), ValidationError);
  cat.params = {2.0, 10.0, 120.0};
  validate_policy(cat);
}
