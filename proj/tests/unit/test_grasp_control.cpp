#include <gtest/gtest.h>

#include <random>

#include "tacsim/errors.hpp"
#include "tacsim/grasp_control.hpp"
#include "oracles.hpp"

using namespace tacsim;
using namespace tacsim::grasp;

namespace {

pipeline::RelativeFrame frame(const Vec3& b, double sum_r) {
  pipeline::RelativeFrame f;
  f.sa2_ut = b;
  f.fa1.setConstant(sum_r / 16.0);
  return f;
}

bool has(const StepResult& r, EventKind k, int finger = -2) {
  for (const auto& e : r.events)
    if (e.kind == k && (finger == -2 || e.finger == finger)) return true;
  return false;
}

GripperState closing(int n) {
  GripperState s = initial_state(n);
  s.phase = Phase::Closing;
  return s;
}

}  // namespace

TEST(LeveragedSignal, Examples) {
  EXPECT_DOUBLE_EQ(leveraged_signal(frame({3, 4, 0}, 0), 0.3), 5.0);
  // a = 0.3: z = 0.3 * 100 + 0.7 * 100 = 100
  EXPECT_NEAR(leveraged_signal(frame({0, 0, 100}, 100), 0.3), 100.0, 1e-12);
  EXPECT_NEAR(leveraged_signal(frame({0, 0, 10}, 100), 1.0), 10.0, 1e-12);
  EXPECT_NEAR(leveraged_signal(frame({0, 0, 10}, 100), 0.0), 100.0, 1e-12);
}

TEST(LeveragedSignal, InvariantUnderShearRotation) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-200, 200);
  for (int i = 0; i < 500; ++i) {
    const Vec3 b(u(rng), u(rng), u(rng));
    const double s = 1000 + u(rng);
    const Mat3 rz = oracle::rodrigues(Vec3::UnitZ(), u(rng));
    EXPECT_NEAR(leveraged_signal(frame(rz * b, s), 0.3), leveraged_signal(frame(b, s), 0.3), 1e-9);
  }
}

TEST(Policy, Validation) {
  GraspPolicy p;
  p.a = 1.2;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p.a = 0.3;
  p.mode = Hysteresis{400, 500, 2};
  EXPECT_THROW(p.validate(), InvalidArgument);
  p.mode = Hysteresis{900, 500, 2};
  EXPECT_NO_THROW(p.validate());
}

TEST(Controller, IdleStartsClosing) {
  const std::vector<double> g{0, 0};
  const StepResult r = controller_step(initial_state(2), {}, g);
  EXPECT_EQ(r.state.phase, Phase::Closing);
  EXPECT_TRUE(has(r, EventKind::ClosingStart));
}

TEST(Controller, SingleThresholdStepsThenHalts) {
  GraspPolicy policy;
  const std::vector<double> low{100, 100};
  StepResult r = controller_step(closing(2), policy, low);
  EXPECT_EQ(r.commands, (std::vector<Command>{Command::Close, Command::Close}));
  EXPECT_EQ(r.state.fingers[0].increments, 1);
  EXPECT_EQ(r.state.fingers[0].settle_ticks, 6);
  // Waits out the filter window before the next step.
  for (int i = 0; i < 6; ++i) {
    r = controller_step(r.state, policy, low);
    EXPECT_EQ(r.commands[0], Command::Stay);
  }
  r = controller_step(r.state, policy, low);
  EXPECT_EQ(r.commands[0], Command::Close);

  GripperState s = r.state;
  s.fingers[0].settle_ticks = 0;
  s.fingers[1].settle_ticks = 0;
  const std::vector<double> one_high{800, 100};
  r = controller_step(s, policy, one_high);
  EXPECT_TRUE(has(r, EventKind::Halt, 0));
  EXPECT_EQ(r.commands[0], Command::Stay);
  EXPECT_EQ(r.commands[1], Command::Close);
  EXPECT_EQ(r.state.phase, Phase::Closing);
  // A halted finger stays latched even if the signal dips.
  r.state.fingers[1].settle_ticks = 0;
  const std::vector<double> dip{650, 750};
  r = controller_step(r.state, policy, dip);
  EXPECT_EQ(r.commands[0], Command::Stay);
  EXPECT_EQ(r.state.phase, Phase::Holding);
  EXPECT_TRUE(has(r, EventKind::HoldStart));
}

TEST(Controller, SingleThresholdHoldsForever) {
  GraspPolicy policy;
  GripperState s = closing(2);
  s.phase = Phase::Holding;
  const std::vector<double> g{0, 0};
  for (int i = 0; i < 2000; ++i) {
    const StepResult r = controller_step(s, policy, g);
    ASSERT_EQ(r.state.phase, Phase::Holding);
    ASSERT_EQ(r.commands, (std::vector<Command>{Command::Stay, Command::Stay}));
    s = r.state;
  }
}

TEST(Controller, MechanicalLimit) {
  GraspPolicy policy;
  GripperState s = closing(2);
  s.fingers[0].increments = 359;
  s.fingers[1].increments = 10;
  s.fingers[1].status = FingerStatus::Halted;
  const std::vector<double> g{0, 800};
  StepResult r = controller_step(s, policy, g);
  EXPECT_EQ(r.state.fingers[0].increments, 360);
  EXPECT_EQ(r.state.phase, Phase::Closing);
  r.state.fingers[0].settle_ticks = 0;
  r = controller_step(r.state, policy, g);
  EXPECT_EQ(r.state.fingers[0].increments, 360);
  EXPECT_EQ(r.state.fingers[0].status, FingerStatus::AtLimit);
  EXPECT_TRUE(has(r, EventKind::MechanicalLimit, 0));
  EXPECT_EQ(r.state.phase, Phase::Done);
}

TEST(Controller, HysteresisHoldThenRelease) {
  GraspPolicy policy;
  policy.mode = Hysteresis{900, 500, 2.0};
  GripperState s = closing(2);
  const std::vector<double> high{950, 920};
  StepResult r = controller_step(s, policy, high);
  ASSERT_EQ(r.state.phase, Phase::Holding);
  int ticks = 0;
  while (r.state.phase == Phase::Holding) {
    r = controller_step(r.state, policy, high);
    ++ticks;
    ASSERT_LT(ticks, 10000);
  }
  EXPECT_EQ(ticks, 500);
  EXPECT_TRUE(has(r, EventKind::ReleaseStart));
  EXPECT_EQ(r.state.phase, Phase::Releasing);
  r.state.fingers[0].increments = 5;
  r.state.fingers[1].increments = 5;
  r.state.fingers[0].settle_ticks = 0;
  r.state.fingers[1].settle_ticks = 0;
  r = controller_step(r.state, policy, high);
  EXPECT_EQ(r.commands, (std::vector<Command>{Command::Open, Command::Open}));
  EXPECT_EQ(r.state.fingers[0].increments, 4);
  r.state.fingers[0].settle_ticks = 0;
  r.state.fingers[1].settle_ticks = 0;
  const std::vector<double> low{100, 100};
  r = controller_step(r.state, policy, low);
  EXPECT_EQ(r.state.phase, Phase::Done);
  EXPECT_TRUE(has(r, EventKind::Done));
}

TEST(Controller, HysteresisReevaluatesEachTick) {
  GraspPolicy policy;
  policy.mode = Hysteresis{900, 500, 2.0};
  GripperState s = closing(2);
  const std::vector<double> g{950, 100};
  StepResult r = controller_step(s, policy, g);
  EXPECT_EQ(r.commands[0], Command::Stay);
  r.state.fingers[0].settle_ticks = 0;
  r.state.fingers[1].settle_ticks = 0;
  const std::vector<double> dropped{850, 100};
  r = controller_step(r.state, policy, dropped);
  EXPECT_EQ(r.commands[0], Command::Close);
}

TEST(Controller, RandomSignalsNeverOpenAndCloseOrReverseWhileClosing) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0, 1200);
  for (int trial = 0; trial < 20; ++trial) {
    GraspPolicy policy;
    if (trial % 2) policy.mode = Hysteresis{900, 500, 0.2};
    GripperState s = initial_state(2);
    for (int t = 0; t < 3000 && s.phase != Phase::Done; ++t) {
      const std::vector<double> g{u(rng), u(rng)};
      const StepResult r = controller_step(s, policy, g);
      ASSERT_EQ(r.commands.size(), 2U);
      for (int f = 0; f < 2; ++f) {
        const int delta = r.state.fingers[f].increments - s.fingers[f].increments;
        ASSERT_EQ(delta, static_cast<int>(r.commands[f]));
        if (s.phase == Phase::Closing || s.phase == Phase::Holding) {
          ASSERT_GE(delta, 0);
        }
        ASSERT_GE(r.state.fingers[f].increments, 0);
        ASSERT_LE(r.state.fingers[f].increments, 360);
      }
      s = r.state;
    }
  }
}

TEST(Names, SnakeCaseEvents) {
  EXPECT_EQ(to_string(EventKind::ClosingStart), "closing_start");
  EXPECT_EQ(to_string(EventKind::MechanicalLimit), "mechanical_limit");
  EXPECT_EQ(to_string(Phase::Holding), "Holding");
}
