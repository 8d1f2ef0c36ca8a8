#pragma once

#include <cstdint>

#include "tacsim/geometry.hpp"

namespace tacsim::pipeline {

/// One raw sample of one finger section: 16 FA-I counts + 3 Hall channels.
struct TactileFrame {
  std::int64_t timestamp_us = 0;
  std::uint8_t finger_id = 0;
  TaxelCounts fa1 = TaxelCounts::Zero();
  Vec3 sa2_ut = Vec3::Zero();

  friend bool operator==(const TactileFrame& a, const TactileFrame& b) {
    return a.timestamp_us == b.timestamp_us && a.finger_id == b.finger_id && a.fa1 == b.fa1 &&
           a.sa2_ut == b.sa2_ut;
  }
};

/// Baseline-subtracted (and usually filtered) frame with real-valued channels.
struct RelativeFrame {
  std::int64_t timestamp_us = 0;
  std::uint8_t finger_id = 0;
  TaxelValues fa1 = TaxelValues::Zero();
  Vec3 sa2_ut = Vec3::Zero();

  double fa1_sum() const { return fa1.sum(); }
};

}  // namespace tacsim::pipeline
