#pragma once

// Initialization, baseline subtraction and moving-average filtering of a
// tactile stream. Order per sample: subtract baseline, then filter.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tacsim/errors.hpp"
#include "tacsim/frame.hpp"

namespace tacsim::pipeline {

struct StreamConfig {
  int rate_hz = 250;
  int fingers = 2;
  int init_samples = 300;
  int tail_samples = 100;
  int ma_window = 6;

  void validate() const;
  std::int64_t period_us() const { return 1'000'000 / rate_hz; }
};

struct Baseline {
  TaxelValues fa1_mean = TaxelValues::Zero();
  Vec3 sa2_mean = Vec3::Zero();
  int sample_count = 0;
};

/// Mean of the tail `tail_samples` of the first `init_samples` frames.
/// Throws InsufficientSamples when fewer than init_samples frames are given.
Baseline initialize(std::span<const TactileFrame> stream, const StreamConfig& config = {});

RelativeFrame subtract_baseline(const TactileFrame& frame, const Baseline& baseline);

using ChannelVector = Eigen::Matrix<double, kChannelsPerFinger, 1>;

/// fa1 row-major into channels 0..15, sa2 x/y/z into 16..18.
ChannelVector to_channels(const RelativeFrame& frame);
RelativeFrame from_channels(const ChannelVector& channels, std::int64_t timestamp_us,
                            std::uint8_t finger_id);

/// Causal running mean over the last min(window, seen) samples. The mean is
/// taken relative to the oldest sample in the window, so a constant input
/// comes back bit-exactly.
template <typename T>
class MovingAverage {
 public:
  explicit MovingAverage(int window) : window_(window) {
    if (window < 1) throw InvalidArgument("moving-average window must be >= 1");
  }

  T push(const T& sample) {
    if (static_cast<int>(buffer_.size()) == window_) buffer_.pop_front();
    buffer_.push_back(sample);
    const T& ref = buffer_.front();
    T acc = ref - ref;
    for (auto it = buffer_.begin() + 1; it != buffer_.end(); ++it) acc += *it - ref;
    return ref + acc / static_cast<double>(buffer_.size());
  }

  void reset() { buffer_.clear(); }
  int window() const { return window_; }
  int filled() const { return static_cast<int>(buffer_.size()); }

 private:
  int window_;
  std::deque<T> buffer_;
};

/// Batch form of MovingAverage over a frame sequence.
std::vector<RelativeFrame> moving_average(std::span<const RelativeFrame> stream, int window = 6);

/// Per-stream processor: collects init_samples frames, then emits
/// baseline-subtracted, filtered frames. Frames during initialization are
/// non-actionable and yield std::nullopt.
class StreamProcessor {
 public:
  explicit StreamProcessor(StreamConfig config = {});

  std::optional<RelativeFrame> feed(const TactileFrame& frame);

  bool initialized() const { return baseline_.has_value(); }
  const Baseline& baseline() const;
  const StreamConfig& config() const { return config_; }

 private:
  StreamConfig config_;
  std::vector<TactileFrame> init_frames_;
  std::optional<Baseline> baseline_;
  MovingAverage<ChannelVector> filter_;
  std::int64_t last_timestamp_ = 0;
  bool seen_any_ = false;
};

}  // namespace tacsim::pipeline
