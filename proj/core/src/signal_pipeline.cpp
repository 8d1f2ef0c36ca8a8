#include "tacsim/signal_pipeline.hpp"

#include <string>

namespace tacsim::pipeline {

void StreamConfig::validate() const {
  if (rate_hz <= 0 || 1'000'000 % rate_hz != 0)
    throw InvalidArgument("rate_hz must divide 1e6 microseconds");
  if (fingers < 1 || fingers > 255) throw InvalidArgument("fingers must be 1..255");
  if (init_samples < 1 || tail_samples < 1 || tail_samples > init_samples)
    throw InvalidArgument("need 1 <= tail_samples <= init_samples");
  if (ma_window < 1) throw InvalidArgument("ma_window must be >= 1");
}

Baseline initialize(std::span<const TactileFrame> stream, const StreamConfig& config) {
  config.validate();
  if (stream.size() < static_cast<std::size_t>(config.init_samples))
    throw InsufficientSamples("initialization needs " + std::to_string(config.init_samples) +
                              " frames, stream has " + std::to_string(stream.size()));
  Baseline b;
  const auto first = static_cast<std::size_t>(config.init_samples - config.tail_samples);
  const auto last = static_cast<std::size_t>(config.init_samples);
  // Mean relative to the first tail frame, so a constant stream is reproduced exactly.
  const TaxelValues fa1_ref = stream[first].fa1.cast<double>();
  const Vec3 sa2_ref = stream[first].sa2_ut;
  TaxelValues fa1_acc = TaxelValues::Zero();
  Vec3 sa2_acc = Vec3::Zero();
  for (std::size_t i = first + 1; i < last; ++i) {
    fa1_acc += stream[i].fa1.cast<double>() - fa1_ref;
    sa2_acc += stream[i].sa2_ut - sa2_ref;
  }
  b.sample_count = config.tail_samples;
  b.fa1_mean = fa1_ref + fa1_acc / b.sample_count;
  b.sa2_mean = sa2_ref + sa2_acc / b.sample_count;
  return b;
}

RelativeFrame subtract_baseline(const TactileFrame& frame, const Baseline& baseline) {
  RelativeFrame out;
  out.timestamp_us = frame.timestamp_us;
  out.finger_id = frame.finger_id;
  out.fa1 = frame.fa1.cast<double>() - baseline.fa1_mean;
  out.sa2_ut = frame.sa2_ut - baseline.sa2_mean;
  return out;
}

ChannelVector to_channels(const RelativeFrame& frame) {
  ChannelVector ch;
  for (int r = 0; r < kTaxelRows; ++r)
    for (int c = 0; c < kTaxelCols; ++c) ch[r * kTaxelCols + c] = frame.fa1(r, c);
  ch.tail<3>() = frame.sa2_ut;
  return ch;
}

RelativeFrame from_channels(const ChannelVector& channels, std::int64_t timestamp_us,
                            std::uint8_t finger_id) {
  RelativeFrame out;
  out.timestamp_us = timestamp_us;
  out.finger_id = finger_id;
  for (int r = 0; r < kTaxelRows; ++r)
    for (int c = 0; c < kTaxelCols; ++c) out.fa1(r, c) = channels[r * kTaxelCols + c];
  out.sa2_ut = channels.tail<3>();
  return out;
}

std::vector<RelativeFrame> moving_average(std::span<const RelativeFrame> stream, int window) {
  MovingAverage<ChannelVector> filter(window);
  std::vector<RelativeFrame> out;
  out.reserve(stream.size());
  for (const auto& f : stream)
    out.push_back(from_channels(filter.push(to_channels(f)), f.timestamp_us, f.finger_id));
  return out;
}

StreamProcessor::StreamProcessor(StreamConfig config)
    : config_(config), filter_((config.validate(), config.ma_window)) {
  init_frames_.reserve(static_cast<std::size_t>(config_.init_samples));
}

const Baseline& StreamProcessor::baseline() const {
  if (!baseline_) throw InsufficientSamples("stream is still initializing");
  return *baseline_;
}

std::optional<RelativeFrame> StreamProcessor::feed(const TactileFrame& frame) {
  if (seen_any_ && frame.timestamp_us <= last_timestamp_)
    throw InvalidArgument("timestamps must be strictly increasing within a stream");
  seen_any_ = true;
  last_timestamp_ = frame.timestamp_us;

  if (!baseline_) {
    init_frames_.push_back(frame);
    if (init_frames_.size() == static_cast<std::size_t>(config_.init_samples)) {
      baseline_ = initialize(init_frames_, config_);
      init_frames_.clear();
      init_frames_.shrink_to_fit();
    }
    return std::nullopt;
  }
  const RelativeFrame rel = subtract_baseline(frame, *baseline_);
  return from_channels(filter_.push(to_channels(rel)), rel.timestamp_us, rel.finger_id);
}

}  // namespace tacsim::pipeline
