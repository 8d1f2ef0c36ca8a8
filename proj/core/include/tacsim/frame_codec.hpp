#pragma once

// Frame persistence.
//
// Binary record (little-endian, 53 bytes):
//   int64   timestamp_us
//   uint8   finger_id
//   16 x uint16  FA-I counts, row-major (r0c0, r0c1, ... r3c3)
//   3 x float32  SA-II x, y, z in µT
//
// CSV frame log: optional '#' comment lines, then the header
//   timestamp_us,finger_id,fa1_00..fa1_33,sa2_x,sa2_y,sa2_z
// and one row per frame.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tacsim/frame.hpp"

namespace tacsim::pipeline {

inline constexpr std::size_t kRecordSize = 8 + 1 + 16 * 2 + 3 * 4;
inline constexpr std::int32_t kFa1FullScale = 1023;

using Record = std::array<std::uint8_t, kRecordSize>;

/// Throws InvalidArgument for counts outside 0..1023 or SA-II values that
/// are not exactly representable as float32.
Record encode(const TactileFrame& frame);

/// Throws MalformedRecord on wrong size, out-of-range counts or non-finite floats.
TactileFrame decode(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_stream(std::span<const TactileFrame> frames);
std::vector<TactileFrame> decode_stream(std::span<const std::uint8_t> bytes);

std::string frame_csv_header();
std::string to_csv_row(const TactileFrame& frame);
TactileFrame parse_csv_row(std::string_view row);

/// Writes '#'-prefixed comment lines, the CSV header, then rows as they arrive.
class FrameLogWriter {
 public:
  FrameLogWriter(const std::filesystem::path& path, const std::vector<std::string>& comments);
  void write(const TactileFrame& frame);
  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t rows_ = 0;
};

std::vector<TactileFrame> read_frame_log(const std::filesystem::path& path);

}  // namespace tacsim::pipeline
