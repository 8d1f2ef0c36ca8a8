#include "tacsim/frame_codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "tacsim/errors.hpp"

namespace tacsim::pipeline {

namespace {

template <typename U>
void put_le(std::uint8_t* dst, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) dst[i] = static_cast<std::uint8_t>(value >> (8 * i));
}

template <typename U>
U get_le(const std::uint8_t* src) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(static_cast<U>(src[i]) << (8 * i));
  return value;
}

}  // namespace

Record encode(const TactileFrame& frame) {
  Record rec{};
  std::uint8_t* p = rec.data();
  put_le(p, static_cast<std::uint64_t>(frame.timestamp_us));
  p += 8;
  *p++ = frame.finger_id;
  for (int r = 0; r < kTaxelRows; ++r) {
    for (int c = 0; c < kTaxelCols; ++c) {
      const std::int32_t v = frame.fa1(r, c);
      if (v < 0 || v > kFa1FullScale) throw InvalidArgument("FA-I count outside ADC range");
      put_le(p, static_cast<std::uint16_t>(v));
      p += 2;
    }
  }
  for (int i = 0; i < 3; ++i) {
    const auto f = static_cast<float>(frame.sa2_ut[i]);
    if (static_cast<double>(f) != frame.sa2_ut[i])
      throw InvalidArgument("SA-II value is not representable as float32");
    put_le(p, std::bit_cast<std::uint32_t>(f));
    p += 4;
  }
  return rec;
}

TactileFrame decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kRecordSize)
    throw MalformedRecord("record is " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(kRecordSize));
  const std::uint8_t* p = bytes.data();
  TactileFrame f;
  f.timestamp_us = static_cast<std::int64_t>(get_le<std::uint64_t>(p));
  p += 8;
  f.finger_id = *p++;
  for (int r = 0; r < kTaxelRows; ++r) {
    for (int c = 0; c < kTaxelCols; ++c) {
      const auto v = get_le<std::uint16_t>(p);
      p += 2;
      if (v > kFa1FullScale) throw MalformedRecord("FA-I count outside ADC range");
      f.fa1(r, c) = v;
    }
  }
  for (int i = 0; i < 3; ++i) {
    const float v = std::bit_cast<float>(get_le<std::uint32_t>(p));
    p += 4;
    if (!std::isfinite(v)) throw MalformedRecord("non-finite SA-II value");
    f.sa2_ut[i] = v;
  }
  return f;
}

std::vector<std::uint8_t> encode_stream(std::span<const TactileFrame> frames) {
  std::vector<std::uint8_t> out;
  out.reserve(frames.size() * kRecordSize);
  for (const auto& f : frames) {
    const Record rec = encode(f);
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

std::vector<TactileFrame> decode_stream(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kRecordSize != 0) throw MalformedRecord("stream length is not a whole number of records");
  std::vector<TactileFrame> out;
  out.reserve(bytes.size() / kRecordSize);
  for (std::size_t off = 0; off < bytes.size(); off += kRecordSize)
    out.push_back(decode(bytes.subspan(off, kRecordSize)));
  return out;
}

}  // namespace tacsim::pipeline
