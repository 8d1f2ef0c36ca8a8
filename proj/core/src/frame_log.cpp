#include <charconv>
#include <string>

#include <fmt/format.h>

#include "tacsim/errors.hpp"
#include "tacsim/frame_codec.hpp"

namespace tacsim::pipeline {

std::string frame_csv_header() {
  std::string h = "timestamp_us,finger_id";
  for (int r = 0; r < kTaxelRows; ++r)
    for (int c = 0; c < kTaxelCols; ++c) h += fmt::format(",fa1_{}{}", r, c);
  h += ",sa2_x,sa2_y,sa2_z";
  return h;
}

std::string to_csv_row(const TactileFrame& frame) {
  std::string row = fmt::format("{},{}", frame.timestamp_us, static_cast<int>(frame.finger_id));
  for (int r = 0; r < kTaxelRows; ++r)
    for (int c = 0; c < kTaxelCols; ++c) row += fmt::format(",{}", frame.fa1(r, c));
  for (int i = 0; i < 3; ++i) row += fmt::format(",{}", frame.sa2_ut[i]);
  return row;
}

namespace {

template <typename T>
T parse_field(std::string_view field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw MalformedRecord("bad CSV field '" + std::string(field) + "'");
  return value;
}

double parse_double(std::string_view field) {
  // libstdc++ 11 lacks floating-point from_chars; strtod on a bounded copy.
  const std::string s(field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw MalformedRecord("bad CSV field '" + s + "'");
  return v;
}

}  // namespace

TactileFrame parse_csv_row(std::string_view row) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = row.find(',', start);
    fields.push_back(row.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != 2 + kTaxelCount + 3)
    throw MalformedRecord("frame row has " + std::to_string(fields.size()) + " fields, expected 21");
  TactileFrame f;
  f.timestamp_us = parse_field<std::int64_t>(fields[0]);
  const int finger = parse_field<int>(fields[1]);
  if (finger < 0 || finger > 255) throw MalformedRecord("finger id out of range");
  f.finger_id = static_cast<std::uint8_t>(finger);
  for (int i = 0; i < kTaxelCount; ++i) {
    const auto v = parse_field<std::int32_t>(fields[2 + static_cast<std::size_t>(i)]);
    if (v < 0 || v > kFa1FullScale) throw MalformedRecord("FA-I count outside ADC range");
    f.fa1(i / kTaxelCols, i % kTaxelCols) = v;
  }
  for (int i = 0; i < 3; ++i) f.sa2_ut[i] = parse_double(fields[2 + kTaxelCount + static_cast<std::size_t>(i)]);
  return f;
}

FrameLogWriter::FrameLogWriter(const std::filesystem::path& path,
                               const std::vector<std::string>& comments)
    : out_(path) {
  if (!out_) throw InvalidArgument("cannot open " + path.string() + " for writing");
  for (const auto& c : comments) out_ << "# " << c << '\n';
  out_ << frame_csv_header() << '\n';
}

void FrameLogWriter::write(const TactileFrame& frame) {
  out_ << to_csv_row(frame) << '\n';
  ++rows_;
}

std::vector<TactileFrame> read_frame_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<TactileFrame> frames;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != frame_csv_header()) throw MalformedRecord("unexpected frame log header");
      header_seen = true;
      continue;
    }
    frames.push_back(parse_csv_row(line));
  }
  if (!header_seen) throw MalformedRecord("frame log has no header");
  return frames;
}

}  // namespace tacsim::pipeline
